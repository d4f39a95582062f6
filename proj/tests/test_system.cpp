#include "doctest.h"

#include "qpe/errors.hpp"
#include "qpe/system.hpp"

#include <random>

using namespace qpe;

namespace {

const LameParams kParams{1.0, 1.0};

Eigen::VectorXcd random_coeffs(int n, std::uint64_t seed)
{
    std::mt19937_64 g(seed);
    std::uniform_real_distribution<double> u(-1, 1);
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i)
        v[i] = {u(g), u(g)};
    return v;
}

}  // namespace

TEST_SUITE("system")
{
    TEST_CASE("projection of basis fields")
    {
        BasisMap map(3);
        auto quad = build_quadrature(2 * 3 + 2);
        auto w10 = [](const Direction& u) { return Vec3c(vsh_real(Family::W, 1, 0, u).cast<cplx>()); };
        auto b = project_rhs(w10, quad, map);
        int i = map.index(1, 0, Family::W);
        CHECK(std::abs(b[i] - 3.0) < 1e-13);
        b[i] = 0;
        CHECK(b.cwiseAbs().maxCoeff() < 1e-13);

        auto mix = [](const Direction& u) {
            return Vec3c((vsh_real(Family::V, 2, 1, u) + 0.5 * vsh_real(Family::X, 3, -2, u)).cast<cplx>());
        };
        auto bm = project_rhs(mix, quad, map);
        CHECK(std::abs(bm[map.index(2, 1, Family::V)] - 15.0) < 1e-12);
        CHECK(std::abs(bm[map.index(3, -2, Family::X)] - 6.0) < 1e-12);

        DensityCoeffs d{map, Eigen::VectorXcd::Zero(map.size())};
        d.F[map.index(2, 1, Family::V)] = 1.0;
        d.F[map.index(3, -2, Family::X)] = 0.5;
        CHECK((project_rhs(d, map) - bm).cwiseAbs().maxCoeff() < 1e-12);

        auto zero = [](const Direction&) { return Vec3c(Vec3c::Zero()); };
        CHECK(project_rhs(zero, quad, map).cwiseAbs().maxCoeff() == 0.0);
        CHECK_THROWS_AS(project_rhs(zero, build_quadrature(7), map), QuadratureDegreeError);
    }

    TEST_CASE("projection exactness on random expansions")
    {
        BasisMap map(4);
        auto quad = build_quadrature(10);
        DensityCoeffs d{map, random_coeffs(map.size(), 31)};
        auto bq = project_rhs([&](const Direction& u) { return d.eval(u); }, quad, map);
        CHECK((bq - project_rhs(d, map)).cwiseAbs().maxCoeff() < 1e-12);
    }

    TEST_CASE("single-ball round trips")
    {
        for (int L = 1; L <= 4; ++L) {
            auto M = assemble_single(1.1, 0.2, kParams, L);
            int n = M.map.size();
            Eigen::VectorXcd F = random_coeffs(n, 40 + L);
            RhsVector b = M.M * F.conjugate();
            auto r = solve_single(M, b);
            CHECK((r.F.F - F).cwiseAbs().maxCoeff() < 1e-10);
            CHECK(r.residual < 1e-10);
            CHECK(r.rcond > 0.0);
        }
    }

    TEST_CASE("zero right-hand side")
    {
        auto M = assemble_single(0.6, 0.2, kParams, 2);
        auto r = solve_single(M, RhsVector::Zero(M.map.size()));
        CHECK(r.F.F.cwiseAbs().maxCoeff() == 0.0);
        CHECK(r.residual == 0.0);
    }

    TEST_CASE("the solve is conjugate-linear")
    {
        auto M = assemble_single(2.4, 0.3, kParams, 3);
        int n = M.map.size();
        RhsVector b1 = random_coeffs(n, 50), b2 = random_coeffs(n, 51);
        cplx c1(0.3, -1.2), c2(-0.7, 0.4);
        auto f1 = solve_single(M, b1).F.F, f2 = solve_single(M, b2).F.F;
        auto f = solve_single(M, c1 * b1 + c2 * b2).F.F;
        CHECK((f - (std::conj(c1) * f1 + std::conj(c2) * f2)).cwiseAbs().maxCoeff() < 1e-10);
    }

    TEST_CASE("recovery needs the matching quasi-momentum")
    {
        auto M = assemble_single(1.1, 0.3, kParams, 3);
        auto W = assemble_single(1.1 + 0.5, 0.3, kParams, 3);
        Eigen::VectorXcd F = random_coeffs(M.map.size(), 60);
        RhsVector b = M.M * F.conjugate();
        CHECK((solve_single(M, b).F.F - F).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((solve_single(W, b).F.F - F).cwiseAbs().maxCoeff() > 1e-4);
    }

    TEST_CASE("dimer round trip")
    {
        DimerGeometry g{0.2, 0.1};
        auto M = assemble_dimer(0.8, g, kParams, 3);
        int n = M.map.size();
        Eigen::VectorXcd F1 = random_coeffs(n, 70), F2 = random_coeffs(n, 71);
        Eigen::VectorXcd x(2 * n);
        x << F1.conjugate(), F2.conjugate();
        Eigen::VectorXcd b = M.M * x;
        auto r = solve_dimer(M, b.head(n), b.tail(n));
        CHECK((r.F.F - F1).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((r.F2.F - F2).cwiseAbs().maxCoeff() < 1e-10);
        auto z = solve_dimer(M, RhsVector::Zero(n), RhsVector::Zero(n));
        CHECK(z.F.F.cwiseAbs().maxCoeff() + z.F2.F.cwiseAbs().maxCoeff() == 0.0);
        auto S = assemble_single(0.8, 0.1, kParams, 3);
        CHECK_THROWS_AS(solve_dimer(S, b.head(n), b.tail(n)), DomainError);
    }

    TEST_CASE("singular matrices are reported")
    {
        AssembledMatrix M;
        M.map = BasisMap(1);
        M.M = Eigen::MatrixXcd::Zero(10, 10);
        try {
            solve_single(M, RhsVector::Ones(10));
            FAIL("expected SingularMatrixError");
        } catch (const SingularMatrixError& e) {
            CHECK(e.rcond == 0.0);
        }
        M.M = Eigen::MatrixXcd::Identity(10, 10);
        M.M(9, 9) = 1e-14;
        auto r = solve_single(M, RhsVector::Ones(10));
        CHECK(r.ill_conditioned);
    }

    TEST_CASE("builtin fields")
    {
        auto u = Direction::from_vector(Point3(1, 0, 0));
        auto pw = builtin_field("plane-wave", 0.5, 0.2, kParams);
        CHECK(std::abs(pw(u)[2] - std::exp(kI * 0.1)) < 1e-15);
        auto pf = builtin_field("point-force", 0.5, 0.2, kParams);
        CHECK((pf(u) - Vec3c(kelvin_tensor(Point3(0.2, 0, -0.4), kParams).col(2).cast<cplx>())).norm() < 1e-15);
        CHECK(builtin_field("uniform", 0.5, 0.2, kParams)(u)[1] == 0.5);
        CHECK_THROWS_AS(builtin_field("point-force", 0.5, 0.4, kParams), GeometryError);
        CHECK_THROWS_AS(builtin_field("nope", 0.5, 0.2, kParams), DomainError);
    }
}
