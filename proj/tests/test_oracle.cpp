#include "doctest.h"

#include "qpe/assembly.hpp"
#include "qpe/errors.hpp"
#include "qpe/oracle.hpp"

#include <random>

using namespace qpe;

namespace {

const LameParams kParams{1.3, 0.8};

}  // namespace

TEST_SUITE("oracle")
{
    TEST_CASE("Gauss-Legendre rule")
    {
        std::vector<double> x, w;
        gauss_legendre(5, x, w);
        double s = 0, s8 = 0;
        for (int i = 0; i < 5; ++i) {
            s += w[i];
            s8 += w[i] * std::pow(x[i], 8);
        }
        CHECK(s == doctest::Approx(2.0).epsilon(1e-15));
        CHECK(s8 == doctest::Approx(2.0 / 9).epsilon(1e-14));
        CHECK_THROWS_AS(gauss_legendre(0, x, w), DomainError);
    }

    TEST_CASE("quadrature basics")
    {
        auto q = build_quadrature(8);
        double sw = 0;
        cplx y00 = 0, y32 = 0;
        for (std::size_t k = 0; k < q.nodes.size(); ++k) {
            sw += q.weights[k];
            y00 += q.weights[k] * ylm_complex(0, 0, q.nodes[k]);
            y32 += q.weights[k] * std::norm(ylm_complex(3, 2, q.nodes[k]));
        }
        CHECK(std::abs(sw - 4 * kPi) < 1e-13);
        CHECK(std::abs(y00 - 2 * std::sqrt(kPi)) < 1e-14);
        CHECK(std::abs(y32 - 1.0) < 1e-13);
        CHECK(q.nodes.size() == 5u * 9u);
    }

    TEST_CASE("quadrature exactness self-test")
    {
        for (int deg : {6, 11, 20}) {
            auto q = build_quadrature(deg);
            double worst = 0;
            for (int l1 = 0; l1 <= deg; ++l1)
                for (int l2 = 0; l1 + l2 <= deg; ++l2)
                    for (int m1 = -l1; m1 <= l1; ++m1) {
                        int m2 = m1;
                        if (std::abs(m2) > l2)
                            continue;
                        cplx s = 0;
                        for (std::size_t k = 0; k < q.nodes.size(); ++k)
                            s += q.weights[k] * ylm_complex(l1, m1, q.nodes[k]) * std::conj(ylm_complex(l2, m2, q.nodes[k]));
                        worst = std::max(worst, std::abs(s - (l1 == l2 ? 1.0 : 0.0)));
                    }
            CHECK(worst < 1e-13);
        }
    }

    TEST_CASE("inner product conventions")
    {
        auto q = build_quadrature(12);
        SphereField w = [](const Direction& u) { return vsh_complex(Family::W, 2, 1, u); };
        SphereField x = [](const Direction& u) { return vsh_complex(Family::X, 2, 1, u); };
        SphereField v = [](const Direction& u) { return vsh_complex(Family::V, 2, 1, u); };
        CHECK(std::abs(inner_product_S2(w, w, q) - vsh_norm(Family::W, 2)) < 1e-12);
        CHECK(std::abs(inner_product_S2(v, v, q) - vsh_norm(Family::V, 2)) < 1e-12);
        CHECK(std::abs(inner_product_S2(x, x, q) - vsh_norm(Family::X, 2)) < 1e-12);
        CHECK(std::abs(inner_product_S2(v, w, q)) < 1e-12);
        CHECK(std::abs(inner_product_S2(w, x, q)) < 1e-12);
        double alpha = 0.7;
        int n = 3;
        SphereField ew = [&](const Direction& u) { return Vec3c(std::polar(1.0, n * alpha) * w(u)); };
        SphereField y = [](const Direction& u) { return Vec3c(vsh_real(Family::W, 2, 1, u).cast<cplx>()); };
        CHECK(std::abs(inner_product_S2(y, ew, q) - std::polar(1.0, -n * alpha) * inner_product_S2(y, w, q)) < 1e-13);
    }

    TEST_CASE("brute potential")
    {
        auto q = build_quadrature(30);
        BasisMap map(2);
        DensityCoeffs zero{map, Eigen::VectorXcd::Zero(map.size())};
        Point3 x(0.5, 0.1, 0.0);
        CHECK(brute_potential(x, zero, Point3::Zero(), 0.2, kParams, q).norm() == 0.0);
        DensityCoeffs a{map, Eigen::VectorXcd::Random(map.size())}, b{map, Eigen::VectorXcd::Random(map.size())};
        DensityCoeffs ab{map, 2.0 * a.F - kI * b.F};
        Vec3c lhs = brute_potential(x, ab, Point3::Zero(), 0.2, kParams, q);
        Vec3c rhs = 2.0 * brute_potential(x, a, Point3::Zero(), 0.2, kParams, q) -
                    kI * brute_potential(x, b, Point3::Zero(), 0.2, kParams, q);
        CHECK((lhs - rhs).norm() < 1e-14 * lhs.norm());
        CHECK_THROWS_AS(brute_potential(Point3(0.205, 0, 0), a, Point3::Zero(), 0.2, kParams, q), DomainError);
        CHECK_NOTHROW(brute_potential(Point3(0.21, 0, 0), a, Point3::Zero(), 0.2, kParams, q));
    }

    TEST_CASE("brute lattice sums")
    {
        auto z = brute_lattice_entry(Family::W, 1, 0, Family::V, 1, 0, {0.5}, 0.2, kParams, 0);
        CHECK(z.partial[0].size() == 1u);
        CHECK(z.partial[0][0] == 0.0);
        auto s = brute_lattice_entry(Family::W, 2, 1, Family::W, 1, 1, {0.5, 2 * kPi - 0.5}, 0.2, kParams, 200);
        CHECK(std::abs(s.partial[0].back() - std::conj(s.partial[1].back())) < 1e-15);
        auto c = brute_lattice_sum([](double t) { return 1.0 / (t * t); }, {kPi}, 1000);
        CHECK(std::abs(c.partial[0].back() + kPi * kPi / 6) < 2e-6);
        CHECK(c.tail_bound_factor == doctest::Approx(2.0 / (1001.0 * 1001.0)));
    }

    TEST_CASE("per-copy evaluator matches the per-copy entry")
    {
        double rho = 0.2;
        BasisMap map(2);
        double worst = 0;
        for (auto& r : map.items())
            for (auto& c : map.items()) {
                PerCopyEvaluator ev(r.k, r.l, r.m, c.k, c.l, c.m, rho, kParams);
                for (int n : {1, -1, 2, -5, 17}) {
                    double a = per_copy_entry(r.k, r.l, r.m, c.k, c.l, c.m, n, rho, kParams);
                    worst = std::max(worst, std::abs(ev(n) - a));
                }
            }
        CHECK(worst < 1e-15);
    }

    TEST_CASE("known-ratio limit")
    {
        double a = 1.3;
        cplx z = std::polar(1.0, a);
        std::vector<cplx> partial;
        cplx s = 0;
        for (int n = 1; n <= 60; ++n) {
            s += std::pow(z, n) / double(n);
            if (n >= 52)
                partial.push_back(s);
        }
        CHECK(std::abs(known_ratio_limit(partial, z) + std::log(1.0 - z)) < 1e-11);
        CHECK_THROWS_AS(known_ratio_limit({}, z), DomainError);
        CHECK_THROWS_AS(known_ratio_limit({1.0, 2.0}, 1.0), QuasiMomentumSingular);
    }

    TEST_CASE("finite-difference gradients")
    {
        auto inv_r = [](const Point3& x) { return cplx(1.0 / x.norm()); };
        Vec3c g = finite_diff_gradient(inv_r, Point3(1, 0, 0), 1e-4);
        CHECK((g - Vec3c(-1, 0, 0)).norm() < 1e-8);
        auto r10 = [](const Point3& x) { return solid_regular(1, 0, x); };
        CHECK((finite_diff_gradient(r10, Point3(0.3, -0.2, 0.5), 1e-3) - Vec3c(0, 0, 1)).norm() < 1e-10);
        // grad I_1^0 = grad(z / r^3)
        Point3 x(0.4, 0.3, -0.6);
        double r = x.norm();
        Point3 expect = Point3(0, 0, 1) / std::pow(r, 3) - 3 * x[2] * x / std::pow(r, 5);
        auto i10 = [](const Point3& y) { return solid_irregular(1, 0, y); };
        CHECK((finite_diff_gradient(i10, x, 1e-4) - expect.cast<cplx>()).norm() < 1e-6);
    }
}
