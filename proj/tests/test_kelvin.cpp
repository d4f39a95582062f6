#include "doctest.h"

#include "qpe/errors.hpp"
#include "qpe/kelvin.hpp"
#include "qpe/oracle.hpp"

#include <random>

using namespace qpe;

TEST_SUITE("kelvin")
{
    TEST_CASE("tensor values")
    {
        LameParams p{1.0, 1.0};
        auto G = kelvin_tensor(Point3(1, 0, 0), p);
        CHECK(G(0, 0) == doctest::Approx(1 / (4 * kPi)));
        CHECK(G(1, 1) == doctest::Approx(1 / (6 * kPi)));
        CHECK(G(2, 2) == doctest::Approx(1 / (6 * kPi)));
        CHECK(G(0, 1) == 0.0);
        // scaling with mu: G is proportional to 1/mu at fixed lambda/mu
        auto G2 = kelvin_tensor(Point3(1, 0, 0), LameParams{2.0, 2.0});
        CHECK(G2(0, 0) == doctest::Approx(G(0, 0) / 2));
        CHECK_THROWS_AS(kelvin_tensor(Point3::Zero(), p), SingularityError);
    }

    TEST_CASE("tensor symmetry, evenness, homogeneity")
    {
        LameParams p{2.3, 0.7};
        std::mt19937_64 g(20);
        std::normal_distribution<double> n;
        for (int s = 0; s < 20; ++s) {
            Point3 x(n(g), n(g), n(g));
            auto G = kelvin_tensor(x, p);
            CHECK((G - G.transpose()).norm() < 1e-15);
            CHECK((G - kelvin_tensor(-x, p)).norm() == 0.0);
            CHECK((kelvin_tensor(2.5 * x, p) - G / 2.5).norm() < 1e-14 * G.norm());
        }
    }

    TEST_CASE("Navier equation away from the origin")
    {
        // mu Lap G + (lambda + mu) grad div G = 0 by finite differences, column e_z
        LameParams p{1.7, 0.9};
        Point3 x(0.6, -0.3, 0.8);
        double h = 1e-3;
        auto u = [&](const Point3& y) -> Point3 { return kelvin_tensor(y, p).col(2); };
        Point3 lap = Point3::Zero(), gdiv = Point3::Zero();
        for (int i = 0; i < 3; ++i) {
            Point3 e = Point3::Zero();
            e[i] = h;
            lap += (u(x + e) - 2 * u(x) + u(x - e)) / (h * h);
        }
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                Point3 ei = Point3::Zero(), ej = Point3::Zero();
                ei[i] = h;
                ej[j] = h;
                gdiv[i] += (u(x + ei + ej)[j] - u(x + ei - ej)[j] - u(x - ei + ej)[j] + u(x - ei - ej)[j]) / (4 * h * h);
            }
        CHECK((p.mu * lap + (p.lambda + p.mu) * gdiv).norm() < 1e-5);
    }

    TEST_CASE("exterior matrix values")
    {
        LameParams p{1.0, 1.0};
        auto om = out_matrix(1, 2.0, p);
        CHECK(om.value(2, 2) == doctest::Approx(1.0 / 12));
        CHECK(om.column_entry(Family::X, Family::X) == om.value(2, 2));
        CHECK_THROWS_AS(out_matrix(1, 1.0, p), DomainError);
        CHECK_THROWS_AS(out_coeffs(-1, p), DomainError);
        CHECK(out_coeffs(0, p).a12 == 0.0);
    }

    TEST_CASE("sign flip negates the coefficients")
    {
        LameParams p{1.3, 0.8}, f = p;
        f.sign_flip = true;
        for (int l = 0; l <= 6; ++l) {
            auto a = out_coeffs(l, p), b = out_coeffs(l, f);
            CHECK(a.a11 == -b.a11);
            CHECK(a.a12 == -b.a12);
            CHECK(a.a22 == -b.a22);
            CHECK(a.a33 == -b.a33);
        }
    }

    TEST_CASE("diagonal action")
    {
        LameParams p{1.0, 1.0};
        CHECK(diag_matrix(0, p).tau(Family::V) == doctest::Approx(1.0 / 9));
        CHECK_THROWS_AS(diag_matrix(0, p).tau(Family::W), ForbiddenIndex);
        // exterior field is continuous onto the sphere
        double rho = 0.3;
        auto d = Direction::from_vector(Point3(0.2, -0.5, 0.7));
        for (Family f : {Family::V, Family::W, Family::X})
            for (int l = (f == Family::V ? 0 : 1); l <= 4; ++l)
                for (int m = -l; m <= l; ++m) {
                    Point3 on = apply_S_self(f, l, m, d, rho, p);
                    Point3 expect = rho * diag_matrix(l, p).tau(f) * vsh_real(f, l, m, d);
                    CHECK((on - expect).norm() < 1e-14);
                    Point3 out = apply_S_at(rho * (1 + 1e-10) * d.xyz, Point3::Zero(), f, l, m, rho, p);
                    CHECK((out - on).norm() < 1e-8);
                }
        CHECK_THROWS_AS(apply_S_shifted(0, Family::V, 1, 0, d, rho, p), DomainError);
    }

    TEST_CASE("exterior closed form against quadrature")
    {
        LameParams p{1.4, 0.6};
        double rho = 0.35;
        auto quad = build_quadrature(60);
        Point3 x(0.2, 0.5, -0.4), c(0.05, 0, 0.02);
        double worst = 0;
        for (Family f : {Family::V, Family::W, Family::X})
            for (int l = (f == Family::V ? 0 : 1); l <= 3; ++l)
                for (int m = -l; m <= l; ++m) {
                    Point3 brute = Point3::Zero();
                    for (std::size_t k = 0; k < quad.nodes.size(); ++k) {
                        const auto& u = quad.nodes[k];
                        brute += quad.weights[k] * rho * rho *
                                 (kelvin_tensor(x - c - rho * u.xyz, p) * vsh_real(f, l, m, u));
                    }
                    worst = std::max(worst, (brute - apply_S_at(x, c, f, l, m, rho, p)).norm());
                }
        CHECK(worst < 1e-10);
    }

    TEST_CASE("parameter validation")
    {
        CHECK_THROWS_AS((LameParams{1.0, 0.0}.validate()), DomainError);
        CHECK_THROWS_AS((LameParams{-3.0, 1.0}.validate()), DomainError);
        CHECK_NOTHROW((LameParams{-0.5, 1.0}.validate()));
    }
}
