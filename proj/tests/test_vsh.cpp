#include "doctest.h"

#include "qpe/coupling.hpp"
#include "qpe/errors.hpp"
#include "qpe/vsh.hpp"

#include <random>

using namespace qpe;

namespace {

Direction rand_dir(std::mt19937_64& g)
{
    std::normal_distribution<double> n;
    return Direction::from_vector(Point3(n(g), n(g), n(g)));
}

}  // namespace

TEST_SUITE("vsh")
{
    TEST_CASE("printed values")
    {
        auto d = Direction::from_vector(Point3(0.3, -0.4, 0.5));
        double x = d.xyz[0], y = d.xyz[1], z = d.xyz[2];
        double c1 = std::sqrt(3 / (4 * kPi));
        CHECK((vsh_complex(Family::W, 1, 0, d) - Vec3c(0, 0, c1)).norm() < 1e-14);
        CHECK((vsh_complex(Family::V, 0, 0, d) + (0.5 / std::sqrt(kPi)) * d.xyz.cast<cplx>()).norm() < 1e-14);
        CHECK((vsh_complex(Family::X, 1, 0, Direction::from_vector(Point3(1, 0, 0))) - Vec3c(0, -c1, 0)).norm() < 1e-14);
        double c2 = 0.5 * std::sqrt(15 / kPi);
        CHECK((vsh_real(Family::W, 2, -2, d) - c2 * Point3(y, x, 0)).norm() < 1e-14);
        CHECK((vsh_real(Family::X, 2, 0, d) - 0.5 * std::sqrt(5 / kPi) * Point3(3 * y * z, -3 * x * z, 0)).norm() <
              1e-14);
        // W - (2l+1) Y r^ at l = 1 gives the coefficient 3
        CHECK((vsh_real(Family::V, 1, 1, d) - c1 * (Point3(1, 0, 0) - 3 * x * d.xyz)).norm() < 1e-14);
    }

    TEST_CASE("forbidden indices")
    {
        auto d = Direction::from_angles(0.3, 0.2);
        CHECK_THROWS_AS(vsh_complex(Family::W, 0, 0, d), ForbiddenIndex);
        CHECK_THROWS_AS(vsh_real(Family::X, 0, 0, d), ForbiddenIndex);
        CHECK_THROWS_AS(vsh_complex(Family::V, 1, 2, d), DomainError);
    }

    TEST_CASE("pointwise identities")
    {
        std::mt19937_64 g(3);
        double w_v = 0, tang = 0, rad = 0;
        for (int s = 0; s < 200; ++s) {
            auto d = rand_dir(g);
            Vec3c r = d.xyz.cast<cplx>();
            for (int l = 1; l <= 6; ++l)
                for (int m = -l; m <= l; ++m) {
                    cplx Y = ylm_complex(l, m, d);
                    Vec3c V = vsh_complex(Family::V, l, m, d), W = vsh_complex(Family::W, l, m, d),
                          X = vsh_complex(Family::X, l, m, d);
                    w_v = std::max(w_v, (W - V - (2.0 * l + 1.0) * Y * r).norm());
                    tang = std::max(tang, std::abs(cplx(r.transpose() * X)));
                    rad = std::max(rad, std::abs(cplx(r.transpose() * V) + (l + 1.0) * Y));
                    rad = std::max(rad, std::abs(cplx(r.transpose() * W) - double(l) * Y));
                }
        }
        CHECK(w_v < 1e-13);
        CHECK(tang < 1e-13);
        CHECK(rad < 1e-13);
    }

    TEST_CASE("real harmonics are the stated complex combinations")
    {
        std::mt19937_64 g(4);
        for (int s = 0; s < 20; ++s) {
            auto d = rand_dir(g);
            for (Family f : {Family::V, Family::W, Family::X})
                for (int l = (f == Family::V ? 0 : 1); l <= 4; ++l)
                    for (int m = -l; m <= l; ++m) {
                        ComplexPart p[2];
                        int np = real_to_complex(m, p);
                        Vec3c c = Vec3c::Zero();
                        for (int k = 0; k < np; ++k)
                            c += p[k].w * vsh_complex(f, l, p[k].m, d);
                        CHECK(c.imag().norm() < 1e-13);
                        CHECK((c.real() - vsh_real(f, l, m, d)).norm() < 1e-13);
                    }
        }
    }

    TEST_CASE("vector Y conversions")
    {
        auto d = Direction::from_vector(Point3(-0.2, 0.7, 0.1));
        CHECK((vector_Y(1, 0, 0, d) - vsh_complex(Family::W, 1, 0, d) / std::sqrt(3.0)).norm() < 1e-14);
        CHECK((vector_Y(0, 1, 0, d) - vsh_complex(Family::V, 0, 0, d)).norm() < 1e-14);
        CHECK((vector_Y(2, 2, 1, d) + kI * vsh_complex(Family::X, 2, 1, d) / std::sqrt(6.0)).norm() < 1e-14);
        CHECK_THROWS(vector_Y(3, 1, 0, d));
        // against the coupled expansion sum_m1 <l, M-m1; 1, m1 | j, M> Y_l^{M-m1} chi_m1
        double worst = 0;
        for (int l = 0; l <= 4; ++l)
            for (int j = (l == 0 ? 1 : l - 1); j <= l + 1; ++j)
                for (int M = -j; M <= j; ++M) {
                    Vec3c s = Vec3c::Zero();
                    for (int m1 = -1; m1 <= 1; ++m1)
                        if (std::abs(M - m1) <= l)
                            s += cg(l, M - m1, 1, m1, j, M) * ylm_complex(l, M - m1, d) * chi(m1);
                    worst = std::max(worst, (s - vector_Y(j, l, M, d)).norm());
                }
        CHECK(worst < 1e-13);
    }

    TEST_CASE("spherical basis cross products")
    {
        auto a = cross_spherical(1, 0);
        CHECK(std::abs(a.coef - kI) < 1e-15);
        CHECK(a.index == 1);
        CHECK(cross_spherical(0, 0).coef == 0.0);
        auto b = cross_spherical(1, -1);
        CHECK(std::abs(b.coef - kI) < 1e-15);
        CHECK(b.index == 0);
        for (int m = -1; m <= 1; ++m)
            for (int n = -1; n <= 1; ++n) {
                auto c = cross_spherical(m, n);
                Vec3c direct = cross(chi(m), chi(n));
                Vec3c rhs = c.coef == 0.0 ? Vec3c::Zero() : Vec3c(c.coef * chi(c.index));
                CHECK((direct - rhs).norm() < 1e-15);
            }
        CHECK((chi(0) - Vec3c(0, 0, 1)).norm() == 0.0);
    }

    TEST_CASE("r^ . a expansion")
    {
        auto b = rhat_dot_a_expand(Point3(-3, 0, 0));
        CHECK(std::abs(b[0] - 3 / std::sqrt(2.0)) < 1e-15);
        CHECK(std::abs(b[1]) < 1e-15);
        CHECK(std::abs(b[2] + 3 / std::sqrt(2.0)) < 1e-15);
        auto z = rhat_dot_a_expand(Point3(0, 0, 1));
        CHECK(std::abs(z[1] - 1.0) < 1e-15);
        CHECK(std::abs(z[0]) + std::abs(z[2]) < 1e-15);
        auto zero = rhat_dot_a_expand(Point3::Zero());
        CHECK(std::abs(zero[0]) + std::abs(zero[1]) + std::abs(zero[2]) == 0.0);
        std::mt19937_64 g(5);
        std::normal_distribution<double> n;
        double worst = 0;
        for (int s = 0; s < 50; ++s) {
            auto d = rand_dir(g);
            Point3 a(n(g), n(g), n(g));
            auto aq = rhat_dot_a_expand(a);
            cplx sum = 0;
            for (int q = -1; q <= 1; ++q)
                sum += (q % 2 ? -1.0 : 1.0) * aq[q + 1] * ylm_complex(1, q, d);
            worst = std::max(worst, std::abs(std::sqrt(4 * kPi / 3) * sum - d.xyz.dot(a)));
        }
        CHECK(worst < 1e-13);
    }

    TEST_CASE("(r^ . a) W recoupling")
    {
        // (r^.a) W_lam^mu = sqrt(4pi/3) sqrt(lam(2lam+1)) sum_q (-1)^q a_{-q} sum_m1 <lam-1,mu-m1;1,m1|lam,mu>
        //   Y_1^q Y_{lam-1}^{mu-m1} chi_m1, with Y_1^q Y_l^k expanded by Gaunt coefficients and the
        //   resulting sum_m1 Y_L chi_m1 recoupled into vector Y.
        std::mt19937_64 g(6);
        std::normal_distribution<double> n;
        double worst = 0;
        for (int s = 0; s < 10; ++s) {
            auto d = rand_dir(g);
            Point3 a(n(g), n(g), n(g));
            auto aq = rhat_dot_a_expand(a);
            for (int lam = 1; lam <= 4; ++lam)
                for (int mu = -lam; mu <= lam; ++mu) {
                    Vec3c direct = d.xyz.dot(a) * vsh_complex(Family::W, lam, mu, d);
                    Vec3c sum = Vec3c::Zero();
                    int l = lam - 1;
                    for (int q = -1; q <= 1; ++q)
                        for (int m1 = -1; m1 <= 1; ++m1) {
                            int k = mu - m1;
                            if (std::abs(k) > l)
                                continue;
                            double c0 = cg(l, k, 1, m1, lam, mu);
                            for (int L = std::max(0, l - 1); L <= l + 1; ++L) {
                                if (std::abs(k + q) > L)
                                    continue;
                                double gaunt = std::sqrt(3.0 * (2 * l + 1) / (4 * kPi * (2 * L + 1))) *
                                               cg(1, 0, l, 0, L, 0) * cg(1, q, l, k, L, k + q);
                                if (gaunt == 0.0)
                                    continue;
                                int M = k + q + m1;
                                for (int j = std::max(0, L - 1); j <= L + 1; ++j) {
                                    if (std::abs(M) > j)
                                        continue;
                                    double c = cg(L, k + q, 1, m1, j, M);
                                    if (c == 0.0)
                                        continue;
                                    sum += (q % 2 ? -1.0 : 1.0) * aq[q + 1] * c0 * gaunt * c * vector_Y(j, L, M, d);
                                }
                            }
                        }
                    sum *= std::sqrt(4 * kPi / 3) * std::sqrt(lam * (2.0 * lam + 1));
                    worst = std::max(worst, (sum - direct).norm());
                }
        }
        CHECK(worst < 1e-12);
    }
}
