#include "doctest.h"

#include "qpe/coupling.hpp"

#include <cmath>
#include <thread>
#include <vector>

using namespace qpe;

TEST_SUITE("coupling")
{
    TEST_CASE("values")
    {
        CHECK(cg(0, 0, 3, -2, 3, -2) == doctest::Approx(1.0));
        CHECK(cg(1, 1, 1, 0, 2, 1) == doctest::Approx(1.0 / std::sqrt(2.0)));
        CHECK(cg(1, 1, 1, 1, 2, 2) == doctest::Approx(1.0));
        CHECK(cg(1, 0, 1, 0, 1, 0) == doctest::Approx(0.0));
        CHECK(cg(1, 0, 1, 0, 0, 0) == doctest::Approx(-1.0 / std::sqrt(3.0)));
    }

    TEST_CASE("selection rules give exact zero")
    {
        CHECK(cg(1, 1, 1, 0, 2, 0) == 0.0);
        CHECK(cg(1, 0, 1, 0, 3, 0) == 0.0);
        CHECK(cg(2, 3, 1, 0, 2, 3) == 0.0);
    }

    TEST_CASE("orthogonality")
    {
        double worst = 0;
        for (int l = 0; l <= 6; ++l)
            for (int k = -l; k <= l; ++k)
                for (int s = -1; s <= 1; ++s)
                    for (int kp = -l; kp <= l; ++kp)
                        for (int sp = -1; sp <= 1; ++sp) {
                            double sum = 0;
                            for (int j = std::max(0, l - 1); j <= l + 1; ++j)
                                for (int m = -j; m <= j; ++m)
                                    sum += cg(l, k, 1, s, j, m) * cg(l, kp, 1, sp, j, m);
                            worst = std::max(worst, std::abs(sum - (k == kp && s == sp ? 1.0 : 0.0)));
                        }
        CHECK(worst < 1e-13);
    }

    TEST_CASE("closed forms match the Racah sum")
    {
        CHECK(cg_regular_closed(1, 0, 0, 0) == doctest::Approx(1.0));
        CHECK(cg_regular_closed(2, 1, 1, 1) == doctest::Approx(1.0 / std::sqrt(2.0)));
        CHECK(cg_irregular_closed(1, 1, 0, 0) == doctest::Approx(cg(1, 0, 2, 0, 1, 0)));
        double worst = 0;
        for (int l = 0; l <= 10; ++l)
            for (int lam = 0; lam <= 10; ++lam)
                for (int m = -l; m <= l; ++m)
                    for (int mu = -lam; mu <= lam; ++mu) {
                        if (lam <= l && std::abs(m - mu) <= l - lam)
                            worst = std::max(worst, std::abs(cg_regular_closed(l, lam, m, mu) -
                                                             cg_racah({lam, mu, l - lam, m - mu, l, m})));
                        if (std::abs(m - mu) <= l + lam)
                            worst = std::max(worst, std::abs(cg_irregular_closed(l, lam, m, mu) -
                                                             cg_racah({lam, mu, l + lam, m - mu, l, m})));
                    }
        CHECK(worst < 1e-13);
    }

    TEST_CASE("memo is consistent under concurrent fill")
    {
        std::vector<double> out(8, 0.0);
        std::vector<std::thread> pool;
        for (int t = 0; t < 8; ++t)
            pool.emplace_back([&, t] {
                double s = 0;
                for (int j = 0; j < 20; ++j)
                    for (int m = -j; m <= j; ++m)
                        s += cg(j, m, 1, 0, j + 1, m) + cg(j + 3, m, 2, 1, j + 2, m + 1);
                out[t] = s;
            });
        for (auto& p : pool)
            p.join();
        for (double v : out)
            CHECK(v == out[0]);
    }

    TEST_CASE("binomial")
    {
        CHECK(binomial(5, 2) == 10.0);
        CHECK(binomial(4, -1) == 0.0);
        CHECK(binomial(3, 5) == 0.0);
    }
}
