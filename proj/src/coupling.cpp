#include "qpe/coupling.hpp"

#include "qpe/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <mutex>
#include <shared_mutex>
#include <unordered_map>

namespace qpe {

namespace {

const std::array<double, kMaxFactorial + 1>& log_factorials()
{
    static const auto table = [] {
        std::array<double, kMaxFactorial + 1> t{};
        for (int n = 1; n <= kMaxFactorial; ++n)
            t[n] = t[n - 1] + std::log(double(n));
        return t;
    }();
    return table;
}

double lf(int n)
{
    if (n > kMaxFactorial)
        throw std::overflow_error("log-factorial table exhausted");
    return log_factorials()[n];
}

std::uint64_t pack(const CGKey& k)
{
    auto u = [](int v) { return std::uint64_t(std::uint16_t(std::int16_t(v))); };
    // j's are small and nonnegative; 10 bits each for j, 11 bits for m's.
    return (u(k.j1) & 0x3ff) | ((u(k.m1) & 0x7ff) << 10) | ((u(k.j2) & 0x3ff) << 21) |
           ((u(k.m2) & 0x7ff) << 31) | ((u(k.j) & 0x3ff) << 42) | ((u(k.m) & 0x7ff) << 52);
}

struct Memo {
    std::shared_mutex mu;
    std::unordered_map<std::uint64_t, double> map;
};

Memo& memo()
{
    static Memo m;
    return m;
}

bool selection_ok(const CGKey& k)
{
    if (k.j1 < 0 || k.j2 < 0 || k.j < 0)
        return false;
    if (std::abs(k.m1) > k.j1 || std::abs(k.m2) > k.j2 || std::abs(k.m) > k.j)
        return false;
    if (k.m1 + k.m2 != k.m)
        return false;
    if (k.j < std::abs(k.j1 - k.j2) || k.j > k.j1 + k.j2)
        return false;
    return true;
}

}  // namespace

double cg_racah(const CGKey& k)
{
    if (!selection_ok(k))
        return 0.0;
    const int j1 = k.j1, m1 = k.m1, j2 = k.j2, m2 = k.m2, J = k.j, M = k.m;
    double pre = 0.5 * (lf(j1 + j2 - J) + lf(j1 - j2 + J) + lf(-j1 + j2 + J) - lf(j1 + j2 + J + 1) +
                        lf(j1 + m1) + lf(j1 - m1) + lf(j2 + m2) + lf(j2 - m2) + lf(J + M) + lf(J - M));
    int kmin = std::max({0, j2 - J - m1, j1 - J + m2});
    int kmax = std::min({j1 + j2 - J, j1 - m1, j2 + m2});
    double s = 0.0;
    for (int n = kmin; n <= kmax; ++n) {
        double lt = pre - (lf(n) + lf(j1 + j2 - J - n) + lf(j1 - m1 - n) + lf(j2 + m2 - n) +
                           lf(J - j2 + m1 + n) + lf(J - j1 - m2 + n));
        s += (n % 2 ? -1.0 : 1.0) * std::exp(lt);
    }
    return std::sqrt(2.0 * J + 1.0) * s;
}

double cg(const CGKey& key)
{
    if (!selection_ok(key))
        return 0.0;
    auto id = pack(key);
    auto& m = memo();
    {
        std::shared_lock lock(m.mu);
        auto it = m.map.find(id);
        if (it != m.map.end())
            return it->second;
    }
    double v = cg_racah(key);
    std::unique_lock lock(m.mu);
    m.map.emplace(id, v);
    return v;
}

double binomial(int n, int k)
{
    if (n < 0 || k < 0 || k > n)
        return 0.0;
    double v = std::exp(lf(n) - lf(k) - lf(n - k));
    return v < 1e15 ? std::round(v) : v;
}

double cg_regular_closed(int l, int lam, int m, int mu)
{
    if (lam < 0 || lam > l || std::abs(mu) > lam || std::abs(m) > l || std::abs(m - mu) > l - lam)
        return 0.0;
    double num = binomial(l + m, lam + mu) * binomial(l - m, lam - mu);
    return std::sqrt(num / binomial(2 * l, 2 * lam));
}

double cg_irregular_closed(int l, int lam, int m, int mu)
{
    if (lam < 0 || std::abs(mu) > lam || std::abs(m) > l || std::abs(m - mu) > l + lam)
        return 0.0;
    double num = binomial(l + lam - m + mu, lam + mu) * binomial(l + lam + m - mu, lam - mu);
    double sg = (std::abs(lam + mu) % 2 == 0) ? 1.0 : -1.0;
    return sg * std::sqrt(num / binomial(2 * l + 2 * lam + 1, 2 * lam));
}

}  // namespace qpe
