#include "qpe/latsum.hpp"

#include "qpe/coupling.hpp"
#include "qpe/errors.hpp"
#include "qpe/sphharm.hpp"
#include "qpe/translation.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <vector>

namespace qpe {

double reduce_alpha(double alpha)
{
    double a = std::fmod(alpha, 2.0 * kPi);
    if (a < 0.0)
        a += 2.0 * kPi;
    return a;
}

bool alpha_is_singular(double alpha)
{
    double a = reduce_alpha(alpha);
    return a < 1e-14 || 2.0 * kPi - a < 1e-14;
}

void DimerGeometry::validate() const
{
    if (!(rho > 0.0 && rho < 0.5))
        throw GeometryError("dimer geometry: need 0 < rho < 1/2");
    if (!(2.0 * d > 2.0 * rho))
        throw GeometryError("dimer geometry: balls overlap (need 2d > 2 rho)");
    if (!(1.0 - 2.0 * d > 2.0 * rho))
        throw GeometryError("dimer geometry: balls overlap across cells (need 1 - 2d > 2 rho)");
}

namespace {

cplx unit_phase(double alpha, int sign, long k)
{
    double t = std::fmod(double(k) * alpha, 2.0 * kPi);
    return {std::cos(t), sign * std::sin(t)};
}

// sum_{k >= N} (k + D)^{-s} by Euler-Maclaurin, s >= 2, N + D >= 10.
double hurwitz_tail(int s, double D, long N)
{
    static const double b2j[] = {1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730, 7.0 / 6};
    double x = double(N) + D;
    double sum = std::pow(x, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(x, -s);
    // f^{(2j-1)}(x) = -(s)_{2j-1} x^{-s-2j+1}
    double rising = s;  // (s)_1
    double fact = 1.0;  // (2j)!
    for (int j = 1; j <= 7; ++j) {
        if (j > 1)
            rising *= (s + 2.0 * j - 3.0) * (s + 2.0 * j - 2.0);
        fact *= (2.0 * j - 1.0) * (2.0 * j);
        sum += b2j[j - 1] / fact * rising * std::pow(x, -s - 2.0 * j + 1.0);
    }
    return sum;
}

}  // namespace

cplx unit_circle_power_sum(int s, double alpha, int sign, double D, long kstart)
{
    if (s < 1)
        throw DomainError("lattice sum: s must be >= 1");
    auto term = [&](long k) { return unit_phase(alpha, sign, k) * std::pow(double(k) + D, -double(s)); };

    if (alpha_is_singular(alpha)) {
        if (s == 1)
            throw QuasiMomentumSingular("lattice sum with s = 1 diverges at alpha = 0");
        const long N = kstart + 32;
        CompensatedSum<double> acc;
        for (long k = kstart; k < N; ++k)
            acc.add(std::pow(double(k) + D, -double(s)));
        return acc.value() + hurwitz_tail(s, D, N);
    }

    const cplx z = unit_phase(alpha, sign, 1);
    const double gap = std::abs(1.0 - z);
    const long K0 = kstart + std::min<long>(10000000, std::max<long>(2048, long(std::ceil(64.0 / gap))));
    CompensatedSum<cplx> head;
    for (long k = kstart; k < K0; ++k)
        head.add(term(k));

    // Partial sums of the tail and repeated (T_{j+1} - z T_j) / (1 - z) elimination of the
    // leading oscillatory remainder.
    constexpr int levels = 10;
    std::vector<cplx> t(levels + 1);
    CompensatedSum<cplx> run;
    for (int j = 0; j <= levels; ++j) {
        t[j] = run.value();
        run.add(term(K0 + j));
    }
    for (int lev = 0; lev < levels; ++lev)
        for (int j = 0; j + 1 <= levels - lev; ++j)
            t[j] = (t[j + 1] - z * t[j]) / (1.0 - z);
    return head.value() + t[0];
}

cplx polylog_unit(int s, double alpha, int sign)
{
    if (s < 1)
        throw DomainError("polylog_unit: s must be >= 1");
    if (sign != 1 && sign != -1)
        throw DomainError("polylog_unit: sign must be +1 or -1");
    if (s == 1) {
        if (alpha_is_singular(alpha))
            throw QuasiMomentumSingular("Li_1(e^{i alpha}) diverges at alpha = 0");
        return -std::log(1.0 - unit_phase(alpha, sign, 1));
    }
    return unit_circle_power_sum(s, alpha, sign, 0.0, 1);
}

cplx lerch_unit(int s, double alpha, int sign, double D)
{
    if (!(D > 0.0 && D <= 1.0))
        throw DomainError("lerch_unit: offset must lie in (0, 1]");
    if (sign != 1 && sign != -1)
        throw DomainError("lerch_unit: sign must be +1 or -1");
    return unit_circle_power_sum(s, alpha, sign, D, 0);
}

LatticeSumCache::LatticeSumCache(double alpha) : alpha_(alpha) {}

cplx LatticeSumCache::get(int s, int sign, double D)
{
    Key key{s, sign, D};
    {
        std::shared_lock lock(mu_);
        auto it = values_.find(key);
        if (it != values_.end())
            return it->second;
    }
    cplx v = D == 0.0 ? polylog_unit(s, alpha_, sign) : lerch_unit(s, alpha_, sign, D);
    std::unique_lock lock(mu_);
    values_.emplace(key, v);
    return v;
}

cplx LatticeSumCache::li(int s, int sign) { return get(s, sign, 0.0); }
cplx LatticeSumCache::phi(int s, int sign, double D) { return get(s, sign, D); }

void LatticeSumCache::warm(int smax, std::initializer_list<double> offsets)
{
    bool sing = alpha_is_singular(alpha_);
    for (double D : offsets)
        for (int s = 1; s <= smax; ++s)
            for (int sign : {-1, 1}) {
                if (s == 1 && sing)
                    continue;
                get(s, sign, D);
            }
}

std::size_t LatticeSumCache::size() const
{
    std::shared_lock lock(mu_);
    return values_.size();
}

double epsilon_q(int q)
{
    switch (q) {
    case -1: return 1.0 / std::sqrt(2.0);
    case 0: return 0.0;
    case 1: return -1.0 / std::sqrt(2.0);
    default: throw DomainError("epsilon_q: q must be -1, 0 or 1");
    }
}

namespace {

cplx li_val(const LatticeContext& c, int s, int sign)
{
    return c.cache ? c.cache->li(s, sign) : polylog_unit(s, c.alpha, sign);
}

cplx phi_val(const LatticeContext& c, int s, int sign, double D)
{
    return c.cache ? c.cache->phi(s, sign, D) : lerch_unit(s, c.alpha, sign, D);
}

// The bracket shared by all script series: the n > 0 half pairs with Y(pi/2, pi) and
// e^{-i alpha}, the n < 0 half with Y(pi/2, 0) and e^{i alpha}; `between` is +1 or -1.
cplx bracket(const LatticeContext& c, int s, int L, int M, double between)
{
    double ypi = ylm_equator(L, M, true);
    double y0 = ylm_equator(L, M, false);
    if (ypi == 0.0 && y0 == 0.0)
        return 0.0;
    switch (c.variant) {
    case LatticeVariant::Single:
        return li_val(c, s, -1) * ypi + between * li_val(c, s, 1) * y0;
    case LatticeVariant::D21:
        return phi_val(c, s, -1, 2.0 * c.d) * ypi +
               between * std::exp(kI * c.alpha) * phi_val(c, s, 1, 1.0 - 2.0 * c.d) * y0;
    default:
        return std::exp(-kI * c.alpha) * phi_val(c, s, -1, 1.0 - 2.0 * c.d) * ypi +
               between * phi_val(c, s, 1, 2.0 * c.d) * y0;
    }
}

double binom_root(int l, int lam, int m, int mu)
{
    return std::sqrt(binomial(l + lam + mu - m, lam + mu) * binomial(l + lam + m - mu, lam - mu));
}

double sign_pow(int k) { return (std::abs(k) % 2) ? -1.0 : 1.0; }

}  // namespace

cplx scriptH(int l, int lam, int m, int mu, const LatticeContext& c)
{
    int L = l + lam;
    if (std::abs(m - mu) > L || std::abs(mu) > lam || std::abs(m) > l)
        return 0.0;
    double pre = sign_pow(lam + mu) * std::sqrt((2.0 * l + 1.0) / (2.0 * lam + 1.0)) * binom_root(l, lam, m, mu) *
                 std::sqrt(4.0 * kPi / (2.0 * L + 1.0));
    if (pre == 0.0)
        return 0.0;
    return pre * bracket(c, L + 1, L, m - mu, 1.0);
}

cplx scriptA(int l, int lam, int m, int mu, int q, const LatticeContext& c)
{
    int L = l + lam;
    double eps = epsilon_q(q);
    if (eps == 0.0 || std::abs(m - mu) > L || std::abs(mu) > lam || std::abs(m) > l)
        return 0.0;
    if (L < 1)
        throw DomainError("scriptA: needs l + lambda >= 1");
    double pre = sign_pow(lam + mu) * eps * std::sqrt((2.0 * l + 1.0) / (2.0 * lam + 1.0)) *
                 binom_root(l, lam, m, mu) * std::sqrt(4.0 * kPi / (2.0 * L + 1.0));
    if (pre == 0.0)
        return 0.0;
    return pre * bracket(c, L, L, m - mu, -1.0);
}

cplx scriptD(int l, int lam, int m, int mu, const LatticeContext& c)
{
    int L = l + lam;
    if (std::abs(m - mu) > L || std::abs(mu) > lam || std::abs(m) > l)
        return 0.0;
    if (L < 2)
        throw DomainError("scriptD: needs l + lambda >= 2");
    double pre = sign_pow(lam + mu) * std::sqrt((2.0 * l + 1.0) / (2.0 * lam + 1.0)) * binom_root(l, lam, m, mu) *
                 std::sqrt(4.0 * kPi / (2.0 * L + 1.0));
    if (pre == 0.0)
        return 0.0;
    return pre * bracket(c, L - 1, L, m - mu, 1.0);
}

cplx scriptL(int l, int j, int lam, int m, int mu, int q, int m1, const LatticeContext& c)
{
    if (lam < 1)
        throw DomainError("scriptL: needs lambda >= 1");
    int L = l + lam;
    double eps = epsilon_q(q);
    if (eps == 0.0 || std::abs(m1) > 1 || std::abs(m - mu) > L || std::abs(mu) > lam || std::abs(m) > l)
        return 0.0;
    int sg = (q > m1) - (q < m1);
    double cgs = cg(lam - 1, mu - m1, 1, m1, lam, mu) * cg(lam - 1, mu - m1, 1, q + m1, j, mu + q);
    double pre = sign_pow(lam + mu + q) * sg * eps * std::sqrt(lam * (2.0 * l + 1.0)) * binom_root(l, lam, m, mu) *
                 cgs * std::sqrt(4.0 * kPi / (2.0 * L + 1.0));
    if (pre == 0.0)
        return 0.0;
    return kI * pre * bracket(c, L, L, m - mu, -1.0);
}

}  // namespace qpe
