#pragma once

#include "qpe/types.hpp"

#include <map>
#include <shared_mutex>
#include <tuple>

namespace qpe {

// alpha reduced to [0, 2 pi).
double reduce_alpha(double alpha);
// True when alpha = 0 mod 2 pi (to 1e-14).
bool alpha_is_singular(double alpha);

struct DimerGeometry {
    double d = 0.2;
    double rho = 0.1;
    void validate() const;
};

// Li_s(e^{sign i alpha}) = sum_{k>=1} e^{sign i k alpha} / k^s.
cplx polylog_unit(int s, double alpha, int sign);
// Phi(e^{sign i alpha}, s, D) = sum_{k>=0} e^{sign i k alpha} / (k + D)^s, 0 < D <= 1.
cplx lerch_unit(int s, double alpha, int sign, double D);

// sum_{k >= kstart} z^k / (k + D)^s for |z| = 1; the summation engine behind both functions.
// Direct compensated sum followed by an iterated known-ratio transform of the tail.
cplx unit_circle_power_sum(int s, double alpha, int sign, double D, long kstart);

// Memoized Li_s and Phi values at one alpha.
class LatticeSumCache {
public:
    explicit LatticeSumCache(double alpha);
    double alpha() const { return alpha_; }
    cplx li(int s, int sign);
    cplx phi(int s, int sign, double D);
    // Precompute s = 1..smax (Li_1 skipped at alpha = 0) for the given offsets (0 means Li).
    void warm(int smax, std::initializer_list<double> offsets = {0.0});
    std::size_t size() const;

private:
    using Key = std::tuple<int, int, double>;
    double alpha_;
    mutable std::shared_mutex mu_;
    std::map<Key, cplx> values_;
    cplx get(int s, int sign, double D);
};

// Which lattice a script series runs over: the single-ball lattice n != 0, or the dimer
// lattices n in Z with offset 2d (21: ball 2 acting on ball 1) or -2d (12).
enum class LatticeVariant { Single, D21, D12 };

struct LatticeContext {
    double alpha = 0.0;
    LatticeVariant variant = LatticeVariant::Single;
    double d = 0.0;
    LatticeSumCache* cache = nullptr;
};

// epsilon_q: 1/sqrt2, 0, -1/sqrt2 for q = -1, 0, 1.
double epsilon_q(int q);

cplx scriptH(int l, int lam, int m, int mu, const LatticeContext& ctx);
cplx scriptA(int l, int lam, int m, int mu, int q, const LatticeContext& ctx);
cplx scriptD(int l, int lam, int m, int mu, const LatticeContext& ctx);
cplx scriptL(int l, int j, int lam, int m, int mu, int q, int m1, const LatticeContext& ctx);

inline LatticeContext single_lattice(double alpha, LatticeSumCache* cache = nullptr)
{
    return {alpha, LatticeVariant::Single, 0.0, cache};
}
inline LatticeContext dimer_lattice(double alpha, LatticeVariant v, const DimerGeometry& g, LatticeSumCache* cache = nullptr)
{
    return {alpha, v, g.d, cache};
}

inline cplx scriptH(int l, int lam, int m, int mu, double alpha) { return scriptH(l, lam, m, mu, single_lattice(alpha)); }
inline cplx scriptA(int l, int lam, int m, int mu, double alpha, int q) { return scriptA(l, lam, m, mu, q, single_lattice(alpha)); }
inline cplx scriptD(int l, int lam, int m, int mu, double alpha) { return scriptD(l, lam, m, mu, single_lattice(alpha)); }
inline cplx scriptL(int l, int j, int lam, int m, int mu, int q, int m1, double alpha)
{
    return scriptL(l, j, lam, m, mu, q, m1, single_lattice(alpha));
}

#define QPE_DIMER_SCRIPT(suffix, variant)                                                                        \
    inline cplx scriptH##suffix(int l, int lam, int m, int mu, double alpha, const DimerGeometry& g)                   \
    {                                                                                                          \
        return scriptH(l, lam, m, mu, dimer_lattice(alpha, variant, g));                                       \
    }                                                                                                          \
    inline cplx scriptA##suffix(int l, int lam, int m, int mu, double alpha, int q, const DimerGeometry& g)            \
    {                                                                                                          \
        return scriptA(l, lam, m, mu, q, dimer_lattice(alpha, variant, g));                                    \
    }                                                                                                          \
    inline cplx scriptD##suffix(int l, int lam, int m, int mu, double alpha, const DimerGeometry& g)                   \
    {                                                                                                          \
        return scriptD(l, lam, m, mu, dimer_lattice(alpha, variant, g));                                       \
    }                                                                                                          \
    inline cplx scriptL##suffix(int l, int j, int lam, int m, int mu, int q, int m1, double alpha, const DimerGeometry& g) \
    {                                                                                                          \
        return scriptL(l, j, lam, m, mu, q, m1, dimer_lattice(alpha, variant, g));                             \
    }

QPE_DIMER_SCRIPT(21, LatticeVariant::D21)
QPE_DIMER_SCRIPT(12, LatticeVariant::D12)
#undef QPE_DIMER_SCRIPT

}  // namespace qpe
