#pragma once

namespace qpe {

struct CGKey {
    int j1, m1, j2, m2, j, m;
};

// <j1 m1; j2 m2 | j m>, integer spins only. Zero when selection rules fail.
double cg(const CGKey& key);
inline double cg(int j1, int m1, int j2, int m2, int j, int m) { return cg(CGKey{j1, m1, j2, m2, j, m}); }

// Uncached Racah sum, exposed so the memo can be checked against it.
double cg_racah(const CGKey& key);

// C(n, k); 0 when k < 0, k > n or n < 0.
double binomial(int n, int k);

// <lam, mu; l-lam, m-mu | l m> from its binomial closed form.
double cg_regular_closed(int l, int lam, int m, int mu);
// <lam, mu; l+lam, m-mu | l m> from its binomial closed form (sign (-1)^(lam+mu) included).
double cg_irregular_closed(int l, int lam, int m, int mu);

// Largest argument accepted by the log-factorial table.
inline constexpr int kMaxFactorial = 4 * 64 + 10;

}  // namespace qpe
