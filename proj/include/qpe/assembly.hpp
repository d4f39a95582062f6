#pragma once

#include "qpe/kelvin.hpp"
#include "qpe/latsum.hpp"
#include "qpe/translation.hpp"
#include "qpe/types.hpp"
#include "qpe/vsh.hpp"

#include <string>
#include <vector>

namespace qpe {

struct MultiIndex {
    int l = 0;
    int m = 0;
    Family k = Family::V;
    bool operator==(const MultiIndex&) const = default;
};

// l ascending, m = -l..l, family V, W, X; (0,0,W) and (0,0,X) removed.
class BasisMap {
public:
    static constexpr int kOrderingVersion = 1;

    explicit BasisMap(int lmax = 0);
    int lmax() const { return lmax_; }
    int size() const { return static_cast<int>(items_.size()); }
    const MultiIndex& at(int i) const { return items_.at(i); }
    int index(int l, int m, Family k) const;
    const std::vector<MultiIndex>& items() const { return items_; }

private:
    int lmax_;
    std::vector<MultiIndex> items_;
};

inline int basis_index(const BasisMap& map, int l, int m, Family k) { return map.index(l, m, k); }

// One lattice-series contribution to an entry: coef * S, where S is H_{l,lam}^{m,mu}(b),
// b_{-q} H or |b|^2 H summed against the Bloch phases (or evaluated at one b).
struct EntryTerm {
    cplx coef;
    SeriesKind kind;
    int l, m, lam, mu, q;
};

// Series decomposition of (Y^p_{l'm'}, S_{D+n}[Y^q_{lm}]) with the diagonal term excluded.
std::vector<EntryTerm> entry_terms(Family p, int lp, int mp, Family q, int l, int m, double rho, const LameParams& params);

// Slowest algebraic decay exponent of the lattice series in an entry (0 when the entry has none).
int entry_series_order(const std::vector<EntryTerm>& terms);

// rho tau^p(l) norm_p(l) when (p, l', m') = (q, l, m), else 0.
double diagonal_term(Family p, int lp, int mp, Family q, int l, int m, double rho, const LameParams& params);

// (Y^p_{l'm'}, S_{D+n}[Y^q_{lm}]) for the copy centred at (n, 0, 0), n != 0.
double per_copy_entry(Family p, int lp, int mp, Family q, int l, int m, int n, double rho, const LameParams& params);
// Same with the source centred at (t, 0, 0) relative to the observation ball, |t| > 2 rho.
double per_copy_entry_shifted(Family p, int lp, int mp, Family q, int l, int m, double t, double rho,
                              const LameParams& params);

cplx entry_single(Family p, int lp, int mp, Family q, int l, int m, double alpha, double rho, const LameParams& params,
                  LatticeSumCache* cache = nullptr);

enum class DimerBlock { B11, B12, B21, B22 };

cplx entry_dimer(DimerBlock block, Family p, int lp, int mp, Family q, int l, int m, double alpha,
                 const DimerGeometry& geom, const LameParams& params, LatticeSumCache* cache = nullptr);

struct AssembledMatrix {
    double alpha = 0.0;
    double rho = 0.0;
    LameParams params;
    int lmax = 0;
    bool dimer = false;
    double d = 0.0;
    BasisMap map;
    Eigen::MatrixXcd M;
    std::string provenance;
};

AssembledMatrix assemble_single(double alpha, double rho, const LameParams& params, int lmax, int threads = 1);
// Block layout [[M11, M21], [M12, M22]]: block row t holds test functions on ball t,
// block column s the densities on ball s.
AssembledMatrix assemble_dimer(double alpha, const DimerGeometry& geom, const LameParams& params, int lmax,
                               int threads = 1);

}  // namespace qpe
