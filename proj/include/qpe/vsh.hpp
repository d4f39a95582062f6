#pragma once

#include "qpe/sphharm.hpp"
#include "qpe/types.hpp"

#include <array>
#include <vector>

namespace qpe {

enum class Family { V = 1, W = 2, X = 3 };

inline int family_index(Family f) { return static_cast<int>(f); }
Family family_from_index(int k);
char family_name(Family f);

// Throws ForbiddenIndex for (l=0, W|X) and DomainError for |m| > l.
void check_vsh_index(Family f, int l, int m);

// (F_lm, F_lm) over the unit sphere: (l+1)(2l+1), l(2l+1), l(l+1).
double vsh_norm(Family f, int l);

// Spherical basis chi_{1,m}, m in {-1, 0, 1}.
Vec3c chi(int m);

Vec3c vsh_complex(Family f, int l, int m, const Direction& dir);
Point3 vsh_real(Family f, int l, int m, const Direction& dir);

// Every complex harmonic up to lmax at one direction; index ylm_index(l, m).
// Entries for W_0^0 and X_0^0 hold zero vectors.
struct VshTable {
    int lmax = -1;
    std::vector<cplx> Y;
    std::vector<Vec3c> V, W, X;
    const Vec3c& get(Family f, int l, int m) const;
};
VshTable vsh_complex_all(int lmax, const Direction& dir);

// Real counterparts, same indexing.
struct VshRealTable {
    int lmax = -1;
    std::vector<double> Y;
    std::vector<Point3> V, W, X;
    const Point3& get(Family f, int l, int m) const;
};
VshRealTable vsh_real_all(int lmax, const Direction& dir);

// Y_{j,l,m} from the V/X/W conversion identities; |j - l| <= 1.
Vec3c vector_Y(int j, int l, int m, const Direction& dir);

// Family and factor with Y_{j,l,m} = factor * F_j'^m.
struct VecYConversion {
    Family family;
    int degree;
    cplx factor;
};
VecYConversion vector_Y_conversion(int j, int l);

// chi_m x chi_n = coef * chi_{m+n}; coef = 0 when the product vanishes.
struct SphericalCross {
    cplx coef;
    int index;
};
SphericalCross cross_spherical(int m, int n);

// a_{-q} = a . chi_{-q}, returned at position q + 1 for q = -1, 0, 1.
std::array<cplx, 3> rhat_dot_a_expand(const Point3& a);

}  // namespace qpe
