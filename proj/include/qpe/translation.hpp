#pragma once

#include "qpe/types.hpp"
#include "qpe/vsh.hpp"

#include <vector>

namespace qpe {

struct TruncationPolicy {
    int lambda_max = 30;
    double tol = 1e-10;
};

// Boxed translation coefficients. All vanish outside their selection rules.
cplx coeff_A(int l, int lam, int m, int mu, const Point3& a);
cplx coeff_H(int l, int lam, int m, int mu, const Point3& a);
double coeff_K(int lp, int j, int lam, int m1, int mu, int q);
cplx coeff_L(int l, int j, int lam, int m, int mu, int q, int m1, const Point3& a);

// Real prefactor of H: H = coeff_H_prefactor * I_{l+lam}^{m-mu}(a).
double coeff_H_prefactor(int l, int lam, int m, int mu);

cplx translate_solid_regular(int l, int m, const Point3& r, const Point3& a);

struct ScalarSeries {
    cplx value;
    double tail;
    int lambda_used;
};
ScalarSeries translate_solid_irregular(int l, int m, const Point3& r, const Point3& a,
                                       const TruncationPolicy& policy = {});

// Translated vector fields, evaluated at r' = r + a from an expansion about the origin
// of r. Left-hand sides:
//   FieldKind::WRegular  r'^{l-1} W(r'^)   (finite sum)
//   FieldKind::VDecay    r'^{-l-2} V(r'^)
//   FieldKind::VNegL     r'^{-l} V(r'^)
//   FieldKind::WNegL     r'^{-l} W(r'^)
//   FieldKind::YRNegL    r'^{-l} Y(r'^) r'^   (scalar harmonic times radial unit vector)
//   FieldKind::XDecay    r'^{-l-1} X(r'^)
enum class FieldKind { WRegular, VDecay, VNegL, WNegL, YRNegL, XDecay };

// Which lattice series a term feeds: H(b), b_{-q} H(b) or |b|^2 H(b).
enum class SeriesKind { H, A, D };

// coef * r^power * S(b) * F_deg^ord(r^), with S(b) = H_{l,lam}^{m,mu}(b) times
// 1, b_{-q} or |b|^2 according to kind. For WRegular, H is replaced by A_{l,lam}^{m,mu}(b).
struct ExpansionTerm {
    cplx coef;
    int power;
    Family fam;
    int deg;
    int ord;
    SeriesKind kind;
    int lam;
    int mu;
    int q;
};

// Terms of the expansion of a complex field with source index (l, m), restricted to
// lam in [lam_min, lam_max].
std::vector<ExpansionTerm> expand_field(FieldKind kind, int l, int m, int lam_min, int lam_max);

// Value of S(b) for one term's series (H replaced by A for WRegular).
cplx series_factor(FieldKind kind, const ExpansionTerm& t, int l, int m, const Point3& b);

struct VectorSeries {
    Vec3c value;
    double tail;
    int lambda_used;
};

// Complex-harmonic source (l, m).
VectorSeries translate_complex(FieldKind kind, int l, int m, const Point3& r, const Point3& a,
                               const TruncationPolicy& policy = {});
// Real-harmonic source (l, m): combination of the complex ones per the real/complex relation.
VectorSeries translate_real(FieldKind kind, int l, int m, const Point3& r, const Point3& a,
                            const TruncationPolicy& policy = {});

// Direct evaluation of the left-hand side at r + a (real source).
Vec3c field_direct_real(FieldKind kind, int l, int m, const Point3& rprime);
Vec3c field_direct_complex(FieldKind kind, int l, int m, const Point3& rprime);

inline Vec3c translate_W(int l, int m, const Point3& r, const Point3& a)
{
    return translate_real(FieldKind::WRegular, l, m, r, a).value;
}
inline VectorSeries translate_V_decay(int l, int m, const Point3& r, const Point3& a, const TruncationPolicy& p = {})
{
    return translate_real(FieldKind::VDecay, l, m, r, a, p);
}
inline VectorSeries translate_V_neg_l(int l, int m, const Point3& r, const Point3& a, const TruncationPolicy& p = {})
{
    return translate_real(FieldKind::VNegL, l, m, r, a, p);
}
inline VectorSeries translate_W_neg_l(int l, int m, const Point3& r, const Point3& a, const TruncationPolicy& p = {})
{
    return translate_real(FieldKind::WNegL, l, m, r, a, p);
}
inline VectorSeries translate_X(int l, int m, const Point3& r, const Point3& a, const TruncationPolicy& p = {})
{
    return translate_real(FieldKind::XDecay, l, m, r, a, p);
}

}  // namespace qpe
