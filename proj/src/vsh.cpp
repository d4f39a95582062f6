#include "qpe/vsh.hpp"

#include "qpe/coupling.hpp"
#include "qpe/errors.hpp"

#include <cmath>
#include <string>

namespace qpe {

Family family_from_index(int k)
{
    if (k < 1 || k > 3)
        throw ForbiddenIndex("family index must be 1, 2 or 3");
    return static_cast<Family>(k);
}

char family_name(Family f)
{
    switch (f) {
    case Family::V: return 'V';
    case Family::W: return 'W';
    default: return 'X';
    }
}

void check_vsh_index(Family f, int l, int m)
{
    if (l < 0 || std::abs(m) > l || l > kMaxDegree)
        throw DomainError("vector harmonic index out of range");
    if (l == 0 && f != Family::V)
        throw ForbiddenIndex(std::string("forbidden index: ") + family_name(f) + "_0^0 vanishes identically");
}

double vsh_norm(Family f, int l)
{
    switch (f) {
    case Family::V: return (l + 1.0) * (2.0 * l + 1.0);
    case Family::W: return l * (2.0 * l + 1.0);
    default: return l * (l + 1.0);
    }
}

Vec3c chi(int m)
{
    const double h = 1.0 / std::sqrt(2.0);
    switch (m) {
    case 1: return Vec3c(-h, -kI * h, 0.0);
    case 0: return Vec3c(0.0, 0.0, 1.0);
    case -1: return Vec3c(h, -kI * h, 0.0);
    default: throw DomainError("chi: m must be -1, 0 or 1");
    }
}

// W_l^m = sqrt(l(2l+1)) sum_m1 <l-1, m-m1; 1, m1 | l, m> Y_{l-1}^{m-m1} chi_m1,
// i.e. the gradient of r^l Y_l^m restricted to the unit sphere.
static Vec3c w_from_lower(int l, int m, const std::vector<cplx>& Y)
{
    Vec3c w = Vec3c::Zero();
    double s = std::sqrt(l * (2.0 * l + 1.0));
    for (int m1 = -1; m1 <= 1; ++m1) {
        int mm = m - m1;
        if (std::abs(mm) > l - 1)
            continue;
        w += (s * cg(l - 1, mm, 1, m1, l, m)) * Y[ylm_index(l - 1, mm)] * chi(m1);
    }
    return w;
}

VshTable vsh_complex_all(int lmax, const Direction& dir)
{
    VshTable t;
    t.lmax = lmax;
    t.Y = ylm_complex_all(lmax, dir);
    std::size_t n = t.Y.size();
    t.V.assign(n, Vec3c::Zero());
    t.W.assign(n, Vec3c::Zero());
    t.X.assign(n, Vec3c::Zero());
    Vec3c rh = dir.xyz.cast<cplx>();
    for (int l = 0; l <= lmax; ++l) {
        for (int m = -l; m <= l; ++m) {
            int i = ylm_index(l, m);
            Vec3c w = l > 0 ? w_from_lower(l, m, t.Y) : Vec3c::Zero();
            t.W[i] = w;
            t.V[i] = w - (2.0 * l + 1.0) * t.Y[i] * rh;
            t.X[i] = cross(rh, w);
        }
    }
    return t;
}

const Vec3c& VshTable::get(Family f, int l, int m) const
{
    int i = ylm_index(l, m);
    switch (f) {
    case Family::V: return V[i];
    case Family::W: return W[i];
    default: return X[i];
    }
}

const Point3& VshRealTable::get(Family f, int l, int m) const
{
    int i = ylm_index(l, m);
    switch (f) {
    case Family::V: return V[i];
    case Family::W: return W[i];
    default: return X[i];
    }
}

Vec3c vsh_complex(Family f, int l, int m, const Direction& dir)
{
    check_vsh_index(f, l, m);
    auto t = vsh_complex_all(l, dir);
    return t.get(f, l, m);
}

VshRealTable vsh_real_all(int lmax, const Direction& dir)
{
    auto c = vsh_complex_all(lmax, dir);
    VshRealTable r;
    r.lmax = lmax;
    std::size_t n = c.Y.size();
    r.Y.assign(n, 0.0);
    r.V.assign(n, Point3::Zero());
    r.W.assign(n, Point3::Zero());
    r.X.assign(n, Point3::Zero());
    for (int l = 0; l <= lmax; ++l) {
        for (int m = -l; m <= l; ++m) {
            ComplexPart parts[2];
            int np = real_to_complex(m, parts);
            cplx y = 0.0;
            Vec3c v = Vec3c::Zero(), w = Vec3c::Zero(), x = Vec3c::Zero();
            for (int k = 0; k < np; ++k) {
                int j = ylm_index(l, parts[k].m);
                y += parts[k].w * c.Y[j];
                v += parts[k].w * c.V[j];
                w += parts[k].w * c.W[j];
                x += parts[k].w * c.X[j];
            }
            int i = ylm_index(l, m);
            r.Y[i] = y.real();
            r.V[i] = v.real();
            r.W[i] = w.real();
            r.X[i] = x.real();
        }
    }
    return r;
}

Point3 vsh_real(Family f, int l, int m, const Direction& dir)
{
    check_vsh_index(f, l, m);
    ComplexPart parts[2];
    int np = real_to_complex(m, parts);
    auto c = vsh_complex_all(l, dir);
    Vec3c v = Vec3c::Zero();
    for (int k = 0; k < np; ++k)
        v += parts[k].w * c.get(f, l, parts[k].m);
    return v.real();
}

VecYConversion vector_Y_conversion(int j, int l)
{
    if (l < 0 || j < 0 || std::abs(j - l) > 1)
        throw DomainError("vector_Y: need |j - l| <= 1");
    if (j == l - 1)
        return {Family::V, j, 1.0 / std::sqrt(l * (2.0 * l - 1.0))};
    if (j == l) {
        if (l == 0)
            throw ForbiddenIndex("vector_Y: Y_{0,0,0} does not exist");
        return {Family::X, j, -kI / std::sqrt(l * (l + 1.0))};
    }
    return {Family::W, j, 1.0 / std::sqrt((l + 1.0) * (2.0 * l + 3.0))};
}

Vec3c vector_Y(int j, int l, int m, const Direction& dir)
{
    auto conv = vector_Y_conversion(j, l);
    if (std::abs(m) > j)
        throw DomainError("vector_Y: need |m| <= j");
    return conv.factor * vsh_complex(conv.family, conv.degree, m, dir);
}

SphericalCross cross_spherical(int m, int n)
{
    if (std::abs(m) > 1 || std::abs(n) > 1)
        throw DomainError("cross_spherical: indices must be in {-1, 0, 1}");
    int s = (m > n) - (m < n);
    if (s == 0 || std::abs(m + n) > 1)
        return {0.0, 0};
    return {kI * double(s), m + n};
}

std::array<cplx, 3> rhat_dot_a_expand(const Point3& a)
{
    std::array<cplx, 3> out{};
    Vec3c ac = a.cast<cplx>();
    for (int q = -1; q <= 1; ++q)
        out[q + 1] = ac.dot(chi(-q));  // ac is real, so dot() is bilinear here
    return out;
}

}  // namespace qpe
