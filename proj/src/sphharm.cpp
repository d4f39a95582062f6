#include "qpe/sphharm.hpp"

#include "qpe/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qpe {

Direction Direction::from_angles(double theta, double phi)
{
    Direction d;
    d.theta = theta;
    d.phi = phi;
    double s = std::sin(theta);
    d.xyz = Point3(s * std::cos(phi), s * std::sin(phi), std::cos(theta));
    return d;
}

Direction Direction::from_vector(const Point3& v)
{
    double r = v.norm();
    if (!(r > 0.0))
        throw SingularityError("direction of the zero vector");
    Direction d;
    d.xyz = v / r;
    double rho = std::hypot(d.xyz.x(), d.xyz.y());
    d.theta = std::atan2(rho, d.xyz.z());
    d.phi = rho > 0.0 ? std::atan2(d.xyz.y(), d.xyz.x()) : 0.0;
    if (d.phi < 0.0)
        d.phi += 2.0 * kPi;
    return d;
}

std::vector<std::vector<double>> legendre_table(int lmax, double u)
{
    if (lmax < 0 || lmax > kMaxDegree)
        throw DomainError("legendre_table: degree out of range");
    if (std::abs(u) > 1.0 + 1e-15)
        throw DomainError("legendre_table: |u| > 1");
    u = std::clamp(u, -1.0, 1.0);
    double s = std::sqrt(std::max(0.0, 1.0 - u * u));

    std::vector<std::vector<double>> p(lmax + 1);
    for (int l = 0; l <= lmax; ++l)
        p[l].assign(l + 1, 0.0);

    double pmm = 1.0 / std::sqrt(4.0 * kPi);
    for (int m = 0; m <= lmax; ++m) {
        if (m > 0)
            pmm *= std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * s;
        p[m][m] = pmm;
        if (m + 1 <= lmax)
            p[m + 1][m] = std::sqrt(2.0 * m + 3.0) * u * pmm;
        for (int l = m + 2; l <= lmax; ++l) {
            double a = std::sqrt((4.0 * l * l - 1.0) / (double(l) * l - double(m) * m));
            double b = std::sqrt((double(l - 1) * (l - 1) - double(m) * m) / (4.0 * (l - 1) * (l - 1) - 1.0));
            p[l][m] = a * (u * p[l - 1][m] - b * p[l - 2][m]);
        }
    }
    return p;
}

static double norm_factor(int l, int m)
{
    return std::sqrt((2.0 * l + 1.0) / (4.0 * kPi) *
                     std::exp(std::lgamma(l - m + 1.0) - std::lgamma(l + m + 1.0)));
}

double assoc_legendre(int l, int m, double u)
{
    if (l < 0 || m < 0 || m > l)
        throw DomainError("assoc_legendre: need 0 <= m <= l");
    if (std::abs(u) > 1.0)
        throw DomainError("assoc_legendre: |u| > 1");
    auto p = legendre_table(l, u);
    return p[l][m] / norm_factor(l, m);
}

static void check_lm(int l, int m, const char* who)
{
    if (l < 0 || std::abs(m) > l || l > kMaxDegree)
        throw DomainError(std::string(who) + ": need |m| <= l <= 64");
}

cplx ylm_complex(int l, int m, const Direction& dir)
{
    check_lm(l, m, "ylm_complex");
    auto p = legendre_table(l, std::cos(dir.theta));
    int am = std::abs(m);
    double v = p[l][am];
    if (am % 2)
        v = -v;
    cplx y = v * std::exp(kI * double(am) * dir.phi);
    if (m < 0)
        y = (am % 2 ? -1.0 : 1.0) * std::conj(y);
    return y;
}

std::vector<cplx> ylm_complex_all(int lmax, const Direction& dir)
{
    auto p = legendre_table(lmax, std::cos(dir.theta));
    std::vector<cplx> out((lmax + 1) * (lmax + 1));
    for (int m = 0; m <= lmax; ++m) {
        cplx e = std::exp(kI * double(m) * dir.phi);
        double sgn = m % 2 ? -1.0 : 1.0;
        for (int l = m; l <= lmax; ++l) {
            cplx y = sgn * p[l][m] * e;
            out[ylm_index(l, m)] = y;
            if (m > 0)
                out[ylm_index(l, -m)] = sgn * std::conj(y);
        }
    }
    return out;
}

double ylm_real(int l, int m, const Direction& dir)
{
    check_lm(l, m, "ylm_real");
    auto p = legendre_table(l, std::cos(dir.theta));
    if (m == 0)
        return p[l][0];
    if (m > 0)
        return std::sqrt(2.0) * p[l][m] * std::cos(m * dir.phi);
    return std::sqrt(2.0) * p[l][-m] * std::sin(-m * dir.phi);
}

cplx solid_regular(int l, int m, const Point3& r)
{
    check_lm(l, m, "solid_regular");
    double rn = r.norm();
    if (rn == 0.0)
        return l == 0 ? cplx(1.0) : cplx(0.0);
    return std::sqrt(4.0 * kPi / (2 * l + 1)) * std::pow(rn, l) * ylm_complex(l, m, Direction::from_vector(r));
}

cplx solid_irregular(int l, int m, const Point3& r)
{
    check_lm(l, m, "solid_irregular");
    double rn = r.norm();
    if (rn == 0.0)
        throw SingularityError("solid_irregular at r = 0");
    return std::sqrt(4.0 * kPi / (2 * l + 1)) * ylm_complex(l, m, Direction::from_vector(r)) / std::pow(rn, l + 1);
}

double ylm_equator(int l, int m, bool at_pi)
{
    check_lm(l, m, "ylm_equator");
    if ((l + m) % 2)
        return 0.0;
    auto p = legendre_table(l, 0.0);
    int am = std::abs(m);
    // Y_l^m(pi/2, 0) = (-1)^m pbar_l^|m| for m >= 0; Y_l^{-m} = (-1)^m conj(Y_l^m), real here.
    double v = (am % 2 ? -1.0 : 1.0) * p[l][am];
    if (m < 0 && am % 2)
        v = -v;
    if (at_pi && am % 2)
        v = -v;
    return v;
}

int real_to_complex(int m, ComplexPart out[2])
{
    const double h = 1.0 / std::sqrt(2.0);
    if (m == 0) {
        out[0] = {1.0, 0};
        return 1;
    }
    double sg = (std::abs(m) % 2) ? -1.0 : 1.0;
    if (m > 0) {
        out[0] = {h, -m};
        out[1] = {sg * h, m};
    } else {
        out[0] = {kI * h, m};
        out[1] = {-kI * sg * h, -m};
    }
    return 2;
}

}  // namespace qpe
