#include "qpe/kelvin.hpp"

#include "qpe/errors.hpp"

#include <cmath>

namespace qpe {

void LameParams::validate() const
{
    if (!(mu > 0.0))
        throw DomainError("Lame parameters: mu must be positive");
    if (!(lambda + 2.0 * mu > 0.0))
        throw DomainError("Lame parameters: lambda + 2 mu must be positive");
}

Eigen::Matrix3d kelvin_tensor(const Point3& x, const LameParams& p)
{
    double r = x.norm();
    if (r == 0.0)
        throw SingularityError("kelvin_tensor at x = 0");
    double l2m = p.lambda + 2.0 * p.mu;
    double c = p.sign() / (8.0 * kPi * p.mu * r);
    Eigen::Matrix3d g = ((p.lambda + 3.0 * p.mu) / l2m) * Eigen::Matrix3d::Identity() +
                        ((p.lambda + p.mu) / l2m) * (x * x.transpose()) / (r * r);
    return c * g;
}

OutCoeffs out_coeffs(int l, const LameParams& p)
{
    p.validate();
    if (l < 0)
        throw DomainError("out_coeffs: l < 0");
    const double mu = p.mu, la = p.lambda, s = p.sign();
    const double den = mu * (2.0 * mu + la);
    OutCoeffs a;
    a.a11 = s * ((3.0 * l + 1.0) * mu + l * la) / ((2.0 * l + 3.0) * (2.0 * l + 1.0) * den);
    a.a12 = s * l * (mu + la) / (2.0 * (2.0 * l + 1.0) * den);
    a.a22 = l >= 1 ? s * ((3.0 * l + 2.0) * mu + (l + 1.0) * la) / ((2.0 * l - 1.0) * (2.0 * l + 1.0) * den) : 0.0;
    a.a33 = l >= 1 ? s / ((2.0 * l + 1.0) * mu) : 0.0;
    return a;
}

double OutMatrix::column_entry(Family row, Family col) const
{
    return value(family_index(row) - 1, family_index(col) - 1);
}

OutMatrix out_matrix(int l, double x_norm, const LameParams& p)
{
    if (!(x_norm > 1.0))
        throw DomainError("out_matrix: need |x|/rho > 1");
    OutMatrix o;
    o.l = l;
    o.x_norm = x_norm;
    o.a = out_coeffs(l, p);
    double t2 = std::pow(x_norm, -l - 2), t0 = std::pow(x_norm, -l), t1 = std::pow(x_norm, -l - 1);
    o.value(0, 0) = o.a.a11 * t2;
    o.value(0, 1) = o.a.a12 * (t2 - t0);
    o.value(1, 1) = o.a.a22 * t0;
    o.value(2, 2) = o.a.a33 * t1;
    return o;
}

double DiagMatrix::tau(Family f) const
{
    if (l == 0 && f != Family::V)
        throw ForbiddenIndex("diag_matrix: tau for W/X at l = 0 is not defined");
    switch (f) {
    case Family::V: return tau1;
    case Family::W: return tau2;
    default: return tau3;
    }
}

DiagMatrix diag_matrix(int l, const LameParams& p)
{
    auto a = out_coeffs(l, p);
    return {l, a.a11, a.a22, a.a33};
}

Point3 apply_S_at(const Point3& x, const Point3& c, Family q, int l, int m, double rho, const LameParams& p)
{
    check_vsh_index(q, l, m);
    Point3 y = x - c;
    double X = y.norm() / rho;
    auto om = out_matrix(l, X, p);
    auto dir = Direction::from_vector(y);
    Point3 out = Point3::Zero();
    for (Family j : {Family::V, Family::W, Family::X}) {
        double e = om.column_entry(j, q);
        if (e != 0.0)
            out += e * vsh_real(j, l, m, dir);
    }
    return rho * out;
}

Point3 apply_S_shifted(int n, Family q, int l, int m, const Direction& xhat, double rho, const LameParams& p)
{
    if (n == 0)
        throw DomainError("apply_S_shifted: n = 0 is the diagonal term");
    return apply_S_at(rho * xhat.xyz, Point3(double(n), 0.0, 0.0), q, l, m, rho, p);
}

Point3 apply_S_self(Family q, int l, int m, const Direction& xhat, double rho, const LameParams& p)
{
    check_vsh_index(q, l, m);
    return rho * diag_matrix(l, p).tau(q) * vsh_real(q, l, m, xhat);
}

}  // namespace qpe
