#pragma once

#include <Eigen/Dense>
#include <complex>

namespace qpe {

using cplx = std::complex<double>;
using Point3 = Eigen::Vector3d;
using Vec3c = Eigen::Vector3cd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr cplx kI{0.0, 1.0};

// Bilinear cross product. Eigen's cross() conjugates for complex scalars.
inline Vec3c cross(const Vec3c& a, const Vec3c& b)
{
    return Vec3c(a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]);
}

// Neumaier compensated accumulator; works for double and complex<double>.
template <class T>
struct CompensatedSum {
    T sum{};
    T c{};
    void add(T x)
    {
        add_part(sum, c, x);
    }
    T value() const { return sum + c; }

private:
    static void add_scalar(double& s, double& comp, double x)
    {
        double t = s + x;
        if (std::abs(s) >= std::abs(x))
            comp += (s - t) + x;
        else
            comp += (x - t) + s;
        s = t;
    }
    static void add_part(double& s, double& comp, double x) { add_scalar(s, comp, x); }
    static void add_part(cplx& s, cplx& comp, cplx x)
    {
        double sr = s.real(), si = s.imag(), cr = comp.real(), ci = comp.imag();
        add_scalar(sr, cr, x.real());
        add_scalar(si, ci, x.imag());
        s = {sr, si};
        comp = {cr, ci};
    }
};

}  // namespace qpe
