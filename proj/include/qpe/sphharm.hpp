#pragma once

#include "qpe/types.hpp"

#include <vector>

namespace qpe {

// Unit direction, stored both as angles and as a Cartesian unit vector.
struct Direction {
    double theta = 0.0;
    double phi = 0.0;
    Point3 xyz{0.0, 0.0, 1.0};

    static Direction from_angles(double theta, double phi);
    // Normalizes v; v = 0 is rejected. On the polar axis phi is set to 0.
    static Direction from_vector(const Point3& v);
};

inline constexpr int kMaxDegree = 64;

// Unnormalized P_l^m(u), no Condon-Shortley phase.
double assoc_legendre(int l, int m, double u);

// Normalized table pbar[l][m] = sqrt((2l+1)/(4pi) (l-m)!/(l+m)!) P_l^m(u), 0 <= m <= l <= lmax.
std::vector<std::vector<double>> legendre_table(int lmax, double u);

cplx ylm_complex(int l, int m, const Direction& dir);
double ylm_real(int l, int m, const Direction& dir);

// All complex harmonics up to lmax, index l*l + l + m.
std::vector<cplx> ylm_complex_all(int lmax, const Direction& dir);
inline int ylm_index(int l, int m) { return l * l + l + m; }

cplx solid_regular(int l, int m, const Point3& r);
cplx solid_irregular(int l, int m, const Point3& r);

// Y_l^m(pi/2, 0) or Y_l^m(pi/2, pi); always real.
double ylm_equator(int l, int m, bool at_pi);

// Weights of a real harmonic in the complex basis:
// Y_lm(real) = sum_k w_k Y_l^{m_k}.
struct ComplexPart {
    cplx w;
    int m;
};
int real_to_complex(int m, ComplexPart out[2]);

}  // namespace qpe
