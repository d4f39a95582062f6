#pragma once

#include "qpe/sphharm.hpp"
#include "qpe/types.hpp"
#include "qpe/vsh.hpp"

namespace qpe {

struct LameParams {
    double lambda = 1.0;
    double mu = 1.0;
    bool sign_flip = false;  // potentials for the operator with reversed sign

    void validate() const;
    double sign() const { return sign_flip ? -1.0 : 1.0; }
};

// Kelvin fundamental solution of mu Lap u + (lambda + mu) grad div u, 1/(8 pi mu (lambda + 2 mu) |x|) scaling.
Eigen::Matrix3d kelvin_tensor(const Point3& x, const LameParams& p);

// a_ij of the exterior single-layer matrix at order l (sign convention applied).
struct OutCoeffs {
    double a11 = 0, a12 = 0, a22 = 0, a33 = 0;
};
OutCoeffs out_coeffs(int l, const LameParams& p);

// Exterior matrix evaluated at |x|/rho = x_norm > 1; rows/cols ordered V, W, X.
struct OutMatrix {
    int l = 0;
    double x_norm = 1.0;
    OutCoeffs a;
    Eigen::Matrix3d value = Eigen::Matrix3d::Zero();
    double column_entry(Family row, Family col) const;
};
OutMatrix out_matrix(int l, double x_norm, const LameParams& p);

// On-surface action of S_D on the basis at order l: S_D[Y^q_lm](rho x^) = rho tau^q Y^q_lm(x^).
struct DiagMatrix {
    int l = 0;
    double tau1 = 0, tau2 = 0, tau3 = 0;
    double tau(Family f) const;
};
DiagMatrix diag_matrix(int l, const LameParams& p);

// S over the sphere of radius rho centred at c, applied to Y^q_lm((y - c)/rho), evaluated at x
// with |x - c| > rho. Closed form from the exterior matrix.
Point3 apply_S_at(const Point3& x, const Point3& c, Family q, int l, int m, double rho, const LameParams& p);

// S_{D+n} on the basis, evaluated at x = rho x^ on the boundary of D = B_rho(0).
Point3 apply_S_shifted(int n, Family q, int l, int m, const Direction& xhat, double rho, const LameParams& p);

// S_D on the basis, evaluated on its own boundary.
Point3 apply_S_self(Family q, int l, int m, const Direction& xhat, double rho, const LameParams& p);

}  // namespace qpe
