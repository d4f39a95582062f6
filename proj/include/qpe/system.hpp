#pragma once

#include "qpe/assembly.hpp"
#include "qpe/oracle.hpp"

#include <string>

namespace qpe {

using RhsVector = Eigen::VectorXcd;

// b_i = (Y_i, phi) = int Y_i . conj(phi) by quadrature. Needs quad.degree >= 2 lmax + 2.
RhsVector project_rhs(const SphereField& phi, const SphQuadrature& quad, const BasisMap& map);
// phi given as an expansion: b_i = conj(c_i) norm_i; indices beyond phi.map are zero.
RhsVector project_rhs(const DensityCoeffs& phi, const BasisMap& map);

struct SolveReport {
    DensityCoeffs F;
    DensityCoeffs F2;  // second ball (dimer only)
    double residual = 0.0;
    double rcond = 0.0;
    bool ill_conditioned = false;
};

// M conj(F) = b; returns F = conj(M^{-1} b). Residual is |M conj(F) - b| / |b| (0 when b = 0).
SolveReport solve_single(const AssembledMatrix& M, const RhsVector& b);
// Stacked system on [[M11, M21], [M12, M22]] with unknowns (conj F1, conj F2).
SolveReport solve_dimer(const AssembledMatrix& M, const RhsVector& b1, const RhsVector& b2);

// Named boundary fields on the ball of radius rho, as functions of the unit direction:
//   plane-wave   e^{i alpha x_1} e_z
//   point-force  G(x - x0) e_z with x0 = (0, 0, 0.4), outside the ball for rho < 0.38
//   uniform      (1, 0.5, -0.25)
SphereField builtin_field(const std::string& name, double alpha, double rho, const LameParams& params);

}  // namespace qpe
