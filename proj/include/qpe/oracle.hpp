#pragma once

#include "qpe/assembly.hpp"
#include "qpe/kelvin.hpp"
#include "qpe/sphharm.hpp"
#include "qpe/types.hpp"

#include <functional>
#include <vector>

namespace qpe {

// Gauss-Legendre in cos(theta) times a uniform azimuthal rule; exact for polynomials of
// total degree <= degree on the sphere.
struct SphQuadrature {
    int degree = 0;
    std::vector<Direction> nodes;
    std::vector<double> weights;
};
SphQuadrature build_quadrature(int degree);

// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w);

using SphereField = std::function<Vec3c(const Direction&)>;

// (f, g) = int f . conj(g) over the unit sphere.
cplx inner_product_S2(const SphereField& f, const SphereField& g, const SphQuadrature& quad);

// Density sum_i F_i Y^{k_i}_{l_i m_i} in real harmonics.
struct DensityCoeffs {
    BasisMap map;
    Eigen::VectorXcd F;
    Vec3c eval(const Direction& dir) const;
};

// S over the ball of radius rho centred at c applied to the density, at x, by quadrature
// against the Kelvin tensor. Needs dist(x, sphere) > 0.05 rho.
Vec3c brute_potential(const Point3& x, const DensityCoeffs& f, const Point3& c, double rho, const LameParams& params,
                      const SphQuadrature& quad);

// Density values at the quadrature nodes, for repeated brute_potential calls.
std::vector<Vec3c> sample_density(const DensityCoeffs& f, const SphQuadrature& quad);
Vec3c brute_potential(const Point3& x, const std::vector<Vec3c>& samples, const Point3& c, double rho,
                      const LameParams& params, const SphQuadrature& quad);

// sum_{0<|n|<=n_cut} e^{i n alpha} S_{D+n}[f](rho u) at each direction u, by brute_potential.
// Each half-line is finished with known_ratio_limit over its last `levels` + 1 partial sums.
std::vector<Vec3c> brute_periodic_field(const DensityCoeffs& f, double alpha, double rho, const LameParams& params,
                                        const std::vector<Direction>& obs, int n_cut, const SphQuadrature& source_quad,
                                        int levels = 6);

// Per-copy entry by quadrature of the closed-form exterior field over the observation sphere.
double quadrature_per_copy(Family p, int lp, int mp, Family q, int l, int m, double t, double rho,
                           const LameParams& params, const SphQuadrature& quad);

// Partial sums P_N = sum_{0<|n|<=N} c(n + shift) e^{-i n alpha} for N = 0..n_cut, for several alpha at once.
// With include_zero the n = 0 copy c(shift) is added to every partial sum.
struct BruteLatticeSum {
    std::vector<double> alphas;
    std::vector<std::vector<cplx>> partial;  // [alpha][N]
    double tail_bound_factor = 0.0;          // |c(n_cut+1+shift)| + |c(-n_cut-1+shift)|
};
BruteLatticeSum brute_lattice_sum(const std::function<double(double)>& per_copy, const std::vector<double>& alphas,
                                  int n_cut, double shift = 0.0, bool include_zero = false);

// Same, with the per-copy values of one matrix entry.
BruteLatticeSum brute_lattice_entry(Family p, int lp, int mp, Family q, int l, int m, const std::vector<double>& alphas,
                                    double rho, const LameParams& params, int n_cut);

// Cross-block entry of the dimer: per-copy values at t = n + 2d (block 21) or n - 2d (block 12), n = 0 included.
BruteLatticeSum brute_dimer_entry(DimerBlock block, Family p, int lp, int mp, Family q, int l, int m,
                                  const std::vector<double>& alphas, const DimerGeometry& geom,
                                  const LameParams& params, int n_cut);

// Per-copy value of one entry as a function of the signed centre offset t, in powers of 1/|t|.
// Evaluates exactly the terms behind per_copy_entry_shifted with the direction factors fixed.
class PerCopyEvaluator {
public:
    PerCopyEvaluator(Family p, int lp, int mp, Family q, int l, int m, double rho, const LameParams& params);
    double operator()(double t) const;

private:
    std::vector<int> powers_;
    std::vector<cplx> pos_, neg_;
};

// Limit of a one-sided partial-sum sequence s_N = sum_{n<=N} z^n c(n), with c smooth and algebraic,
// from the values s_{N0}, ..., s_{N0+levels}. Iterates T_j <- (T_{j+1} - z T_j) / (1 - z).
cplx known_ratio_limit(std::vector<cplx> s, cplx z);

// Central differences for the gradient of a scalar field.
Vec3c finite_diff_gradient(const std::function<cplx(const Point3&)>& f, const Point3& x, double h);

}  // namespace qpe
