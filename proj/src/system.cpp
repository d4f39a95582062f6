#include "qpe/system.hpp"

#include "qpe/errors.hpp"
#include "qpe/kelvin.hpp"
#include "qpe/vsh.hpp"

#include <cmath>

namespace qpe {

RhsVector project_rhs(const SphereField& phi, const SphQuadrature& quad, const BasisMap& map)
{
    if (quad.degree < 2 * map.lmax() + 2)
        throw QuadratureDegreeError("project_rhs: quadrature degree below 2 lmax + 2");
    int n = map.size();
    std::vector<CompensatedSum<cplx>> acc(n);
    for (std::size_t k = 0; k < quad.nodes.size(); ++k) {
        auto& u = quad.nodes[k];
        Vec3c v = phi(u).conjugate();
        auto tab = vsh_real_all(map.lmax(), u);
        for (int i = 0; i < n; ++i) {
            auto& mi = map.at(i);
            const Point3& y = tab.get(mi.k, mi.l, mi.m);
            acc[i].add(quad.weights[k] * (y[0] * v[0] + y[1] * v[1] + y[2] * v[2]));
        }
    }
    RhsVector b(n);
    for (int i = 0; i < n; ++i)
        b[i] = acc[i].value();
    return b;
}

RhsVector project_rhs(const DensityCoeffs& phi, const BasisMap& map)
{
    if (phi.F.size() != phi.map.size())
        throw DomainError("project_rhs: coefficient count does not match the basis");
    RhsVector b = RhsVector::Zero(map.size());
    for (int i = 0; i < map.size(); ++i) {
        auto& mi = map.at(i);
        if (mi.l > phi.map.lmax())
            continue;
        b[i] = std::conj(phi.F[phi.map.index(mi.l, mi.m, mi.k)]) * vsh_norm(mi.k, mi.l);
    }
    return b;
}

namespace {

SolveReport lu_solve(const Eigen::MatrixXcd& M, const RhsVector& b)
{
    if (M.rows() != M.cols() || M.rows() != b.size())
        throw DomainError("solve: dimension mismatch");
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
    SolveReport r;
    r.rcond = lu.rcond();
    if (!(r.rcond > 0.0) || !std::isfinite(r.rcond) || r.rcond < 1e-300)
        throw SingularMatrixError("solve: matrix is singular", r.rcond);
    r.ill_conditioned = r.rcond < 1e-12;
    Eigen::VectorXcd x = lu.solve(b);
    double nb = b.norm();
    r.residual = nb > 0.0 ? (M * x - b).norm() / nb : (M * x).norm();
    r.F.F = x.conjugate();
    return r;
}

}  // namespace

SolveReport solve_single(const AssembledMatrix& M, const RhsVector& b)
{
    auto r = lu_solve(M.M, b);
    r.F.map = M.map;
    return r;
}

SolveReport solve_dimer(const AssembledMatrix& M, const RhsVector& b1, const RhsVector& b2)
{
    if (!M.dimer)
        throw DomainError("solve_dimer: matrix is not a dimer assembly");
    int n = M.map.size();
    if (b1.size() != n || b2.size() != n)
        throw DomainError("solve_dimer: dimension mismatch");
    RhsVector b(2 * n);
    b << b1, b2;
    auto r = lu_solve(M.M, b);
    Eigen::VectorXcd all = r.F.F;
    r.F = DensityCoeffs{M.map, all.head(n)};
    r.F2 = DensityCoeffs{M.map, all.tail(n)};
    return r;
}

SphereField builtin_field(const std::string& name, double alpha, double rho, const LameParams& params)
{
    if (name == "plane-wave")
        return [alpha, rho](const Direction& u) {
            return Vec3c(0.0, 0.0, std::exp(kI * (alpha * rho * u.xyz[0])));
        };
    if (name == "point-force") {
        if (!(rho < 0.38))
            throw GeometryError("point-force field: source at height 0.4 must lie outside the ball");
        params.validate();
        return [rho, params](const Direction& u) {
            Eigen::Matrix3d G = kelvin_tensor(rho * u.xyz - Point3(0.0, 0.0, 0.4), params);
            return Vec3c(G.col(2).cast<cplx>());
        };
    }
    if (name == "uniform")
        return [](const Direction&) { return Vec3c(1.0, 0.5, -0.25); };
    throw DomainError("unknown builtin field '" + name + "'");
}

}  // namespace qpe
