#include "qpe/oracle.hpp"

#include "qpe/errors.hpp"
#include "qpe/vsh.hpp"

#include <array>
#include <cmath>

namespace qpe {

void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w)
{
    if (n < 1)
        throw DomainError("gauss_legendre: n < 1");
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1)
                p0 = 1.0, p1 = z;
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16)
                break;
        }
        {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (z * p1 - p0) / (z * z - 1.0);
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    if (n == 1) {
        x[0] = 0.0;
        w[0] = 2.0;
    }
}

SphQuadrature build_quadrature(int degree)
{
    if (degree < 0)
        throw QuadratureDegreeError("build_quadrature: negative degree");
    SphQuadrature q;
    q.degree = degree;
    int nt = (degree + 2) / 2, np = degree + 1;
    std::vector<double> x, w;
    gauss_legendre(nt, x, w);
    double dphi = 2.0 * kPi / np;
    for (int i = 0; i < nt; ++i)
        for (int j = 0; j < np; ++j) {
            q.nodes.push_back(Direction::from_angles(std::acos(x[i]), j * dphi));
            q.weights.push_back(w[i] * dphi);
        }
    return q;
}

cplx inner_product_S2(const SphereField& f, const SphereField& g, const SphQuadrature& quad)
{
    CompensatedSum<cplx> s;
    for (std::size_t i = 0; i < quad.nodes.size(); ++i) {
        Vec3c a = f(quad.nodes[i]), b = g(quad.nodes[i]);
        s.add(quad.weights[i] * (a[0] * std::conj(b[0]) + a[1] * std::conj(b[1]) + a[2] * std::conj(b[2])));
    }
    return s.value();
}

Vec3c DensityCoeffs::eval(const Direction& dir) const
{
    if (F.size() != map.size())
        throw DomainError("DensityCoeffs: coefficient count does not match the basis");
    auto tab = vsh_real_all(map.lmax(), dir);
    Vec3c v = Vec3c::Zero();
    for (int i = 0; i < map.size(); ++i) {
        auto& mi = map.at(i);
        v += F[i] * tab.get(mi.k, mi.l, mi.m).cast<cplx>();
    }
    return v;
}

std::vector<Vec3c> sample_density(const DensityCoeffs& f, const SphQuadrature& quad)
{
    std::vector<Vec3c> s;
    s.reserve(quad.nodes.size());
    for (auto& u : quad.nodes)
        s.push_back(f.eval(u));
    return s;
}

Vec3c brute_potential(const Point3& x, const std::vector<Vec3c>& samples, const Point3& c, double rho,
                      const LameParams& params, const SphQuadrature& quad)
{
    if (samples.size() != quad.nodes.size())
        throw DomainError("brute_potential: sample count does not match the quadrature");
    double r = (x - c).norm();
    if (std::abs(r - rho) < 0.05 * rho * (1.0 - 1e-9))
        throw DomainError("brute_potential: evaluation point too close to the sphere");
    Vec3c out = Vec3c::Zero();
    for (std::size_t i = 0; i < quad.nodes.size(); ++i) {
        Eigen::Matrix3d G = kelvin_tensor(x - (c + rho * quad.nodes[i].xyz), params);
        out += (quad.weights[i] * rho * rho) * (G.cast<cplx>() * samples[i]);
    }
    return out;
}

Vec3c brute_potential(const Point3& x, const DensityCoeffs& f, const Point3& c, double rho, const LameParams& params,
                      const SphQuadrature& quad)
{
    return brute_potential(x, sample_density(f, quad), c, rho, params, quad);
}

std::vector<Vec3c> brute_periodic_field(const DensityCoeffs& f, double alpha, double rho, const LameParams& params,
                                        const std::vector<Direction>& obs, int n_cut, const SphQuadrature& source_quad,
                                        int levels)
{
    if (n_cut < levels + 1)
        throw DomainError("brute_periodic_field: n_cut too small for the tail transform");
    auto samples = sample_density(f, source_quad);
    std::vector<Vec3c> out;
    for (auto& u : obs) {
        Point3 x = rho * u.xyz;
        Vec3c total = Vec3c::Zero();
        for (int sg : {1, -1}) {
            cplx z = std::polar(1.0, sg * alpha);
            std::array<std::vector<cplx>, 3> tails;
            std::array<CompensatedSum<cplx>, 3> acc;
            for (int n = 1; n <= n_cut; ++n) {
                Vec3c v = std::polar(1.0, sg * n * alpha) *
                          brute_potential(x, samples, Point3(sg * n, 0.0, 0.0), rho, params, source_quad);
                for (int i = 0; i < 3; ++i) {
                    acc[i].add(v[i]);
                    if (n >= n_cut - levels)
                        tails[i].push_back(acc[i].value());
                }
            }
            for (int i = 0; i < 3; ++i)
                total[i] += known_ratio_limit(tails[i], z);
        }
        out.push_back(total);
    }
    return out;
}

double quadrature_per_copy(Family p, int lp, int mp, Family q, int l, int m, double t, double rho,
                           const LameParams& params, const SphQuadrature& quad)
{
    CompensatedSum<double> s;
    Point3 c(t, 0.0, 0.0);
    for (std::size_t i = 0; i < quad.nodes.size(); ++i) {
        auto& u = quad.nodes[i];
        Point3 v = apply_S_at(rho * u.xyz, c, q, l, m, rho, params);
        s.add(quad.weights[i] * vsh_real(p, lp, mp, u).dot(v));
    }
    return s.value();
}

BruteLatticeSum brute_lattice_sum(const std::function<double(double)>& per_copy, const std::vector<double>& alphas,
                                  int n_cut, double shift, bool include_zero)
{
    BruteLatticeSum out;
    out.alphas = alphas;
    std::vector<CompensatedSum<cplx>> acc(alphas.size());
    double c0 = include_zero ? per_copy(shift) : 0.0;
    out.partial.assign(alphas.size(), std::vector<cplx>(n_cut + 1, c0));
    for (auto& a : acc)
        a.add(c0);
    for (int n = 1; n <= n_cut; ++n) {
        double cp = per_copy(n + shift), cm = per_copy(-n + shift);
        for (std::size_t a = 0; a < alphas.size(); ++a) {
            cplx e = std::polar(1.0, -n * alphas[a]);
            acc[a].add(cp * e);
            acc[a].add(cm * std::conj(e));
            out.partial[a][n] = acc[a].value();
        }
    }
    out.tail_bound_factor = std::abs(per_copy(n_cut + 1 + shift)) + std::abs(per_copy(-n_cut - 1 + shift));
    return out;
}

PerCopyEvaluator::PerCopyEvaluator(Family p, int lp, int mp, Family q, int l, int m, double rho,
                                   const LameParams& params)
{
    // At b = |t| u with u = -sign(t) e_x: H scales as |t|^{-L-1}, b_{-q} as |t|, |b|^2 as t^2.
    const Point3 um(-1.0, 0.0, 0.0), up(1.0, 0.0, 0.0);
    auto bm = rhat_dot_a_expand(um), bp = rhat_dot_a_expand(up);
    for (auto& e : entry_terms(p, lp, mp, q, l, m, rho, params)) {
        int k = e.kind == SeriesKind::H ? 0 : e.kind == SeriesKind::A ? 1 : 2;
        int pw = e.l + e.lam + 1 - k;
        cplx hm = coeff_H(e.l, e.lam, e.m, e.mu, um), hp = coeff_H(e.l, e.lam, e.m, e.mu, up);
        if (e.kind == SeriesKind::A) {
            hm *= bm[e.q + 1];
            hp *= bp[e.q + 1];
        }
        std::size_t i = 0;
        while (i < powers_.size() && powers_[i] != pw)
            ++i;
        if (i == powers_.size()) {
            powers_.push_back(pw);
            pos_.push_back(0.0);
            neg_.push_back(0.0);
        }
        pos_[i] += e.coef * hm;
        neg_[i] += e.coef * hp;
    }
}

double PerCopyEvaluator::operator()(double t) const
{
    const auto& c = t > 0 ? pos_ : neg_;
    double at = std::abs(t);
    cplx s = 0.0;
    for (std::size_t i = 0; i < powers_.size(); ++i)
        s += c[i] * std::pow(at, -powers_[i]);
    return s.real();
}

BruteLatticeSum brute_lattice_entry(Family p, int lp, int mp, Family q, int l, int m, const std::vector<double>& alphas,
                                    double rho, const LameParams& params, int n_cut)
{
    PerCopyEvaluator ev(p, lp, mp, q, l, m, rho, params);
    return brute_lattice_sum([&](double t) { return ev(t); }, alphas, n_cut);
}

BruteLatticeSum brute_dimer_entry(DimerBlock block, Family p, int lp, int mp, Family q, int l, int m,
                                  const std::vector<double>& alphas, const DimerGeometry& geom,
                                  const LameParams& params, int n_cut)
{
    if (block != DimerBlock::B21 && block != DimerBlock::B12)
        throw DomainError("brute_dimer_entry: only the cross blocks are lattice-shifted");
    geom.validate();
    PerCopyEvaluator ev(p, lp, mp, q, l, m, geom.rho, params);
    double shift = block == DimerBlock::B21 ? 2.0 * geom.d : -2.0 * geom.d;
    return brute_lattice_sum([&](double t) { return ev(t); }, alphas, n_cut, shift, true);
}

cplx known_ratio_limit(std::vector<cplx> s, cplx z)
{
    if (s.empty())
        throw DomainError("known_ratio_limit: no partial sums");
    if (std::abs(1.0 - z) < 1e-12)
        throw QuasiMomentumSingular("known_ratio_limit: ratio 1");
    for (std::size_t lev = 1; lev < s.size(); ++lev)
        for (std::size_t j = 0; j + lev < s.size(); ++j)
            s[j] = (s[j + 1] - z * s[j]) / (1.0 - z);
    return s[0];
}

Vec3c finite_diff_gradient(const std::function<cplx(const Point3&)>& f, const Point3& x, double h)
{
    Vec3c g;
    for (int i = 0; i < 3; ++i) {
        Point3 e = Point3::Zero();
        e[i] = h;
        g[i] = (f(x + e) - f(x - e)) / (2.0 * h);
    }
    return g;
}

}  // namespace qpe
