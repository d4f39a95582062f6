#include "qpe/assembly.hpp"

#include "qpe/errors.hpp"

#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

namespace qpe {

BasisMap::BasisMap(int lmax) : lmax_(lmax)
{
    if (lmax < 0)
        throw DomainError("BasisMap: lmax < 0");
    for (int l = 0; l <= lmax; ++l)
        for (int m = -l; m <= l; ++m)
            for (Family k : {Family::V, Family::W, Family::X}) {
                if (l == 0 && k != Family::V)
                    continue;
                items_.push_back({l, m, k});
            }
}

int BasisMap::index(int l, int m, Family k) const
{
    check_vsh_index(k, l, m);
    if (l > lmax_)
        throw DomainError("BasisMap: l > lmax");
    if (l == 0)
        return 0;
    return 1 + 3 * ((l * l - 1) + (m + l)) + (family_index(k) - 1);
}

namespace {

struct SourceTerm {
    Family fam;
    int ord;
    EntryTerm e;
};

// Expansion about the observation centre of S over a displaced ball applied to Y^q_lm,
// restricted to output degree lp. Coefficients still need the row projection.
std::vector<SourceTerm> source_terms(Family q, int l, int m, int lp, double rho, const LameParams& params)
{
    check_vsh_index(q, l, m);
    auto a = out_coeffs(l, params);
    std::vector<std::pair<FieldKind, double>> fields;
    switch (q) {
    case Family::V:
        fields = {{FieldKind::VDecay, std::pow(rho, l + 3) * a.a11}};
        break;
    case Family::W:
        fields = {{FieldKind::VDecay, std::pow(rho, l + 3) * a.a12},
                  {FieldKind::VNegL, std::pow(rho, l + 1) * (a.a22 - a.a12)},
                  {FieldKind::YRNegL, std::pow(rho, l + 1) * a.a22 * (2.0 * l + 1.0)}};
        break;
    case Family::X:
        fields = {{FieldKind::XDecay, std::pow(rho, l + 2) * a.a33}};
        break;
    }
    ComplexPart parts[2];
    int np = real_to_complex(m, parts);
    std::vector<SourceTerm> out;
    int lo = std::max(0, lp - 2), hi = lp + 3;
    for (int k = 0; k < np; ++k)
        for (auto& [kind, scale] : fields) {
            if (scale == 0.0)
                continue;
            for (auto& t : expand_field(kind, l, parts[k].m, lo, hi)) {
                if (t.deg != lp)
                    continue;
                cplx c = parts[k].w * scale * t.coef * std::pow(rho, t.power);
                out.push_back({t.fam, t.ord, {c, t.kind, l, parts[k].m, t.lam, t.mu, t.q}});
            }
        }
    return out;
}

// Project onto the real row harmonic (p, lp, mp): int Y_real . F^mu = sum conj(w) delta norm.
std::vector<EntryTerm> project_row(const std::vector<SourceTerm>& src, Family p, int lp, int mp)
{
    ComplexPart parts[2];
    int np = real_to_complex(mp, parts);
    double nrm = vsh_norm(p, lp);
    std::map<std::tuple<int, int, int, int, int, int>, cplx> acc;
    for (auto& s : src) {
        if (s.fam != p)
            continue;
        for (int k = 0; k < np; ++k) {
            if (parts[k].m != s.ord)
                continue;
            auto& e = s.e;
            acc[{static_cast<int>(e.kind), e.l, e.m, e.lam, e.mu, e.q}] += e.coef * std::conj(parts[k].w) * nrm;
        }
    }
    std::vector<EntryTerm> out;
    for (auto& [key, c] : acc) {
        if (c == 0.0)
            continue;
        auto [kind, l, m, lam, mu, q] = key;
        out.push_back({c, static_cast<SeriesKind>(kind), l, m, lam, mu, q});
    }
    return out;
}

void check_row(Family p, int lp, int mp) { check_vsh_index(p, lp, mp); }

cplx script_value(const EntryTerm& e, const LatticeContext& ctx)
{
    switch (e.kind) {
    case SeriesKind::H: return scriptH(e.l, e.lam, e.m, e.mu, ctx);
    case SeriesKind::A: return scriptA(e.l, e.lam, e.m, e.mu, e.q, ctx);
    default: return scriptD(e.l, e.lam, e.m, e.mu, ctx);
    }
}

cplx lattice_entry(const std::vector<EntryTerm>& terms, const LatticeContext& ctx)
{
    CompensatedSum<cplx> s;
    for (auto& e : terms)
        s.add(e.coef * script_value(e, ctx));
    return s.value();
}

}  // namespace

std::vector<EntryTerm> entry_terms(Family p, int lp, int mp, Family q, int l, int m, double rho, const LameParams& params)
{
    check_row(p, lp, mp);
    return project_row(source_terms(q, l, m, lp, rho, params), p, lp, mp);
}

int entry_series_order(const std::vector<EntryTerm>& terms)
{
    int best = 0;
    for (auto& e : terms) {
        int k = e.kind == SeriesKind::H ? 0 : e.kind == SeriesKind::A ? 1 : 2;
        int s = e.l + e.lam + 1 - k;
        if (best == 0 || s < best)
            best = s;
    }
    return best;
}

double diagonal_term(Family p, int lp, int mp, Family q, int l, int m, double rho, const LameParams& params)
{
    check_row(p, lp, mp);
    check_vsh_index(q, l, m);
    if (p != q || lp != l || mp != m)
        return 0.0;
    return rho * diag_matrix(l, params).tau(q) * vsh_norm(q, l);
}

double per_copy_entry_shifted(Family p, int lp, int mp, Family q, int l, int m, double t, double rho,
                              const LameParams& params)
{
    if (!(std::abs(t) > 2.0 * rho))
        throw GeometryError("per_copy_entry: balls overlap");
    Point3 b(-t, 0.0, 0.0);
    auto bq = rhat_dot_a_expand(b);
    CompensatedSum<cplx> s;
    for (auto& e : entry_terms(p, lp, mp, q, l, m, rho, params)) {
        cplx h = coeff_H(e.l, e.lam, e.m, e.mu, b);
        if (e.kind == SeriesKind::A)
            h *= bq[e.q + 1];
        else if (e.kind == SeriesKind::D)
            h *= t * t;
        s.add(e.coef * h);
    }
    cplx v = s.value();
    if (std::abs(v.imag()) > 1e-9 * (std::abs(v.real()) + 1e-300) && std::abs(v.imag()) > 1e-15)
        throw std::logic_error("per_copy_entry: value is not real");
    return v.real();
}

double per_copy_entry(Family p, int lp, int mp, Family q, int l, int m, int n, double rho, const LameParams& params)
{
    if (n == 0)
        throw DomainError("per_copy_entry: n = 0 is the diagonal term");
    return per_copy_entry_shifted(p, lp, mp, q, l, m, double(n), rho, params);
}

cplx entry_single(Family p, int lp, int mp, Family q, int l, int m, double alpha, double rho, const LameParams& params,
                  LatticeSumCache* cache)
{
    params.validate();
    if (!(rho > 0.0 && rho < 0.5))
        throw GeometryError("entry_single: need 0 < rho < 1/2");
    auto terms = entry_terms(p, lp, mp, q, l, m, rho, params);
    return diagonal_term(p, lp, mp, q, l, m, rho, params) + lattice_entry(terms, single_lattice(alpha, cache));
}

cplx entry_dimer(DimerBlock block, Family p, int lp, int mp, Family q, int l, int m, double alpha,
                 const DimerGeometry& geom, const LameParams& params, LatticeSumCache* cache)
{
    geom.validate();
    if (block == DimerBlock::B11 || block == DimerBlock::B22)
        return entry_single(p, lp, mp, q, l, m, alpha, geom.rho, params, cache);
    params.validate();
    auto v = block == DimerBlock::B21 ? LatticeVariant::D21 : LatticeVariant::D12;
    auto terms = entry_terms(p, lp, mp, q, l, m, geom.rho, params);
    return lattice_entry(terms, dimer_lattice(alpha, v, geom, cache));
}

namespace {

// Fills one column block: rows and columns both indexed by map; f(row terms) gives the entry.
template <class F>
void fill_columns(const BasisMap& map, double rho, const LameParams& params, int threads, F&& entry,
                  Eigen::MatrixXcd& out)
{
    int n = map.size();
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto work = [&] {
        try {
            for (int j = next++; j < n; j = next++) {
                auto& c = map.at(j);
                for (int lp = 0; lp <= map.lmax(); ++lp) {
                    auto src = source_terms(c.k, c.l, c.m, lp, rho, params);
                    for (int i = 0; i < n; ++i) {
                        auto& r = map.at(i);
                        if (r.l != lp)
                            continue;
                        entry(i, j, r, c, project_row(src, r.k, r.l, r.m));
                    }
                }
            }
        } catch (...) {
            std::lock_guard<std::mutex> g(err_mu);
            if (!err)
                err = std::current_exception();
        }
    };
    threads = std::max(1, threads);
    if (threads == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back(work);
        for (auto& t : pool)
            t.join();
    }
    if (err)
        std::rethrow_exception(err);
    (void)out;
}

std::string provenance(const char* kind, double alpha, double rho, int lmax, const LameParams& p)
{
    std::ostringstream os;
    os.precision(17);
    os << "qpe " << kind << " lmax=" << lmax << " alpha=" << alpha << " rho=" << rho << " lambda=" << p.lambda
       << " mu=" << p.mu << " sign_flip=" << p.sign_flip << " ordering=v" << BasisMap::kOrderingVersion;
    return os.str();
}

}  // namespace

AssembledMatrix assemble_single(double alpha, double rho, const LameParams& params, int lmax, int threads)
{
    params.validate();
    if (!(rho > 0.0 && rho < 0.5))
        throw GeometryError("assemble_single: need 0 < rho < 1/2");
    if (alpha_is_singular(alpha))
        throw QuasiMomentumSingular("assemble_single: alpha = 0 mod 2 pi");
    AssembledMatrix a;
    a.alpha = alpha;
    a.rho = rho;
    a.params = params;
    a.lmax = lmax;
    a.map = BasisMap(lmax);
    int n = a.map.size();
    a.M = Eigen::MatrixXcd::Zero(n, n);
    LatticeSumCache cache(alpha);
    cache.warm(2 * lmax + 4);
    auto ctx = single_lattice(alpha, &cache);
    fill_columns(a.map, rho, params, threads,
                 [&](int i, int j, const MultiIndex& r, const MultiIndex& c, const std::vector<EntryTerm>& terms) {
                     a.M(i, j) = diagonal_term(r.k, r.l, r.m, c.k, c.l, c.m, rho, params) + lattice_entry(terms, ctx);
                 },
                 a.M);
    a.provenance = provenance("single", alpha, rho, lmax, params);
    return a;
}

AssembledMatrix assemble_dimer(double alpha, const DimerGeometry& geom, const LameParams& params, int lmax, int threads)
{
    geom.validate();
    auto single = assemble_single(alpha, geom.rho, params, lmax, threads);
    AssembledMatrix a;
    a.alpha = alpha;
    a.rho = geom.rho;
    a.params = params;
    a.lmax = lmax;
    a.dimer = true;
    a.d = geom.d;
    a.map = single.map;
    int n = a.map.size();
    a.M = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    a.M.topLeftCorner(n, n) = single.M;
    a.M.bottomRightCorner(n, n) = single.M;
    LatticeSumCache cache(alpha);
    cache.warm(2 * lmax + 4, {2.0 * geom.d, 1.0 - 2.0 * geom.d});
    auto c21 = dimer_lattice(alpha, LatticeVariant::D21, geom, &cache);
    auto c12 = dimer_lattice(alpha, LatticeVariant::D12, geom, &cache);
    fill_columns(a.map, geom.rho, params, threads,
                 [&](int i, int j, const MultiIndex&, const MultiIndex&, const std::vector<EntryTerm>& terms) {
                     a.M(i, n + j) = lattice_entry(terms, c21);
                     a.M(n + i, j) = lattice_entry(terms, c12);
                 },
                 a.M);
    a.provenance = provenance("dimer", alpha, geom.rho, lmax, params) + " d=" + std::to_string(geom.d);
    return a;
}

}  // namespace qpe
