#include "qpe/translation.hpp"

#include "qpe/coupling.hpp"
#include "qpe/errors.hpp"
#include "qpe/sphharm.hpp"

#include <cmath>

namespace qpe {

namespace {

double sign_pow(int k) { return (std::abs(k) % 2) ? -1.0 : 1.0; }

int sgn(int v) { return (v > 0) - (v < 0); }

void push_vecY(std::vector<ExpansionTerm>& out, cplx coef, int power, int j, int L, int ord,
               SeriesKind kind, int lam, int mu, int q)
{
    if (coef == 0.0 || j < 0 || std::abs(ord) > j)
        return;
    auto conv = vector_Y_conversion(j, L);
    out.push_back({coef * conv.factor, power, conv.family, conv.degree, ord, kind, lam, mu, q});
}

void expand_v_neg_l(std::vector<ExpansionTerm>& out, int lam, int mu, double scale)
{
    if (lam < 1)
        return;
    out.push_back({scale, lam + 1, Family::W, lam, mu, SeriesKind::H, lam, mu, 0});
    out.push_back({scale, lam - 1, Family::W, lam, mu, SeriesKind::D, lam, mu, 0});
    // 2 r^lam (r^ . b) W_lam^mu, recoupled through K.
    for (int q = -1; q <= 1; ++q) {
        for (int m1 = -1; m1 <= 1; ++m1) {
            for (int lp : {lam - 2, lam}) {
                if (lp < 0)
                    continue;
                for (int j = std::max(0, lp - 1); j <= lp + 1; ++j) {
                    double k = coeff_K(lp, j, lam, m1, mu, q);
                    if (k == 0.0)
                        continue;
                    push_vecY(out, 2.0 * scale * k, lam, j, lp, q + mu, SeriesKind::A, lam, mu, q);
                }
            }
        }
    }
}

void expand_yr_neg_l(std::vector<ExpansionTerm>& out, int lam, int mu, double scale)
{
    // r^{lam+1} Y_lam^mu r^ = r^{lam+1} (W - V) / (2 lam + 1)
    double c = scale / (2.0 * lam + 1.0);
    if (lam >= 1)
        out.push_back({c, lam + 1, Family::W, lam, mu, SeriesKind::H, lam, mu, 0});
    out.push_back({-c, lam + 1, Family::V, lam, mu, SeriesKind::H, lam, mu, 0});
    // r^lam Y_lam^mu b
    for (int q = -1; q <= 1; ++q) {
        for (int j = std::max(0, lam - 1); j <= lam + 1; ++j) {
            double g = sign_pow(q) * cg(lam, mu, 1, q, j, mu + q);
            if (g == 0.0)
                continue;
            push_vecY(out, scale * g, lam, j, lam, mu + q, SeriesKind::A, lam, mu, q);
        }
    }
}

void expand_x_decay(std::vector<ExpansionTerm>& out, int lam, int mu)
{
    if (lam < 1)
        return;
    out.push_back({1.0, lam, Family::X, lam, mu, SeriesKind::H, lam, mu, 0});
    // r^{lam-1} b x W_lam^mu
    double s = std::sqrt(lam * (2.0 * lam + 1.0));
    for (int m1 = -1; m1 <= 1; ++m1) {
        double c1 = cg(lam - 1, mu - m1, 1, m1, lam, mu);
        if (c1 == 0.0)
            continue;
        for (int q = -1; q <= 1; ++q) {
            auto cr = cross_spherical(q, m1);
            if (cr.coef == 0.0)
                continue;
            for (int j = std::max(0, lam - 2); j <= lam; ++j) {
                double c2 = cg(lam - 1, mu - m1, 1, q + m1, j, mu + q);
                if (c2 == 0.0)
                    continue;
                cplx c = s * c1 * sign_pow(q) * cr.coef * c2;
                push_vecY(out, c, lam - 1, j, lam - 1, mu + q, SeriesKind::A, lam, mu, q);
            }
        }
    }
}

bool decaying(FieldKind k) { return k != FieldKind::WRegular; }

}  // namespace

double coeff_H_prefactor(int l, int lam, int m, int mu)
{
    if (lam < 0 || std::abs(mu) > lam || std::abs(m) > l || std::abs(m - mu) > l + lam)
        return 0.0;
    double b = binomial(l + lam + mu - m, lam + mu) * binomial(l + lam + m - mu, lam - mu);
    return sign_pow(lam + mu) * std::sqrt((2.0 * l + 1.0) / (2.0 * lam + 1.0)) * std::sqrt(b);
}

cplx coeff_H(int l, int lam, int m, int mu, const Point3& a)
{
    double pre = coeff_H_prefactor(l, lam, m, mu);
    if (a.norm() == 0.0)
        throw SingularityError("coeff_H: translation a = 0");
    if (pre == 0.0)
        return 0.0;
    return pre * solid_irregular(l + lam, m - mu, a);
}

cplx coeff_A(int l, int lam, int m, int mu, const Point3& a)
{
    if (lam < 0 || lam > l || std::abs(mu) > lam || std::abs(m) > l || std::abs(m - mu) > l - lam)
        return 0.0;
    double b = binomial(l + m, lam + mu) * binomial(l - m, lam - mu);
    return std::sqrt((2.0 * l + 1.0) / (2.0 * lam + 1.0)) * std::sqrt(b) * solid_regular(l - lam, m - mu, a);
}

double coeff_K(int lp, int j, int lam, int m1, int mu, int q)
{
    if (lam < 1 || lp < 0 || j < 0)
        return 0.0;
    double c = cg(lam - 1, mu - m1, 1, m1, lam, mu) * cg(1, q, lam - 1, mu - m1, lp, q + mu - m1) *
               cg(1, 0, lam - 1, 0, lp, 0) * cg(lp, q + mu - m1, 1, m1, j, q + mu);
    if (c == 0.0)
        return 0.0;
    return std::sqrt(lam * (2.0 * lam + 1.0) * (2.0 * lam - 1.0) / (2.0 * lp + 1.0)) * sign_pow(q) * c;
}

cplx coeff_L(int l, int j, int lam, int m, int mu, int q, int m1, const Point3& a)
{
    if (lam < 1 || std::abs(q) > 1 || std::abs(m1) > 1)
        return 0.0;
    if (a.norm() == 0.0)
        throw SingularityError("coeff_L: translation a = 0");
    double c = cg(lam - 1, mu - m1, 1, m1, lam, mu) * cg(lam - 1, mu - m1, 1, q + m1, j, mu + q);
    if (c == 0.0 || std::abs(m - mu) > l + lam)
        return 0.0;
    double b = binomial(l + lam + mu - m, lam + mu) * binomial(l + lam + m - mu, lam - mu);
    auto aq = rhat_dot_a_expand(a);
    return kI * sign_pow(lam + mu + q) * double(sgn(q - m1)) * aq[q + 1] * std::sqrt(lam * (2.0 * l + 1.0)) *
           solid_irregular(l + lam, m - mu, a) * std::sqrt(b) * c;
}

cplx translate_solid_regular(int l, int m, const Point3& r, const Point3& a)
{
    CompensatedSum<cplx> s;
    for (int lam = 0; lam <= l; ++lam)
        for (int mu = -lam; mu <= lam; ++mu) {
            if (std::abs(m - mu) > l - lam)
                continue;
            double c = std::sqrt(binomial(2 * l, 2 * lam)) * cg_regular_closed(l, lam, m, mu);
            s.add(c * solid_regular(lam, mu, r) * solid_regular(l - lam, m - mu, a));
        }
    return s.value();
}

ScalarSeries translate_solid_irregular(int l, int m, const Point3& r, const Point3& a, const TruncationPolicy& policy)
{
    double rn = r.norm(), an = a.norm();
    if (an == 0.0)
        throw SingularityError("translate_solid_irregular: a = 0");
    if (!(rn < an))
        throw ConvergenceError("translate_solid_irregular: need |r| < |a|");
    double ratio = rn / an;
    int lmx = policy.lambda_max;
    // harmonics tabulated once; the solid harmonics are rescaled from them
    auto ya = ylm_complex_all(l + lmx, Direction::from_vector(a));
    std::vector<cplx> yr;
    if (rn > 0.0)
        yr = ylm_complex_all(lmx, Direction::from_vector(r));
    CompensatedSum<cplx> s;
    double last = 0.0;
    int lam = 0;
    for (; lam <= lmx; ++lam) {
        CompensatedSum<cplx> block;
        double sr = std::sqrt(4.0 * kPi / (2 * lam + 1)) * std::pow(rn, lam);
        double sa = std::sqrt(4.0 * kPi / (2 * (l + lam) + 1)) * std::pow(an, -(l + lam) - 1);
        for (int mu = -lam; mu <= lam; ++mu) {
            double c = std::sqrt(binomial(2 * l + 2 * lam + 1, 2 * lam)) * cg_irregular_closed(l, lam, m, mu);
            if (c == 0.0)
                continue;
            cplx reg = rn > 0.0 ? sr * yr[ylm_index(lam, mu)] : cplx(lam == 0 ? 1.0 : 0.0);
            block.add(c * reg * sa * ya[ylm_index(l + lam, m - mu)]);
        }
        s.add(block.value());
        last = std::abs(block.value());
    }
    double tail = ratio < 1.0 ? last * ratio / (1.0 - ratio) : INFINITY;
    return {s.value(), tail, lam - 1};
}

std::vector<ExpansionTerm> expand_field(FieldKind kind, int l, int m, int lam_min, int lam_max)
{
    std::vector<ExpansionTerm> out;
    lam_min = std::max(lam_min, 0);
    for (int lam = lam_min; lam <= lam_max; ++lam) {
        for (int mu = -lam; mu <= lam; ++mu) {
            switch (kind) {
            case FieldKind::WRegular:
                if (lam >= 1 && lam <= l && std::abs(m - mu) <= l - lam)
                    out.push_back({1.0, lam - 1, Family::W, lam, mu, SeriesKind::H, lam, mu, 0});
                break;
            case FieldKind::VDecay:
                if (lam >= 1)
                    out.push_back({1.0, lam - 1, Family::W, lam, mu, SeriesKind::H, lam, mu, 0});
                break;
            case FieldKind::VNegL:
                expand_v_neg_l(out, lam, mu, 1.0);
                break;
            case FieldKind::YRNegL:
                expand_yr_neg_l(out, lam, mu, 1.0);
                break;
            case FieldKind::WNegL:
                expand_v_neg_l(out, lam, mu, 1.0);
                expand_yr_neg_l(out, lam, mu, 2.0 * l + 1.0);
                break;
            case FieldKind::XDecay:
                expand_x_decay(out, lam, mu);
                break;
            }
        }
    }
    if (kind != FieldKind::WRegular) {
        // Drop terms whose H coefficient vanishes by selection rule.
        std::erase_if(out, [&](const ExpansionTerm& t) { return coeff_H_prefactor(l, t.lam, m, t.mu) == 0.0; });
    }
    return out;
}

cplx series_factor(FieldKind kind, const ExpansionTerm& t, int l, int m, const Point3& b)
{
    cplx base = kind == FieldKind::WRegular ? coeff_A(l, t.lam, m, t.mu, b) : coeff_H(l, t.lam, m, t.mu, b);
    switch (t.kind) {
    case SeriesKind::H: return base;
    case SeriesKind::A: return base * rhat_dot_a_expand(b)[t.q + 1];
    default: return base * b.squaredNorm();
    }
}

static void check_field_index(FieldKind kind, int l, int m)
{
    if (l < 0 || std::abs(m) > l)
        throw DomainError("translated field: need |m| <= l");
    if (l == 0 && (kind == FieldKind::WRegular || kind == FieldKind::WNegL || kind == FieldKind::XDecay))
        throw ForbiddenIndex("translated field: W_0^0 and X_0^0 vanish identically");
}

VectorSeries translate_complex(FieldKind kind, int l, int m, const Point3& r, const Point3& a,
                               const TruncationPolicy& policy)
{
    check_field_index(kind, l, m);
    double rn = r.norm(), an = a.norm();
    if (rn == 0.0)
        throw DomainError("translated field: r = 0");
    if (decaying(kind)) {
        if (an == 0.0)
            throw SingularityError("translated field: a = 0");
        if (!(rn < an))
            throw ConvergenceError("translated field: need |r| < |a|");
    }
    int lam_max = decaying(kind) ? policy.lambda_max : l;
    auto dir = Direction::from_vector(r);
    auto tab = vsh_complex_all(lam_max + 1, dir);
    // I_L^M(a) for every L the H coefficients touch, from one harmonic table.
    std::vector<cplx> irr;
    if (decaying(kind)) {
        int L = l + lam_max;
        irr = ylm_complex_all(L, Direction::from_vector(a));
        for (int j = 0; j <= L; ++j)
            for (int k = -j; k <= j; ++k)
                irr[ylm_index(j, k)] *= std::sqrt(4.0 * kPi / (2 * j + 1)) / std::pow(an, j + 1);
    }
    auto bq = rhat_dot_a_expand(a);
    CompensatedSum<cplx> s[3];
    double last = 0.0;
    for (int lam = 0; lam <= lam_max; ++lam) {
        Vec3c block = Vec3c::Zero();
        for (const auto& t : expand_field(kind, l, m, lam, lam)) {
            cplx f;
            if (decaying(kind)) {
                f = coeff_H_prefactor(l, t.lam, m, t.mu) * irr[ylm_index(l + t.lam, m - t.mu)];
                if (t.kind == SeriesKind::A)
                    f *= bq[t.q + 1];
                else if (t.kind == SeriesKind::D)
                    f *= an * an;
            } else {
                f = series_factor(kind, t, l, m, a);
            }
            cplx c = t.coef * std::pow(rn, t.power) * f;
            block += c * tab.get(t.fam, t.deg, t.ord);
        }
        for (int i = 0; i < 3; ++i)
            s[i].add(block[i]);
        last = block.norm();
    }
    double tail = 0.0;
    if (decaying(kind)) {
        double ratio = rn / an;
        tail = last * ratio / (1.0 - ratio);
    }
    return {Vec3c(s[0].value(), s[1].value(), s[2].value()), tail, lam_max};
}

VectorSeries translate_real(FieldKind kind, int l, int m, const Point3& r, const Point3& a,
                            const TruncationPolicy& policy)
{
    ComplexPart parts[2];
    int np = real_to_complex(m, parts);
    VectorSeries out{Vec3c::Zero(), 0.0, 0};
    for (int k = 0; k < np; ++k) {
        auto s = translate_complex(kind, l, parts[k].m, r, a, policy);
        out.value += parts[k].w * s.value;
        out.tail += std::abs(parts[k].w) * s.tail;
        out.lambda_used = s.lambda_used;
    }
    return out;
}

Vec3c field_direct_complex(FieldKind kind, int l, int m, const Point3& rp)
{
    check_field_index(kind, l, m);
    double R = rp.norm();
    auto dir = Direction::from_vector(rp);
    auto tab = vsh_complex_all(l, dir);
    int i = ylm_index(l, m);
    switch (kind) {
    case FieldKind::WRegular: return std::pow(R, l - 1) * tab.W[i];
    case FieldKind::VDecay: return std::pow(R, -l - 2) * tab.V[i];
    case FieldKind::VNegL: return std::pow(R, -l) * tab.V[i];
    case FieldKind::WNegL: return std::pow(R, -l) * tab.W[i];
    case FieldKind::YRNegL: return std::pow(R, -l) * tab.Y[i] * dir.xyz.cast<cplx>();
    default: return std::pow(R, -l - 1) * tab.X[i];
    }
}

Vec3c field_direct_real(FieldKind kind, int l, int m, const Point3& rp)
{
    ComplexPart parts[2];
    int np = real_to_complex(m, parts);
    Vec3c v = Vec3c::Zero();
    for (int k = 0; k < np; ++k)
        v += parts[k].w * field_direct_complex(kind, l, parts[k].m, rp);
    return v;
}

}  // namespace qpe
