#include "CLI11.hpp"
#include "json.hpp"

#include "qpe/assembly.hpp"
#include "qpe/coupling.hpp"
#include "qpe/errors.hpp"
#include "qpe/oracle.hpp"
#include "qpe/system.hpp"
#include "qpe/translation.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>

using namespace qpe;
using json = nlohmann::json;

namespace {

constexpr const char* kToolVersion = "1.0.0";

enum Exit { kOk = 0, kRuntime = 1, kConfig = 2, kSingular = 3, kVerify = 4 };

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct VerifyFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string command;
    std::string alpha;
    std::string alpha_grid;
    double rho = 0.1;
    double lambda = 1.0;
    double mu = 1.0;
    int lmax = 2;
    std::optional<double> dimer_d;
    std::string phi = "builtin:plane-wave";
    std::string out;
    std::string csv;
    std::string matrix;
    std::vector<std::string> suite;
    std::uint64_t seed = 7;
    int threads = 1;
    bool sign_flip = false;
    std::optional<double> tol;
};

// "1.25", "pi", "-pi*3/4", "pi*0.5"
double parse_alpha(const std::string& text)
{
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c)))
            s += c;
    if (s.empty())
        throw ConfigError("alpha: empty value");
    auto number = [&](const std::string& t) {
        std::size_t pos = 0;
        double v = 0;
        try {
            v = std::stod(t, &pos);
        } catch (...) {
            pos = std::string::npos;
        }
        if (pos != t.size())
            throw ConfigError("alpha: cannot parse '" + text + "'");
        return v;
    };
    double sign = 1.0;
    std::string body = s;
    if (body[0] == '-' || body[0] == '+') {
        if (body.rfind("pi", 1) == 1) {
            sign = body[0] == '-' ? -1.0 : 1.0;
            body = body.substr(1);
        }
    }
    if (body.rfind("pi", 0) != 0)
        return number(s);
    std::string rest = body.substr(2);
    if (rest.empty())
        return sign * kPi;
    if (rest[0] != '*')
        throw ConfigError("alpha: expected pi*<rational>, got '" + text + "'");
    rest = rest.substr(1);
    auto slash = rest.find('/');
    double r = slash == std::string::npos ? number(rest) : number(rest.substr(0, slash)) / number(rest.substr(slash + 1));
    if (!std::isfinite(r))
        throw ConfigError("alpha: '" + text + "' is not finite");
    return sign * kPi * r;
}

std::vector<double> parse_grid(const std::string& text)
{
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string p;
    while (std::getline(ss, p, ':'))
        parts.push_back(p);
    if (parts.size() != 3)
        throw ConfigError("alpha-grid: expected start:stop:count");
    double a = parse_alpha(parts[0]), b = parse_alpha(parts[1]);
    int n = 0;
    try {
        n = std::stoi(parts[2]);
    } catch (...) {
        throw ConfigError("alpha-grid: count must be an integer");
    }
    if (n < 1)
        throw ConfigError("alpha-grid: count must be >= 1");
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i)
        g[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return g;
}

LameParams lame(const RunConfig& c)
{
    LameParams p{c.lambda, c.mu, c.sign_flip};
    if (!(c.mu > 0))
        throw ConfigError("mu must be positive");
    if (!(c.lambda + 2 * c.mu > 0))
        throw ConfigError("lambda + 2 mu must be positive");
    return p;
}

void validate(const RunConfig& c)
{
    lame(c);
    if (!(c.rho > 0 && c.rho < 0.5))
        throw ConfigError("rho must lie in (0, 1/2) so neighbouring balls do not overlap");
    if (c.lmax < 0 || c.lmax > 30)
        throw ConfigError("lmax must lie in [0, 30]");
    if (c.threads < 1)
        throw ConfigError("threads must be >= 1");
    if (c.dimer_d) {
        try {
            DimerGeometry{*c.dimer_d, c.rho}.validate();
        } catch (const GeometryError& e) {
            throw ConfigError(std::string("dimer-d: ") + e.what());
        }
    }
    if (c.tol && !(*c.tol > 0))
        throw ConfigError("tol must be positive");
}

double single_alpha(const RunConfig& c)
{
    if (c.alpha.empty())
        throw ConfigError(c.command + ": --alpha is required");
    return parse_alpha(c.alpha);
}

json complex_array(const Eigen::VectorXcd& v)
{
    json a = json::array();
    for (int i = 0; i < v.size(); ++i)
        a.push_back({v[i].real(), v[i].imag()});
    return a;
}

json header(const std::string& format, double alpha, const RunConfig& c, std::optional<double> d)
{
    json h;
    h["format"] = format;
    h["alpha"] = alpha;
    h["rho"] = c.rho;
    h["lambda"] = c.lambda;
    h["mu"] = c.mu;
    h["sign_flip"] = c.sign_flip;
    h["lmax"] = c.lmax;
    h["d"] = d ? json(*d) : json(nullptr);
    h["ordering_version"] = BasisMap::kOrderingVersion;
    h["tool_version"] = kToolVersion;
    return h;
}

void write_text(const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw ConfigError("cannot open '" + path + "' for writing");
    f << text;
}

json read_json(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw ConfigError("cannot open '" + path + "'");
    try {
        return json::parse(f);
    } catch (const json::exception& e) {
        throw ConfigError("'" + path + "': " + e.what());
    }
}

std::string matrix_json(const AssembledMatrix& A, const RunConfig& c)
{
    json j;
    j["header"] = header("qpe-matrix", A.alpha, c, A.dimer ? std::optional<double>(A.d) : std::nullopt);
    j["header"]["rows"] = A.M.rows();
    j["header"]["cols"] = A.M.cols();
    j["header"]["provenance"] = A.provenance;
    json e = json::array();
    for (int r = 0; r < A.M.rows(); ++r)
        for (int k = 0; k < A.M.cols(); ++k)
            e.push_back({A.M(r, k).real(), A.M(r, k).imag()});
    j["entries"] = std::move(e);
    return j.dump(1) + "\n";
}

std::string matrix_csv(const Eigen::MatrixXcd& M)
{
    std::string s = "row,col,re,im\n";
    char buf[96];
    for (int r = 0; r < M.rows(); ++r)
        for (int k = 0; k < M.cols(); ++k) {
            std::snprintf(buf, sizeof buf, "%d,%d,%.17g,%.17g\n", r, k, M(r, k).real(), M(r, k).imag());
            s += buf;
        }
    return s;
}

// Loads a matrix file written by assemble / dimer-assemble.
AssembledMatrix load_matrix(const std::string& path)
{
    json j = read_json(path);
    try {
        auto& h = j.at("header");
        if (h.at("format") != "qpe-matrix")
            throw ConfigError("'" + path + "' is not a matrix file");
        if (h.at("ordering_version").get<int>() != BasisMap::kOrderingVersion)
            throw ConfigError("'" + path + "': basis ordering version " + h.at("ordering_version").dump() +
                              " does not match " + std::to_string(BasisMap::kOrderingVersion));
        AssembledMatrix A;
        A.alpha = h.at("alpha").get<double>();
        A.rho = h.at("rho").get<double>();
        A.params = LameParams{h.at("lambda").get<double>(), h.at("mu").get<double>(), h.at("sign_flip").get<bool>()};
        A.lmax = h.at("lmax").get<int>();
        A.dimer = !h.at("d").is_null();
        A.d = A.dimer ? h.at("d").get<double>() : 0.0;
        A.map = BasisMap(A.lmax);
        int n = h.at("rows").get<int>();
        if (n != (A.dimer ? 2 : 1) * A.map.size() || h.at("cols").get<int>() != n)
            throw ConfigError("'" + path + "': matrix size does not match lmax");
        auto& e = j.at("entries");
        if (static_cast<long>(e.size()) != long(n) * n)
            throw ConfigError("'" + path + "': wrong number of entries");
        A.M.resize(n, n);
        for (int r = 0; r < n; ++r)
            for (int k = 0; k < n; ++k) {
                auto& v = e[std::size_t(r) * n + k];
                A.M(r, k) = {v.at(0).get<double>(), v.at(1).get<double>()};
            }
        A.provenance = h.value("provenance", "");
        return A;
    } catch (const json::exception& e) {
        throw ConfigError("'" + path + "': " + e.what());
    }
}

Eigen::VectorXcd read_coeff_array(const json& a, int n, const std::string& what)
{
    if (!a.is_array() || static_cast<int>(a.size()) != n)
        throw ConfigError(what + ": expected " + std::to_string(n) + " [re, im] pairs");
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i)
        v[i] = {a[i].at(0).get<double>(), a[i].at(1).get<double>()};
    return v;
}

int cmd_assemble(const RunConfig& c, bool dimer)
{
    double alpha = single_alpha(c);
    auto p = lame(c);
    AssembledMatrix A;
    if (dimer) {
        DimerGeometry g{c.dimer_d.value_or(0.2), c.rho};
        A = assemble_dimer(alpha, g, p, c.lmax, c.threads);
    } else {
        A = assemble_single(alpha, c.rho, p, c.lmax, c.threads);
    }
    write_text(c.out, matrix_json(A, c));
    if (!c.csv.empty())
        write_text(c.csv, matrix_csv(A.M));
    std::fprintf(stderr, "%s: %ld x %ld matrix, lmax %d, alpha %.17g\n", c.command.c_str(), long(A.M.rows()),
                 long(A.M.cols()), c.lmax, alpha);
    return kOk;
}

Eigen::VectorXcd random_vector(int n, std::mt19937_64& g)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXcd v(n);
    for (int i = 0; i < n; ++i) {
        double re = u(g);
        v[i] = {re, u(g)};
    }
    return v;
}

// Right-hand side for one ball. `centre` shifts the builtin fields for the second dimer ball.
RhsVector rhs_for(const RunConfig& c, const AssembledMatrix& A, const std::string& kind, const std::string& arg,
                  int ball)
{
    const BasisMap& map = A.map;
    if (kind == "builtin") {
        auto f = builtin_field(arg, A.alpha, A.rho, A.params);
        SphereField g = f;
        if (ball == 2) {
            // Bloch field seen from the second centre: plane wave picks up its phase, others are unchanged.
            double phase = arg == "plane-wave" ? A.alpha * 2.0 * A.d : 0.0;
            g = [f, phase](const Direction& u) { return Vec3c(std::polar(1.0, phase) * f(u)); };
        }
        return project_rhs(g, build_quadrature(std::max(2 * map.lmax() + 2, 60)), map);
    }
    if (kind == "coeffs") {
        json j = read_json(arg);
        std::string key = ball == 1 ? "coeffs" : "coeffs2";
        int lm = j.at("header").at("lmax").get<int>();
        if (j.at("header").value("ordering_version", BasisMap::kOrderingVersion) != BasisMap::kOrderingVersion)
            throw ConfigError("'" + arg + "': basis ordering version mismatch");
        BasisMap pm(lm);
        if (!j.contains(key))
            throw ConfigError("'" + arg + "': missing '" + key + "'");
        return project_rhs(DensityCoeffs{pm, read_coeff_array(j[key], pm.size(), arg)}, map);
    }
    if (kind == "grid") {
        json j = read_json(arg);
        int deg = j.at("degree").get<int>();
        auto quad = build_quadrature(deg);
        std::string key = ball == 1 ? "values" : "values2";
        auto& vals = j.at(key);
        if (vals.size() != quad.nodes.size())
            throw ConfigError("'" + arg + "': expected " + std::to_string(quad.nodes.size()) + " samples");
        std::vector<Vec3c> samples;
        for (auto& s : vals) {
            Vec3c v;
            for (int i = 0; i < 3; ++i)
                v[i] = {s.at(i).at(0).get<double>(), s.at(i).at(1).get<double>()};
            samples.push_back(v);
        }
        // samples are looked up by node position
        std::map<std::pair<double, double>, std::size_t> at;
        for (std::size_t k = 0; k < quad.nodes.size(); ++k)
            at[{quad.nodes[k].theta, quad.nodes[k].phi}] = k;
        SphereField f = [&](const Direction& u) { return samples.at(at.at({u.theta, u.phi})); };
        return project_rhs(f, quad, map);
    }
    (void)c;
    throw ConfigError("phi: unknown source kind '" + kind + "' (builtin:name | coeffs:path | grid:path | manufactured)");
}

json solve_report_json(const SolveReport& r, const AssembledMatrix& A, const RunConfig& c)
{
    json j;
    j["header"] = header("qpe-coeffs", A.alpha, c, A.dimer ? std::optional<double>(A.d) : std::nullopt);
    j["header"]["lmax"] = A.lmax;
    j["coeffs"] = complex_array(r.F.F);
    if (A.dimer)
        j["coeffs2"] = complex_array(r.F2.F);
    j["residual"] = r.residual;
    j["rcond"] = r.rcond;
    j["ill_conditioned"] = r.ill_conditioned;
    return j;
}

int cmd_solve(const RunConfig& c)
{
    AssembledMatrix A;
    RunConfig cc = c;
    if (!c.matrix.empty()) {
        A = load_matrix(c.matrix);
        cc.rho = A.rho;
        cc.lambda = A.params.lambda;
        cc.mu = A.params.mu;
        cc.sign_flip = A.params.sign_flip;
        cc.lmax = A.lmax;
    } else {
        double alpha = single_alpha(c);
        auto p = lame(c);
        A = c.dimer_d ? assemble_dimer(alpha, DimerGeometry{*c.dimer_d, c.rho}, p, c.lmax, c.threads)
                      : assemble_single(alpha, c.rho, p, c.lmax, c.threads);
    }
    auto colon = c.phi.find(':');
    std::string kind = c.phi.substr(0, colon), arg = colon == std::string::npos ? "" : c.phi.substr(colon + 1);
    int n = A.map.size();
    SolveReport r;
    std::optional<double> recovery;
    if (kind == "manufactured") {
        std::mt19937_64 g(c.seed);
        Eigen::VectorXcd F1 = random_vector(n, g), F2 = A.dimer ? random_vector(n, g) : Eigen::VectorXcd();
        if (A.dimer) {
            Eigen::VectorXcd x(2 * n);
            x << F1.conjugate(), F2.conjugate();
            Eigen::VectorXcd b = A.M * x;
            r = solve_dimer(A, b.head(n), b.tail(n));
            recovery = std::max((r.F.F - F1).cwiseAbs().maxCoeff(), (r.F2.F - F2).cwiseAbs().maxCoeff());
        } else {
            r = solve_single(A, A.M * F1.conjugate());
            recovery = (r.F.F - F1).cwiseAbs().maxCoeff();
        }
    } else if (A.dimer) {
        r = solve_dimer(A, rhs_for(c, A, kind, arg, 1), rhs_for(c, A, kind, arg, 2));
    } else {
        r = solve_single(A, rhs_for(c, A, kind, arg, 1));
    }
    json j = solve_report_json(r, A, cc);
    if (recovery)
        j["recovery_error"] = *recovery;
    write_text(c.out, j.dump(1) + "\n");
    std::fprintf(stderr, "solve: n = %d, residual %.3e, rcond %.3e%s\n", int(A.M.rows()), r.residual, r.rcond,
                 r.ill_conditioned ? " (ill-conditioned)" : "");
    if (recovery) {
        double tol = c.tol.value_or(1e-10);
        std::fprintf(stderr, "solve: manufactured recovery error %.3e (tol %.1e)\n", *recovery, tol);
        if (!(*recovery <= tol))
            throw VerifyFailure("manufactured solution not recovered");
    }
    return kOk;
}

int cmd_sweep(const RunConfig& c)
{
    std::vector<double> grid;
    if (!c.alpha_grid.empty())
        grid = parse_grid(c.alpha_grid);
    else
        grid = {single_alpha(c)};
    auto p = lame(c);
    std::string s = "alpha,rows,max_abs,frobenius,rcond,ill_conditioned\n";
    char buf[256];
    for (double a : grid) {
        AssembledMatrix A = c.dimer_d ? assemble_dimer(a, DimerGeometry{*c.dimer_d, c.rho}, p, c.lmax, c.threads)
                                      : assemble_single(a, c.rho, p, c.lmax, c.threads);
        Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A.M);
        double rc = lu.rcond();
        std::snprintf(buf, sizeof buf, "%.17g,%d,%.17g,%.17g,%.6e,%d\n", a, int(A.M.rows()),
                      A.M.cwiseAbs().maxCoeff(), A.M.norm(), rc, rc < 1e-12 ? 1 : 0);
        s += buf;
    }
    write_text(c.out, s);
    return kOk;
}

// ---- verify

struct Check {
    std::string name;
    double residual;
    double tol;
};

Point3 random_unit(std::mt19937_64& g)
{
    std::normal_distribution<double> n;
    Point3 p;
    do
        p = Point3(n(g), n(g), n(g));
    while (p.norm() < 1e-3);
    return p / p.norm();
}

std::vector<Check> suite_sphharm(std::mt19937_64& g)
{
    double conj = 0, real = 0;
    for (int s = 0; s < 100; ++s) {
        auto d = Direction::from_vector(random_unit(g));
        for (int l = 0; l <= 8; ++l)
            for (int m = -l; m <= l; ++m) {
                double sg = m % 2 ? -1.0 : 1.0;
                conj = std::max(conj, std::abs(ylm_complex(l, -m, d) - sg * std::conj(ylm_complex(l, m, d))));
                ComplexPart p[2];
                int np = real_to_complex(m, p);
                cplx r = 0;
                for (int k = 0; k < np; ++k)
                    r += p[k].w * ylm_complex(l, p[k].m, d);
                real = std::max(real, std::abs(r - ylm_real(l, m, d)));
            }
    }
    auto q = build_quadrature(17);
    double orth = 0;
    int n = 81;
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(n, n);
    for (std::size_t k = 0; k < q.nodes.size(); ++k) {
        auto y = ylm_complex_all(8, q.nodes[k]);
        Eigen::Map<Eigen::VectorXcd> v(y.data(), n);
        G += q.weights[k] * v * v.adjoint();
    }
    orth = (G - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff();
    return {{"conjugation", conj, 1e-13}, {"real_complex_relation", real, 1e-13}, {"orthonormality_l8", orth, 1e-12}};
}

std::vector<Check> suite_vsh(std::mt19937_64& g)
{
    double wv = 0, tang = 0;
    for (int s = 0; s < 100; ++s) {
        auto d = Direction::from_vector(random_unit(g));
        Vec3c r = d.xyz.cast<cplx>();
        for (int l = 1; l <= 6; ++l)
            for (int m = -l; m <= l; ++m) {
                auto W = vsh_complex(Family::W, l, m, d), V = vsh_complex(Family::V, l, m, d),
                     X = vsh_complex(Family::X, l, m, d);
                wv = std::max(wv, (W - V - (2.0 * l + 1) * ylm_complex(l, m, d) * r).norm());
                tang = std::max(tang, std::abs(cplx(r.transpose() * X)));
            }
    }
    auto q = build_quadrature(14);
    BasisMap map(6);
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(map.size(), map.size());
    for (std::size_t k = 0; k < q.nodes.size(); ++k) {
        auto t = vsh_real_all(6, q.nodes[k]);
        Eigen::MatrixXd B(3, map.size());
        for (int i = 0; i < map.size(); ++i) {
            auto& mi = map.at(i);
            B.col(i) = t.get(mi.k, mi.l, mi.m);
        }
        G += q.weights[k] * B.transpose() * B;
    }
    for (int i = 0; i < map.size(); ++i)
        G(i, i) -= vsh_norm(map.at(i).k, map.at(i).l);
    return {{"w_minus_v_radial", wv, 1e-12}, {"x_tangential", tang, 1e-13},
            {"orthogonality_norms_l6", G.cwiseAbs().maxCoeff(), 1e-11}};
}

std::vector<Check> suite_translation(std::mt19937_64& g)
{
    double reg = 0, irr = 0, vec = 0;
    for (int s = 0; s < 10; ++s) {
        Point3 a = random_unit(g), r = 0.3 * random_unit(g);
        for (int l = 0; l <= 6; ++l)
            for (int m = -l; m <= l; ++m) {
                cplx ref = solid_regular(l, m, r + a);
                reg = std::max(reg, std::abs(translate_solid_regular(l, m, r, a) - ref) / (1 + std::abs(ref)));
            }
        for (int l = 0; l <= 3; ++l)
            for (int m = -l; m <= l; ++m) {
                cplx ref = solid_irregular(l, m, r + a);
                double scale = std::pow((r + a).norm(), -l - 1);
                irr = std::max(irr, std::abs(translate_solid_irregular(l, m, r, a, {24, 0.0}).value - ref) / scale);
            }
        for (FieldKind k : {FieldKind::VDecay, FieldKind::VNegL, FieldKind::WNegL, FieldKind::YRNegL, FieldKind::XDecay})
            for (int l = 1; l <= 2; ++l)
                for (int m = -l; m <= l; ++m) {
                    Vec3c ref = field_direct_real(k, l, m, r + a);
                    vec = std::max(vec, (translate_real(k, l, m, r, a, {30, 0.0}).value - ref).norm() / (1 + ref.norm()));
                }
    }
    return {{"regular_addition", reg, 1e-12}, {"irregular_addition", irr, 1e-9}, {"vector_addition", vec, 1e-8}};
}

std::vector<Check> suite_kelvin(std::mt19937_64& g, const LameParams& p)
{
    double rho = 0.3, worst = 0;
    auto q = build_quadrature(80);
    for (int s = 0; s < 3; ++s) {
        Point3 x = rho * (1.5 + s) * random_unit(g);
        for (Family f : {Family::V, Family::W, Family::X})
            for (int l = (f == Family::V ? 0 : 1); l <= 3; ++l)
                for (int m = -l; m <= l; ++m) {
                    Point3 brute = Point3::Zero();
                    for (std::size_t k = 0; k < q.nodes.size(); ++k)
                        brute += q.weights[k] * rho * rho *
                                 (kelvin_tensor(x - rho * q.nodes[k].xyz, p) * vsh_real(f, l, m, q.nodes[k]));
                    Point3 cf = apply_S_at(x, Point3::Zero(), f, l, m, rho, p);
                    worst = std::max(worst, (brute - cf).norm() / std::max(cf.norm(), 1e-300));
                }
    }
    return {{"exterior_identity", worst, 1e-8}};
}

std::vector<Check> suite_latsum(std::mt19937_64& g)
{
    std::uniform_real_distribution<double> u(0.2, 2 * kPi - 0.2);
    double li2 = std::abs(polylog_unit(2, kPi, 1) + kPi * kPi / 12);
    double rel = 0, direct = 0;
    for (int s = 0; s < 5; ++s) {
        double a = u(g);
        for (int k = 2; k <= 5; ++k) {
            rel = std::max(rel, std::abs(lerch_unit(k, a, 1, 1.0) * std::polar(1.0, a) - polylog_unit(k, a, 1)));
            CompensatedSum<cplx> acc;
            for (long n = 0; n < 200000; ++n)
                acc.add(std::polar(1.0, -n * a) / std::pow(n + 0.4, k + 1));
            direct = std::max(direct, std::abs(acc.value() - lerch_unit(k + 1, a, -1, 0.4)));
        }
    }
    return {{"li2_minus_one", li2, 1e-12}, {"phi_times_z_is_li", rel, 1e-12}, {"lerch_vs_direct", direct, 1e-9}};
}

std::vector<Check> suite_assembly(std::mt19937_64& g, const LameParams& p)
{
    std::uniform_real_distribution<double> u(0.3, kPi - 0.3);
    double a = u(g);
    auto A = assemble_single(a, 0.1, p, 3), B = assemble_single(2 * kPi - a, 0.1, p, 3);
    double conj = (A.M - B.M.conjugate()).cwiseAbs().maxCoeff();
    double oracle = 0;
    std::uniform_int_distribution<int> pick(0, A.map.size() - 1);
    for (int s = 0; s < 6; ++s) {
        auto r = A.map.at(pick(g)), c = A.map.at(pick(g));
        auto bs = brute_lattice_entry(r.k, r.l, r.m, c.k, c.l, c.m, {a}, 0.1, p, 10000);
        cplx e = entry_single(r.k, r.l, r.m, c.k, c.l, c.m, a, 0.1, p);
        double tail = bs.tail_bound_factor / std::abs(std::sin(a / 2));
        oracle = std::max(oracle, std::abs(e - bs.partial[0].back()) / std::max(1e-7, tail));
    }
    return {{"conjugation_symmetry", conj, 1e-12}, {"entries_vs_brute_over_tol", oracle, 1.0}};
}

std::vector<Check> suite_system(std::mt19937_64& g, const LameParams& p)
{
    double worst = 0;
    for (int L = 1; L <= 4; ++L) {
        auto A = assemble_single(1.0 + 0.3 * L, 0.1, p, L);
        Eigen::VectorXcd F = random_vector(A.map.size(), g);
        auto r = solve_single(A, A.M * F.conjugate());
        worst = std::max(worst, (r.F.F - F).cwiseAbs().maxCoeff());
    }
    DimerGeometry geo{0.2, 0.1};
    auto D = assemble_dimer(0.9, geo, p, 2);
    int n = D.map.size();
    Eigen::VectorXcd x = random_vector(2 * n, g);
    Eigen::VectorXcd b = D.M * x;
    auto r = solve_dimer(D, b.head(n), b.tail(n));
    Eigen::VectorXcd got(2 * n);
    got << r.F.F.conjugate(), r.F2.F.conjugate();
    return {{"single_round_trip", worst, 1e-10}, {"dimer_round_trip", (got - x).cwiseAbs().maxCoeff(), 1e-10}};
}

int cmd_verify(const RunConfig& c)
{
    static const std::vector<std::string> all = {"sphharm", "vsh", "translation", "kelvin", "latsum", "assembly", "system"};
    std::vector<std::string> suites = c.suite.empty() ? all : c.suite;
    if (suites.size() == 1 && suites[0] == "all")
        suites = all;
    auto p = lame(c);
    std::string report;
    bool ok = true;
    char buf[256];
    for (auto& s : suites) {
        std::mt19937_64 g(c.seed);
        std::vector<Check> checks;
        if (s == "sphharm")
            checks = suite_sphharm(g);
        else if (s == "vsh")
            checks = suite_vsh(g);
        else if (s == "translation")
            checks = suite_translation(g);
        else if (s == "kelvin")
            checks = suite_kelvin(g, p);
        else if (s == "latsum")
            checks = suite_latsum(g);
        else if (s == "assembly")
            checks = suite_assembly(g, p);
        else if (s == "system")
            checks = suite_system(g, p);
        else
            throw ConfigError("verify: unknown suite '" + s + "'");
        for (auto& ch : checks) {
            double tol = c.tol.value_or(ch.tol);
            bool pass = ch.residual <= tol;
            ok = ok && pass;
            std::snprintf(buf, sizeof buf, "%-12s %-28s %.3e  tol %.1e  %s\n", s.c_str(), ch.name.c_str(), ch.residual,
                          tol, pass ? "PASS" : "FAIL");
            report += buf;
        }
    }
    write_text(c.out, report);
    if (!ok)
        throw VerifyFailure("verification failed");
    return kOk;
}

// Applies config-file keys to fields whose flag was not given on the command line.
void apply_config_file(const std::string& path, CLI::App& sub, RunConfig& c)
{
    json j = read_json(path);
    if (!j.is_object())
        throw ConfigError("config file must hold a JSON object");
    auto given = [&](const std::string& flag) {
        auto* o = sub.get_option_no_throw("--" + flag);
        return o && o->count() > 0;
    };
    try {
        for (auto& [key, v] : j.items()) {
            std::string flag = key;
            std::replace(flag.begin(), flag.end(), '_', '-');
            if (given(flag))
                continue;
            if (key == "alpha")
                c.alpha = v.is_string() ? v.get<std::string>() : json(v.get<double>()).dump();
            else if (key == "alpha_grid")
                c.alpha_grid = v.get<std::string>();
            else if (key == "rho")
                c.rho = v.get<double>();
            else if (key == "lambda")
                c.lambda = v.get<double>();
            else if (key == "mu")
                c.mu = v.get<double>();
            else if (key == "lmax")
                c.lmax = v.get<int>();
            else if (key == "dimer_d")
                c.dimer_d = v.get<double>();
            else if (key == "phi")
                c.phi = v.get<std::string>();
            else if (key == "out")
                c.out = v.get<std::string>();
            else if (key == "csv")
                c.csv = v.get<std::string>();
            else if (key == "matrix")
                c.matrix = v.get<std::string>();
            else if (key == "suite")
                c.suite = v.is_array() ? v.get<std::vector<std::string>>() : std::vector<std::string>{v.get<std::string>()};
            else if (key == "seed")
                c.seed = v.get<std::uint64_t>();
            else if (key == "threads")
                c.threads = v.get<int>();
            else if (key == "sign_flip")
                c.sign_flip = v.get<bool>();
            else if (key == "tol")
                c.tol = v.get<double>();
            else
                throw ConfigError("config file: unknown key '" + key + "'");
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config file: ") + e.what());
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Quasi-periodic elastic single-layer matrices for a chain of balls"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", kToolVersion);
    RunConfig cfg;
    std::string config_path;
    double dimer_d = 0.0, tol = 0.0;

    struct Cmd {
        const char* name;
        const char* help;
    };
    const Cmd cmds[] = {{"assemble", "assemble M(alpha) for one ball and write the matrix file"},
                        {"dimer-assemble", "assemble the 2x2 block matrix of a dimer"},
                        {"solve", "solve M conj(F) = b for the density coefficients"},
                        {"sweep", "per-alpha summary of the assembled matrices"},
                        {"verify", "run invariant suites and report the largest residuals"}};
    std::map<std::string, CLI::App*> subs;
    for (auto& cmd : cmds) {
        auto* s = app.add_subcommand(cmd.name, cmd.help);
        s->add_option("--alpha", cfg.alpha, "quasi-momentum in radians, or pi*<rational>");
        s->add_option("--alpha-grid", cfg.alpha_grid, "start:stop:count");
        s->add_option("--rho", cfg.rho, "ball radius")->capture_default_str();
        s->add_option("--lambda", cfg.lambda, "Lame lambda")->capture_default_str();
        s->add_option("--mu", cfg.mu, "Lame mu")->capture_default_str();
        s->add_option("--lmax", cfg.lmax, "truncation degree")->capture_default_str();
        s->add_option("--dimer-d", dimer_d, "dimer half-separation d");
        s->add_option("--phi", cfg.phi, "builtin:name | coeffs:path | grid:path | manufactured")->capture_default_str();
        s->add_option("--out", cfg.out, "output path (stdout when omitted)");
        s->add_option("--csv", cfg.csv, "also write the matrix as row,col,re,im");
        s->add_option("--matrix", cfg.matrix, "solve with a previously written matrix file");
        s->add_option("--suite", cfg.suite, "verify suites (default all)");
        s->add_option("--seed", cfg.seed, "seed for randomized checks")->capture_default_str();
        s->add_option("--threads", cfg.threads, "assembly threads")->capture_default_str();
        s->add_flag("--sign-flip", cfg.sign_flip, "use the reversed-sign operator");
        s->add_option("--tol", tol, "tolerance override");
        s->add_option("--config", config_path, "JSON config file; flags override its keys");
        subs[cmd.name] = s;
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        cfg.command = sub->get_name();
        if (sub->get_option("--dimer-d")->count())
            cfg.dimer_d = dimer_d;
        if (sub->get_option("--tol")->count())
            cfg.tol = tol;
        if (!config_path.empty())
            apply_config_file(config_path, *sub, cfg);
        validate(cfg);
        if (cfg.command == "assemble")
            return cmd_assemble(cfg, false);
        if (cfg.command == "dimer-assemble")
            return cmd_assemble(cfg, true);
        if (cfg.command == "solve")
            return cmd_solve(cfg);
        if (cfg.command == "sweep")
            return cmd_sweep(cfg);
        return cmd_verify(cfg);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfig;
    } catch (const QuasiMomentumSingular& e) {
        std::fprintf(stderr,
                     "singular quasi-momentum: %s\n  hint: exclude alpha = 0 (mod 2 pi) from the grid, or drop the "
                     "l = l' = 1 W-W block whose lattice series diverges there\n",
                     e.what());
        return kSingular;
    } catch (const VerifyFailure& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return kVerify;
    } catch (const GeometryError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfig;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return kConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kRuntime;
    }
}
