/*
   Copyright 2026 The ffuniv Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

        http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#include "ffuniv/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

#include "ffuniv/approximation.hpp"
#include "ffuniv/arith.hpp"
#include "ffuniv/error.hpp"
#include "ffuniv/lfunctions.hpp"
#include "ffuniv/parallel.hpp"
#include "ffuniv/universality.hpp"

namespace ffuniv {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr int kSchemaVersion = 1;

struct Ctx {
    const ExperimentConfig& cfg;
    fs::path out;
    std::vector<std::string> files;
    unsigned workers = 1;
    std::uint64_t seed = 12345;
    std::string summary;
    bool violation = false;
};

// ---------------------------------------------------------------------------
// output

class Csv {
public:
    Csv(Ctx& ctx, const std::string& name, const std::string& schema, const std::vector<std::string>& cols)
        : f_(ctx.out / name, std::ios::binary)
    {
        if (!f_)
            throw PreconditionError("cannot write " + (ctx.out / name).string());
        ctx.files.push_back(name);
        f_ << "# ffuniv " << schema << " v" << kSchemaVersion << "\n";
        row(cols);
    }
    void row(const std::vector<std::string>& cells)
    {
        for (std::size_t i = 0; i < cells.size(); ++i)
            f_ << (i ? "," : "") << cells[i];
        f_ << "\n";
    }

private:
    std::ofstream f_;
};

void write_json(Ctx& ctx, const std::string& name, json j)
{
    j["schema"] = name.substr(0, name.find('.')) + " v" + std::to_string(kSchemaVersion);
    std::ofstream f(ctx.out / name, std::ios::binary);
    if (!f)
        throw PreconditionError("cannot write " + (ctx.out / name).string());
    f << j.dump(2) << "\n";
    ctx.files.push_back(name);
}

std::string R15(double x)
{
    return format_real(x);
}

std::string C15(cplx z)
{
    return format_complex(z);
}

template <class T>
std::string joined(const std::vector<T>& v, const char* sep = ";")
{
    std::ostringstream s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            s << sep;
        if constexpr (std::is_floating_point_v<T>)
            s << R15(v[i]);
        else
            s << v[i];
    }
    return s.str();
}

// ---------------------------------------------------------------------------
// config access

PolyRing ring_of(const ExperimentConfig& c)
{
    const auto p = c.get_int("field.p", 3);
    const auto k = c.get_int("field.k", 1);
    if (p < 3 || k < 1 || p > 0xffffffffLL || k > 64)
        throw PreconditionError("field: p = " + std::to_string(p) + ", k = " + std::to_string(k) + " out of range");
    return PolyRing(make_field(static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(k)));
}

Poly modulus_of(const ExperimentConfig& c, const PolyRing& R)
{
    const Poly Q = R.parse(c.get("modulus.Q"));
    if (!Q.is_monic() || Q.deg() < 1)
        throw PreconditionError("modulus.Q must be monic of degree >= 1");
    return Q;
}

int int_param(const ExperimentConfig& c, const std::string& key, long long fallback, long long lo, long long hi)
{
    const auto v = c.get_int(key, fallback);
    if (v < lo || v > hi)
        throw PreconditionError(key + " = " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "]");
    return static_cast<int>(v);
}

RegionGrid grid_of(const ExperimentConfig& c, std::uint32_t q, const std::string& fallback_kind)
{
    const std::string kind = c.get("grid.kind", fallback_kind);
    const double lq = std::log(static_cast<double>(q));
    if (kind == "default_u")
        return RegionGrid::default_u(q);
    if (kind == "default_s")
        return RegionGrid::default_s(q);
    if (kind == "annulus")
        return RegionGrid::annulus(q, c.get_double("grid.r_lo", std::pow(q, -0.85)),
                                   c.get_double("grid.r_hi", std::pow(q, -0.65)),
                                   int_param(c, "grid.n_r", 10, 1, 100000), c.get_double("grid.ang_lo", 0.0),
                                   c.get_double("grid.ang_hi", 0.8 * std::numbers::pi),
                                   int_param(c, "grid.n_ang", 20, 1, 100000));
    if (kind == "rectangle")
        return RegionGrid::rectangle(q, c.get_double("grid.sig_lo", 0.6), c.get_double("grid.sig_hi", 0.9),
                                     int_param(c, "grid.n_sig", 10, 1, 100000),
                                     c.get_double("grid.t_lo", 0.1 * 2 * std::numbers::pi / lq),
                                     c.get_double("grid.t_hi", 0.9 * 2 * std::numbers::pi / lq),
                                     int_param(c, "grid.n_t", 20, 1, 100000));
    throw ParseError("grid.kind: unknown '" + kind + "' (default_u, default_s, annulus, rectangle)");
}

double theta_of(std::mt19937_64& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

PhaseAssignment random_window(const GroupPtr& G, int mu, int rho, std::uint64_t seed)
{
    auto ph = PhaseAssignment::window(G, mu, rho);
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < ph.size(); ++i)
        ph.set_theta(i, theta_of(rng));
    return ph;
}

PhaseAssignment phases_of(Ctx& ctx, const GroupPtr& G, int mu, int rho)
{
    if (!ctx.cfg.has("phases.file"))
        return random_window(G, mu, rho, ctx.seed);
    fs::path p = ctx.cfg.get("phases.file");
    if (p.is_relative() && !ctx.cfg.base_dir().empty())
        p = fs::path(ctx.cfg.base_dir()) / p;
    std::ifstream f(p, std::ios::binary);
    if (!f)
        throw ParseError("phases.file: cannot open '" + p.string() + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return PhaseAssignment::parse(G, ss.str());
}

struct Pars {
    int K = 0, rho = 0;
    double delta = 0;
};

Pars pars_of(const ExperimentConfig& c, const UnitGroup& G)
{
    Pars p;
    std::optional<ParamSet> dp;
    if (!c.has("params.K") || !c.has("params.delta") || !c.has("params.rho"))
        dp = def_pars(G.q(), G.degQ());
    p.K = c.has("params.K") ? int_param(c, "params.K", 0, 1, 4096) : dp->K;
    p.rho = c.has("params.rho") ? int_param(c, "params.rho", 0, 0, 64) : dp->rho_degree();
    p.delta = c.has("params.delta") ? c.get_double("params.delta") : dp->delta;
    if (!(p.delta > 0 && p.delta <= 0.5))
        throw PreconditionError("params.delta must lie in (0, 1/2]");
    return p;
}

double epsilon_of(const ExperimentConfig& c, const PeakPolynomial& f, std::uint32_t q)
{
    if (c.has("params.epsilon"))
        return c.get_double("params.epsilon");
    const std::string b = c.get("params.epsilon_base", "e");
    if (b == "e")
        return default_epsilon(f, EpsilonBase::E);
    if (b == "q")
        return default_epsilon(f, EpsilonBase::Q, q);
    throw ParseError("params.epsilon_base: expected e or q, got '" + b + "'");
}

std::string exps_text(const std::vector<std::uint32_t>& m)
{
    return joined(m);
}

json group_json(const UnitGroup& G)
{
    json j;
    j["Q"] = G.ring().to_string(G.modulus());
    j["degQ"] = G.degQ();
    j["phi"] = G.phi();
    j["orders"] = G.orders();
    j["exponent"] = G.exponent();
    std::vector<std::string> gens;
    for (const auto& g : G.generator_polys())
        gens.push_back(G.ring().to_string(g));
    j["generators"] = gens;
    return j;
}

// ---------------------------------------------------------------------------
// commands

void cmd_primes(Ctx& ctx)
{
    const auto R = ring_of(ctx.cfg);
    const int maxdeg = int_param(ctx.cfg, "params.maxdeg", 4, 1, 16);
    Csv csv(ctx, "primes.csv", "primes", {"degree", "index", "P"});
    json counts = json::array();
    bool ok = true;
    for (int d = 1; d <= maxdeg; ++d) {
        const auto ps = primes_of_degree(R, d);
        for (std::size_t i = 0; i < ps.size(); ++i)
            csv.row({std::to_string(d), std::to_string(i), R.to_string(ps[i])});
        const auto formula = prime_count(R.q(), d);
        ok = ok && formula == ps.size();
        counts.push_back({{"degree", d}, {"enumerated", ps.size()}, {"formula", formula}});
    }
    write_json(ctx, "primes.json", {{"field", R.field().spec().to_string()}, {"maxdeg", maxdeg}, {"counts", counts},
                                    {"counts_agree", ok}});
    ctx.violation = !ok;
    ctx.summary = ok ? "prime counts agree with the formula" : "prime count mismatch";
}

void cmd_phi(Ctx& ctx)
{
    const auto R = ring_of(ctx.cfg);
    const Poly Q = modulus_of(ctx.cfg, R);
    const auto fac = factorize(R, Q);
    std::uint64_t from_factors = 1;
    json factors = json::array();
    for (const auto& [P, e] : fac.factors) {
        const std::uint64_t n = R.norm(P);
        std::uint64_t pe = 1;
        for (int i = 1; i < e; ++i)
            pe *= n;
        from_factors *= pe * (n - 1);
        factors.push_back({{"P", R.to_string(P)}, {"e", e}});
    }
    const auto direct = euler_phi(R, Q);
    json j;
    j["Q"] = R.to_string(Q);
    j["factorization"] = factors;
    j["omega"] = omega(R, Q);
    j["phi_euler"] = direct;
    j["phi_factors"] = from_factors;
    bool ok = direct == from_factors;
    if (Q.deg() <= 40 && R.norm(Q) <= kMaxResidues) {
        const auto G = UnitGroup::build(R, Q);
        j["group"] = group_json(*G);
        ok = ok && G->phi() == direct;
    }
    if (ctx.cfg.has("params.n")) {
        const auto b = phi_lower_bound_check(R, int_param(ctx.cfg, "params.n", 1, 1, 12));
        j["bound"] = {{"n", b.n}, {"degQ", b.degQ}, {"phi", b.phi}, {"norm", b.norm}, {"phi_over_norm", b.phi_over_norm}, {"ratio", b.ratio},
                      {"threshold", b.threshold}, {"pass", b.pass}};
    }
    j["paths_agree"] = ok;
    write_json(ctx, "phi.json", j);
    ctx.violation = !ok;
    ctx.summary = "phi = " + std::to_string(direct);
}

void cmd_lpoly(Ctx& ctx)
{
    const auto R = ring_of(ctx.cfg);
    const auto G = UnitGroup::build(R, modulus_of(ctx.cfg, R));
    std::vector<std::uint64_t> idx;
    if (ctx.cfg.has("params.index")) {
        const auto i = ctx.cfg.get_int("params.index");
        if (i < 1 || static_cast<std::uint64_t>(i) >= G->phi())
            throw PreconditionError("params.index must name a nonprincipal character, 1.." +
                                    std::to_string(G->phi() - 1));
        idx.push_back(static_cast<std::uint64_t>(i));
    } else {
        for (std::uint64_t i = 1; i < G->phi(); ++i)
            idx.push_back(i);
    }
    std::vector<std::string> cols{"index", "exps", "parity", "observed_degree"};
    for (int n = 0; n < G->degQ(); ++n)
        cols.push_back("c" + std::to_string(n));
    Csv csv(ctx, "lpoly.csv", "lpoly", cols);
    int bad_c0 = 0;
    for (auto i : idx) {
        const auto chi = character_at(G, i);
        const auto L = l_coeffs(chi);
        std::vector<std::string> row{std::to_string(i), exps_text(chi.exps()), is_even(chi) ? "even" : "odd",
                                     std::to_string(L.observed_degree())};
        for (const auto& c : L.coeffs)
            row.push_back(C15(c));
        csv.row(row);
        if (std::abs(L.coeffs[0] - 1.0) > 1e-12)
            ++bad_c0;
    }
    json j = group_json(*G);
    j["characters"] = idx.size();
    j["c0_not_one"] = bad_c0;
    write_json(ctx, "lpoly.json", j);
    ctx.violation = bad_c0 > 0;
    ctx.summary = std::to_string(idx.size()) + " L-polynomials";
}

void cmd_rhsweep(Ctx& ctx)
{
    const auto R = ring_of(ctx.cfg);
    std::vector<Poly> mods;
    if (ctx.cfg.has("params.degmax")) {
        const int dm = int_param(ctx.cfg, "params.degmax", 1, 1, 12);
        for (int d = 1; d <= dm; ++d) {
            std::uint64_t n = 1;
            for (int i = 0; i < d; ++i)
                n *= R.q();
            if (n > kMaxResidues)
                throw CapacityError("params.degmax = " + std::to_string(dm) + ": q^" + std::to_string(d) +
                                    " residues exceed " + std::to_string(kMaxResidues));
            for (std::uint64_t j = 0; j < n; ++j)
                mods.push_back(R.monic_from_index(d, j));
        }
    } else {
        mods.push_back(modulus_of(ctx.cfg, R));
    }
    struct Row {
        std::uint64_t index;
        std::string exps, parity;
        int deg;
        std::vector<double> moduli;
        std::vector<std::string> classes;
        double residual;
    };
    std::vector<std::vector<Row>> rows(mods.size());
    parallel_for(mods.size(), ctx.workers, [&](std::uint64_t m) {
        const auto G = UnitGroup::build(R, mods[m]);
        if (G->phi() < 2)
            return;
        const auto M = l_coeffs_all(G);
        for (std::uint64_t i = 1; i < G->phi(); ++i) {
            const auto chi = character_at(G, i);
            LPolynomial L{chi, std::vector<cplx>(M.row(i), M.row(i) + M.cols)};
            // exact zeros: the bulk path leaves rounding noise on vanishing coefficients
            Row r{i, exps_text(chi.exps()), is_even(chi) ? "even" : "odd", L.observed_degree(), {}, {}, 0};
            if (r.deg >= 1) {
                const auto rr = roots(L);
                for (std::size_t k = 0; k < rr.alphas.size(); ++k) {
                    r.moduli.push_back(std::abs(rr.alphas[k]));
                    r.classes.push_back(root_class_name(rr.classes[k]));
                }
                r.residual = rr.reconstruction_residual;
            }
            rows[m].push_back(std::move(r));
        }
    });
    Csv csv(ctx, "rhsweep.csv", "rhsweep",
            {"Q", "index", "exps", "parity", "observed_degree", "root_moduli", "classes", "reconstruction_residual"});
    std::uint64_t nchar = 0, nroots = 0, crit = 0, triv = 0, viol = 0, triv_even = 0, triv_odd = 0;
    double worst_res = 0;
    for (std::size_t m = 0; m < mods.size(); ++m)
        for (const auto& r : rows[m]) {
            ++nchar;
            csv.row({R.to_string(mods[m]), std::to_string(r.index), r.exps, r.parity, std::to_string(r.deg),
                     joined(r.moduli), joined(r.classes), R15(r.residual)});
            worst_res = std::max(worst_res, r.residual);
            for (const auto& c : r.classes) {
                ++nroots;
                if (c == std::string(root_class_name(RootClass::Critical)))
                    ++crit;
                else if (c == std::string(root_class_name(RootClass::Trivial))) {
                    ++triv;
                    (r.parity == "even" ? triv_even : triv_odd)++;
                } else
                    ++viol;
            }
        }
    write_json(ctx, "rhsweep.json",
               {{"field", R.field().spec().to_string()}, {"moduli", mods.size()}, {"characters", nchar},
                {"roots", nroots}, {"critical", crit}, {"trivial", triv}, {"trivial_even", triv_even},
                {"trivial_odd", triv_odd}, {"violations", viol}, {"tolerance", kRootClassTolerance},
                {"max_reconstruction_residual", worst_res}});
    ctx.violation = viol > 0;
    ctx.summary = std::to_string(nroots) + " roots, " + std::to_string(viol) + " violations";
}

void cmd_hybrid(Ctx& ctx)
{
    const auto R = ring_of(ctx.cfg);
    const auto G = UnitGroup::build(R, modulus_of(ctx.cfg, R));
    const auto grid = grid_of(ctx.cfg, G->q(), "default_u");
    const auto Ks = ctx.cfg.get_int_list("params.Ks", {1, 2, 4, 8});
    const double tol = ctx.cfg.get_double("params.tol", 1e-9);
    int kmax = 0;
    for (auto K : Ks) {
        if (K < 0 || K > 64)
            throw PreconditionError("params.Ks: K = " + std::to_string(K) + " outside [0, 64]");
        kmax = std::max(kmax, static_cast<int>(K));
    }
    PrimeResidues pr(G, std::max(kmax, 1));
    const std::uint64_t n = G->phi() - 1;
    std::vector<std::vector<double>> res(n);
    parallel_for(n, ctx.workers, [&](std::uint64_t k) {
        const auto L = l_coeffs(character_at(G, k + 1));
        RootReport rr;
        if (L.observed_degree() >= 1)
            rr = roots(L);
        for (auto K : Ks)
            res[k].push_back(hybrid_check(L, rr, grid, static_cast<int>(K), pr));
    });
    Csv csv(ctx, "hybrid.csv", "hybrid", {"index", "exps", "K", "residual"});
    double worst = 0;
    for (std::uint64_t k = 0; k < n; ++k) {
        const auto chi = character_at(G, k + 1);
        for (std::size_t j = 0; j < Ks.size(); ++j) {
            csv.row({std::to_string(k + 1), exps_text(chi.exps()), std::to_string(Ks[j]), R15(res[k][j])});
            worst = std::max(worst, res[k][j]);
        }
    }
    json j = group_json(*G);
    j["grid"] = grid.description();
    j["grid_points"] = grid.size();
    j["Ks"] = Ks;
    j["max_residual"] = worst;
    j["tolerance"] = tol;
    j["pass"] = worst < tol;
    write_json(ctx, "hybrid.json", j);
    ctx.violation = !(worst < tol);
    ctx.summary = "max residual " + R15(worst);
}

void cmd_peak(Ctx& ctx)
{
    const int K = int_param(ctx.cfg, "params.K", 0, 1, 1 << 16);
    const double delta = ctx.cfg.get_double("params.delta");
    const int npts = int_param(ctx.cfg, "params.grid_points", 10000, 16, 10000000);
    const auto f = peak_poly(K, delta);
    const auto c = certify_peak(f, npts);
    Csv csv(ctx, "peak.csv", "peak", {"k", "c"});
    for (std::size_t k = 0; k < f.coeffs().size(); ++k)
        csv.row({std::to_string(k), C15(f.coeffs()[k])});
    const double kap = kappa(f), kq = kappa_quadrature(f);
    const bool kap_ok = kap >= 1.0 / (K + 1) - 1e-15 && kap <= 1.0 + 1e-15 && std::abs(kap - kq) < 1e-6;
    write_json(ctx, "peak.json",
               {{"K", K}, {"delta", delta}, {"grid_points", c.grid_points}, {"value_at_zero", c.value_at_zero},
                {"grid_max", c.grid_max}, {"argmax", c.argmax}, {"off_peak_max", c.off_peak_max},
                {"bound", c.bound}, {"analytic_bound", c.analytic_bound}, {"series_mismatch", c.series_mismatch},
                {"certified", c.ok}, {"kappa", kap}, {"kappa_quadrature", kq}, {"kappa_ok", kap_ok}});
    ctx.violation = !(c.ok && kap_ok);
    ctx.summary = "off-peak max " + R15(c.off_peak_max) + " vs bound " + R15(c.bound);
}

struct MvSetup {
    GroupPtr G;
    Pars p;
    PhaseAssignment phases;
    PeakPolynomial f;
};

MvSetup mv_setup(Ctx& ctx)
{
    const auto R = ring_of(ctx.cfg);
    auto G = UnitGroup::build(R, modulus_of(ctx.cfg, R));
    const auto p = pars_of(ctx.cfg, *G);
    if (p.rho < 1)
        throw PreconditionError("rho = " + std::to_string(p.rho) + ": the prime window (0, rho] is empty");
    auto ph = phases_of(ctx, G, 0, p.rho);
    auto f = peak_poly(p.K, p.delta);
    return {G, p, std::move(ph), std::move(f)};
}

json pars_json(const Pars& p)
{
    return {{"K", p.K}, {"rho", p.rho}, {"delta", p.delta}};
}

void cmd_mvg(Ctx& ctx)
{
    auto s = mv_setup(ctx);
    const auto r = mv_g_experiment(s.phases, s.f, ctx.workers);
    json j = group_json(*s.G);
    j["params"] = pars_json(s.p);
    j["n_primes"] = r.n_primes;
    j["kappa"] = r.kappa;
    j["lhs"] = r.lhs;
    j["main"] = r.main;
    j["error_scale"] = r.error_scale;
    j["discrepancy"] = r.discrepancy;
    j["phases"] = s.phases.serialize();
    write_json(ctx, "mvg.json", j);
    ctx.summary = "discrepancy " + R15(r.discrepancy);
}

void cmd_mvh(Ctx& ctx)
{
    auto s = mv_setup(ctx);
    const double eps = epsilon_of(ctx.cfg, s.f, s.G->q());
    const auto r = mv_h_experiment(s.phases, s.f, eps, ctx.workers);
    json j = group_json(*s.G);
    j["params"] = pars_json(s.p);
    j["n_primes"] = r.n_primes;
    j["kappa"] = r.kappa;
    j["epsilon"] = r.epsilon;
    j["lhs"] = r.lhs;
    j["lhs_plus"] = r.lhs_plus;
    j["lhs_g"] = r.lhs_g;
    j["main"] = r.main;
    j["rel_error"] = r.rel_error;
    j["rel_error_plus"] = r.rel_error_plus;
    j["scaled_error"] = r.scaled_error;
    j["phases"] = s.phases.serialize();
    write_json(ctx, "mvh.json", j);
    ctx.summary = "sum h+ / main - 1 = " + R15(r.rel_error_plus);
}

void cmd_mvtail(Ctx& ctx)
{
    auto s = mv_setup(ctx);
    const cplx sv(ctx.cfg.get_double("params.sigma", 0.75), ctx.cfg.get_double("params.t", 0.0));
    const int z = int_param(ctx.cfg, "params.z", s.p.rho + 2, s.p.rho + 1, 32);
    const auto r = mv_tail_experiment(s.phases, s.f, s.p.rho, sv, z, {}, ctx.workers);
    json j = group_json(*s.G);
    j["params"] = pars_json(s.p);
    j["s"] = C15(r.s);
    j["z"] = r.z;
    j["tail_primes"] = r.tail_primes;
    j["lhs"] = r.lhs;
    j["bound"] = r.bound;
    j["ratio"] = r.ratio;
    write_json(ctx, "mvtail.json", j);
    ctx.summary = "tail ratio " + R15(r.ratio);
}

void cmd_counting(Ctx& ctx)
{
    const auto R = ring_of(ctx.cfg);
    const Poly Q = modulus_of(ctx.cfg, R);
    const double lq = std::log(static_cast<double>(R.q()));
    const double lo = ctx.cfg.get_double("params.x_min", 2 * lq), hi = ctx.cfg.get_double("params.x_max", 8 * lq);
    const int n = int_param(ctx.cfg, "params.n", 50, 2, 1000000);
    const double c = ctx.cfg.get_double("params.c", 1.0);
    const auto r = counting_checks(R, Q, lo, hi, n, c);
    Csv csv(ctx, "counting.csv", "counting", {"x", "N", "scaled", "N_shift", "short_ratio"});
    for (const auto& row : r.rows)
        csv.row({R15(row.x), std::to_string(row.N), R15(row.scaled), std::to_string(row.N_shift),
                 R15(row.short_ratio)});
    const bool in_band = r.min_scaled > 0.5 && r.max_scaled < 2.0;
    write_json(ctx, "counting.json",
               {{"Q", R.to_string(Q)}, {"x_min", lo}, {"x_max", hi}, {"n", n}, {"c", c},
                {"min_scaled", r.min_scaled}, {"max_scaled", r.max_scaled}, {"min_short_ratio", r.min_short_ratio},
                {"multiplicity", r.multiplicity}, {"scaled_in_band", in_band},
                {"short_ratio_positive", r.min_short_ratio > 0}});
    ctx.summary = "N x / e^x in [" + R15(r.min_scaled) + ", " + R15(r.max_scaled) + "]";
}

struct SearchSetup {
    GroupPtr G;
    RegionGrid grid;
    TargetFunction target;
};

SearchSetup search_setup(Ctx& ctx, const std::string& grid_kind)
{
    const auto R = ring_of(ctx.cfg);
    auto G = UnitGroup::build(R, modulus_of(ctx.cfg, R));
    auto grid = grid_of(ctx.cfg, G->q(), grid_kind);
    auto t = TargetFunction::parse(ctx.cfg.get("target.spec", "const 1"));
    return {G, std::move(grid), std::move(t)};
}

void cmd_fit(Ctx& ctx)
{
    auto s = search_setup(ctx, "default_u");
    const int mu = int_param(ctx.cfg, "params.mu", 0, 0, 32);
    const auto p = pars_of(ctx.cfg, *s.G);
    const auto tv = target_values(s.target, s.grid);
    const auto f1 = f1_target(s.G, s.grid, mu, p.K);
    std::vector<cplx> rhs(tv.logF.size());
    for (std::size_t i = 0; i < rhs.size(); ++i)
        rhs[i] = tv.logF[i] - f1[i];
    const auto r = fit_phases(rhs, s.grid, s.G, mu, p.rho);
    Csv csv(ctx, "fit.csv", "fit", {"P", "degree", "theta"});
    for (const auto& e : r.phases.entries())
        csv.row({s.G->ring().to_string(e.P), std::to_string(e.degree), R15(e.theta)});
    json j = group_json(*s.G);
    j["target"] = s.target.id();
    j["grid"] = s.grid.description();
    j["mu"] = mu;
    j["params"] = pars_json(p);
    j["sup_error"] = r.sup_error;
    j["history"] = r.history;
    j["phases"] = r.phases.serialize();
    write_json(ctx, "fit.json", j);
    ctx.summary = "sup error " + R15(r.sup_error);
}

void cmd_sieve(Ctx& ctx)
{
    const auto R = ring_of(ctx.cfg);
    const auto G = UnitGroup::build(R, modulus_of(ctx.cfg, R));
    const int mu = int_param(ctx.cfg, "params.mu", 0, 0, 32);
    const auto p = pars_of(ctx.cfg, *G);
    const auto ph = phases_of(ctx, G, mu, p.rho);
    const bool match = ctx.cfg.get_bool("params.match", false);
    const auto sieve = character_sieve(ph, p.delta, mu, ctx.workers, match);
    const auto f = peak_poly(p.K, p.delta);
    const double eps = epsilon_of(ctx.cfg, f, G->q());
    const auto hp = hplus_positive(sieve_assignment(ph, mu), f, eps, ctx.workers);
    std::vector<char> in_s(G->phi(), 0), in_h(G->phi(), 0);
    for (auto i : sieve)
        in_s[i] = 1;
    for (auto i : hp)
        in_h[i] = 1;
    Csv csv(ctx, "sieve.csv", "sieve", {"index", "exps", "parity", "sieve_pass", "hplus_positive"});
    std::uint64_t sym = 0;
    for (std::uint64_t i = 1; i < G->phi(); ++i) {
        if (!in_s[i] && !in_h[i])
            continue;
        const auto chi = character_at(G, i);
        csv.row({std::to_string(i), exps_text(chi.exps()), is_even(chi) ? "even" : "odd", in_s[i] ? "1" : "0",
                 in_h[i] ? "1" : "0"});
        sym += in_s[i] != in_h[i];
    }
    json j = group_json(*G);
    j["mu"] = mu;
    j["params"] = pars_json(p);
    j["epsilon"] = eps;
    j["match_within_degree"] = match;
    j["sieve_size"] = sieve.size();
    j["hplus_size"] = hp.size();
    j["symmetric_difference"] = sym;
    j["sets_equal"] = sym == 0;
    j["phases"] = ph.serialize();
    write_json(ctx, "sieve.json", j);
    ctx.summary = std::to_string(sieve.size()) + " characters pass";
}

void histogram(Ctx& ctx, const std::vector<double>& d)
{
    constexpr int kBins = 20;
    double hi = 0;
    for (double x : d)
        hi = std::max(hi, x);
    std::vector<std::uint64_t> h(kBins, 0);
    for (double x : d) {
        int b = hi > 0 ? static_cast<int>(x / hi * kBins) : 0;
        h[static_cast<std::size_t>(std::min(b, kBins - 1))]++;
    }
    Csv csv(ctx, "histogram.csv", "histogram", {"lo", "hi", "count"});
    for (int b = 0; b < kBins; ++b)
        csv.row({R15(hi * b / kBins), R15(hi * (b + 1) / kBins), std::to_string(h[static_cast<std::size_t>(b)])});
}

json report_json(const SearchReport& r)
{
    json j;
    j["Q"] = r.Q;
    j["target"] = r.target_id;
    j["grid"] = r.grid_id;
    j["phi"] = r.phi;
    j["epsilon"] = r.epsilon;
    j["evaluated"] = r.indices.size();
    j["found"] = r.found;
    j["best_index"] = r.best_index;
    j["best_distance"] = r.best_distance;
    j["within"] = r.within;
    j["proportion"] = r.proportion;
    j["mean_distance"] = r.mean_distance;
    j["min_target_modulus"] = r.min_target_modulus;
    if (r.guided) {
        j["mu"] = r.mu;
        j["rho"] = r.rho;
        j["K"] = r.K;
        j["delta"] = r.delta;
        j["match_within_degree"] = r.matched;
        j["fit_error"] = r.fit_error;
        j["sieve_size"] = r.sieve_size;
        j["phases"] = r.phases;
        if (r.exhaustive_best_index) {
            j["exhaustive_best_index"] = *r.exhaustive_best_index;
            j["exhaustive_best_distance"] = r.exhaustive_best_distance;
            j["exhaustive_mean_distance"] = r.exhaustive_mean_distance;
        }
    }
    return j;
}

void distances_csv(Ctx& ctx, const GroupPtr& G, const SearchReport& r)
{
    Csv csv(ctx, "distances.csv", "distances", {"index", "exps", "distance", "parity"});
    for (std::size_t k = 0; k < r.indices.size(); ++k) {
        const auto chi = character_at(G, r.indices[k]);
        csv.row({std::to_string(r.indices[k]), exps_text(chi.exps()), R15(r.distances[k]),
                 is_even(chi) ? "even" : "odd"});
    }
}

void cmd_search(Ctx& ctx)
{
    const double eps = ctx.cfg.get_double("params.epsilon", 0.5);
    if (ctx.cfg.has("params.sweep_degrees")) {
        // proportion-vs-deg Q over Q = x^d
        const auto R = ring_of(ctx.cfg);
        const auto grid = grid_of(ctx.cfg, R.q(), "default_u");
        const auto t = TargetFunction::parse(ctx.cfg.get("target.spec", "const 1"));
        Csv csv(ctx, "curve.csv", "curve",
                {"degQ", "phi", "best_index", "best_distance", "mean_distance", "within", "proportion"});
        json rows = json::array();
        for (auto d : ctx.cfg.get_int_list("params.sweep_degrees", {})) {
            if (d < 1 || d > 20)
                throw PreconditionError("params.sweep_degrees: " + std::to_string(d) + " outside [1, 20]");
            const auto G = UnitGroup::build(R, Poly::monomial(static_cast<int>(d)));
            const auto r = universality_search(G, t, grid, eps, ctx.workers);
            csv.row({std::to_string(d), std::to_string(r.phi), std::to_string(r.best_index), R15(r.best_distance),
                     R15(r.mean_distance), std::to_string(r.within), R15(r.proportion)});
            rows.push_back(report_json(r));
        }
        write_json(ctx, "search.json", {{"sweep", rows}});
        ctx.summary = std::to_string(rows.size()) + " moduli searched";
        return;
    }
    auto s = search_setup(ctx, "default_u");
    const auto r = universality_search(s.G, s.target, s.grid, eps, ctx.workers);
    distances_csv(ctx, s.G, r);
    histogram(ctx, r.distances);
    write_json(ctx, "search.json", report_json(r));
    ctx.summary = "best distance " + R15(r.best_distance) + ", proportion " + R15(r.proportion);
}

void cmd_guided(Ctx& ctx)
{
    auto s = search_setup(ctx, "default_u");
    const double eps = ctx.cfg.get_double("params.epsilon", 0.5);
    GuidedOptions opt;
    opt.mu = int_param(ctx.cfg, "params.mu", 0, 0, 32);
    if (ctx.cfg.has("params.rho"))
        opt.rho = int_param(ctx.cfg, "params.rho", 0, 0, 64);
    if (ctx.cfg.has("params.K"))
        opt.K = int_param(ctx.cfg, "params.K", 0, 1, 4096);
    if (ctx.cfg.has("params.delta"))
        opt.delta = ctx.cfg.get_double("params.delta");
    opt.compare = ctx.cfg.get_bool("params.compare", true);
    opt.match_within_degree = ctx.cfg.get_bool("params.match", true);
    const auto r = guided_search(s.G, s.target, s.grid, eps, opt, ctx.workers);
    distances_csv(ctx, s.G, r);
    histogram(ctx, r.distances);
    write_json(ctx, "guided.json", report_json(r));
    ctx.summary = std::to_string(r.sieve_size) + " sieved, best distance " + R15(r.best_distance);
}

void cmd_splitgb(Ctx& ctx)
{
    const auto R = ring_of(ctx.cfg);
    const auto G = UnitGroup::build(R, modulus_of(ctx.cfg, R));
    const auto grid = grid_of(ctx.cfg, G->q(), "default_s");
    const int mu = int_param(ctx.cfg, "params.mu", 0, 0, 32);
    const auto p = pars_of(ctx.cfg, *G);
    const auto A = sieve_assignment(phases_of(ctx, G, mu, p.rho), mu);
    const auto f = peak_poly(p.K, p.delta);
    const double eps = epsilon_of(ctx.cfg, f, G->q());
    const auto r = good_bad_split(A, f, eps, grid, mu, p.rho, p.K, ctx.workers);
    json j = group_json(*G);
    j["grid"] = grid.description();
    j["params"] = pars_json(p);
    j["mu"] = mu;
    j["epsilon"] = eps;
    j["d"] = r.d;
    j["threshold"] = r.threshold;
    j["good"] = r.good;
    j["bad"] = r.bad;
    j["good_fraction"] = static_cast<double>(r.good) / static_cast<double>(r.phi);
    j["mass_good"] = r.mass_good;
    j["mass_bad"] = r.mass_bad;
    j["main"] = r.main;
    j["ratio_good"] = r.ratio_good;
    j["ratio_bad"] = r.ratio_bad;
    j["max_M"] = r.max_M;
    write_json(ctx, "splitgb.json", j);
    ctx.summary = "|G| = " + std::to_string(r.good) + ", |B| = " + std::to_string(r.bad);
}

const std::map<std::string, std::function<void(Ctx&)>>& table()
{
    static const std::map<std::string, std::function<void(Ctx&)>> t = {
        {"primes", cmd_primes}, {"phi", cmd_phi},       {"lpoly", cmd_lpoly},   {"rhsweep", cmd_rhsweep},
        {"hybrid", cmd_hybrid}, {"peak", cmd_peak},     {"mvg", cmd_mvg},       {"mvh", cmd_mvh},
        {"mvtail", cmd_mvtail}, {"counting", cmd_counting}, {"fit", cmd_fit},   {"sieve", cmd_sieve},
        {"search", cmd_search}, {"guided", cmd_guided}, {"splitgb", cmd_splitgb},
    };
    return t;
}

}  // namespace

const std::vector<std::string>& commands()
{
    static const std::vector<std::string> c = {"primes", "phi",      "lpoly", "rhsweep", "hybrid",
                                               "peak",   "mvg",      "mvh",   "mvtail",  "counting",
                                               "fit",    "sieve",    "search", "guided", "splitgb"};
    return c;
}

const std::string& command_summary(const std::string& command)
{
    static const std::map<std::string, std::string> s = {
        {"primes", "enumerate monic irreducibles by degree and check the prime count formula"},
        {"phi", "factor Q, compute phi(Q) and the unit group structure"},
        {"lpoly", "L-polynomial coefficients and observed degree for every character mod Q"},
        {"rhsweep", "classify the inverse roots of every nonprincipal L-polynomial"},
        {"hybrid", "residual of the Euler product times zero product identity"},
        {"peak", "build and certify the peak trigonometric polynomial"},
        {"mvg", "mean value of g over the characters against its main term"},
        {"mvh", "mean value of h+ over the characters against its main term"},
        {"mvtail", "tail contribution of high-degree primes to the mean value"},
        {"counting", "counting function of the prime-power log multiset"},
        {"fit", "fit prime phases to a target and report the Dirichlet polynomial error"},
        {"sieve", "characters whose prime angles sit near the phases, compared with h+"},
        {"search", "sup distance from log L to a target for every character"},
        {"guided", "sieve on fitted phases, then search only the survivors"},
        {"splitgb", "split characters by the size of the middle sum and compare h+ masses"},
    };
    static const std::string none;
    const auto it = s.find(command);
    return it == s.end() ? none : it->second;
}

RunResult run(const std::string& command, const ExperimentConfig& cfg, const std::string& out_dir)
{
    RunResult res;
    const auto it = table().find(command);
    if (it == table().end()) {
        res.exit_code = kExitUsage;
        res.message = "unknown command '" + command + "'";
        return res;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Ctx ctx{cfg, fs::path(out_dir), {}, 1, 12345, {}, false};
    try {
        const auto w = cfg.get_int("run.workers", 1);
        if (w < 1 || w > 1024)
            throw PreconditionError("run.workers must lie in [1, 1024]");
        ctx.workers = static_cast<unsigned>(w);
        const auto seed = cfg.get_int("run.seed", 12345);
        if (seed < 0)
            throw PreconditionError("run.seed must be nonnegative");
        ctx.seed = static_cast<std::uint64_t>(seed);
        std::error_code ec;
        fs::create_directories(ctx.out, ec);
        if (ec)
            throw PreconditionError("cannot create output directory " + out_dir + ": " + ec.message());
        it->second(ctx);
        res.exit_code = ctx.violation ? kExitViolation : kExitOk;
        res.message = command + ": " + ctx.summary;
    } catch (const Error& e) {
        switch (e.kind()) {
        case ErrorKind::Numeric:
        case ErrorKind::Construction:
            res.exit_code = kExitViolation;
            break;
        default:
            res.exit_code = kExitUsage;
        }
        res.message = command + ": " + e.what();
    } catch (const std::exception& e) {
        res.exit_code = kExitViolation;
        res.message = command + ": internal error: " + e.what();
    }
    res.files = ctx.files;
    if (res.exit_code != kExitUsage || !ctx.files.empty()) {
        try {
            json meta;
            meta["command"] = command;
            meta["exit_code"] = res.exit_code;
            meta["message"] = res.message;
            meta["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            meta["workers"] = ctx.workers;
            meta["files"] = ctx.files;
            meta["config"] = cfg.serialize();
            std::ofstream f(ctx.out / "meta.json", std::ios::binary);
            if (f) {
                f << meta.dump(2) << "\n";
                res.files.push_back("meta.json");
            }
        } catch (const std::exception&) {
        }
    }
    return res;
}

}  // namespace ffuniv
