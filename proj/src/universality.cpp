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

#include "ffuniv/universality.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "ffuniv/error.hpp"
#include "ffuniv/parallel.hpp"

namespace ffuniv {

namespace {

constexpr double kPi = std::numbers::pi;

std::string num15(double x)
{
    if (x == 0)
        x = 0;  // drop the sign of -0
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

double parse_real(const std::string& s, const std::string& whole)
{
    if (s.empty())
        throw ParseError("complex: malformed '" + whole + "'");
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ParseError("complex: malformed '" + whole + "'");
    }
    if (used != s.size())
        throw ParseError("complex: malformed '" + whole + "'");
    return v;
}

cplx horner(const cplx* c, int n, cplx u)
{
    cplx v = 0;
    for (int k = n - 1; k >= 0; --k)
        v = v * u + c[k];
    return v;
}

double elapsed(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void summarize(SearchReport& r)
{
    r.found = !r.indices.empty();
    r.within = 0;
    double sum = 0;
    r.best_distance = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r.indices.size(); ++i) {
        const double d = r.distances[i];
        sum += d;
        if (d < r.epsilon)
            ++r.within;
        if (d < r.best_distance) {
            r.best_distance = d;
            r.best_index = r.indices[i];
        }
    }
    if (!r.found)
        r.best_distance = 0;
    r.mean_distance = r.found ? sum / static_cast<double>(r.indices.size()) : 0;
    r.proportion = static_cast<double>(r.within) / static_cast<double>(r.phi);
}

}  // namespace

std::string format_real(double x)
{
    return num15(x);
}

std::string format_complex(cplx z)
{
    const double im = z.imag() == 0 ? 0.0 : z.imag();
    std::string s = num15(z.real());
    if (std::signbit(im) || std::isnan(im))
        s += num15(im);
    else
        s += "+" + num15(im);
    return s + "j";
}

cplx parse_complex(const std::string& text)
{
    std::string t;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch)))
            t += ch;
    if (t.empty())
        throw ParseError("complex: empty");
    const char last = t.back();
    if (last != 'j' && last != 'i')
        return {parse_real(t, text), 0.0};
    t.pop_back();
    // split at the last sign that is not part of an exponent
    std::size_t cut = std::string::npos;
    for (std::size_t i = t.size(); i-- > 1;)
        if ((t[i] == '+' || t[i] == '-') && t[i - 1] != 'e' && t[i - 1] != 'E') {
            cut = i;
            break;
        }
    if (cut == std::string::npos) {
        if (t.empty() || t == "+" || t == "-")
            return {0.0, t == "-" ? -1.0 : 1.0};
        return {0.0, parse_real(t, text)};
    }
    std::string im = t.substr(cut);
    if (im == "+" || im == "-")
        im += "1";
    return {parse_real(t.substr(0, cut), text), parse_real(im, text)};
}

// ---------------------------------------------------------------------------

TargetFunction::TargetFunction(TargetKind k, Plane v, std::vector<cplx> p) : kind_(k), var_(v), p_(std::move(p)) {}

TargetFunction TargetFunction::constant(cplx c, Plane var)
{
    if (c == 0.0)
        throw PreconditionError("target: constant 0 vanishes");
    return {TargetKind::Constant, var, {c}};
}

TargetFunction TargetFunction::polynomial(std::vector<cplx> c, Plane var)
{
    if (c.empty())
        throw PreconditionError("target: polynomial needs coefficients");
    return {TargetKind::Polynomial, var, std::move(c)};
}

TargetFunction TargetFunction::exp_polynomial(std::vector<cplx> c, Plane var)
{
    if (c.empty())
        throw PreconditionError("target: exppoly needs coefficients");
    return {TargetKind::ExpPolynomial, var, std::move(c)};
}

TargetFunction TargetFunction::reciprocal_linear(cplx a, Plane var)
{
    return {TargetKind::ReciprocalLinear, var, {a}};
}

TargetFunction TargetFunction::planted(const LPolynomial& L)
{
    return polynomial(L.coeffs, Plane::U);
}

TargetFunction TargetFunction::parse(const std::string& text)
{
    std::istringstream in(text);
    std::string head;
    if (!(in >> head))
        throw ParseError("target: empty");
    Plane var = Plane::U;
    if (auto at = head.find('@'); at != std::string::npos) {
        const std::string v = head.substr(at + 1);
        if (v == "u")
            var = Plane::U;
        else if (v == "s")
            var = Plane::S;
        else
            throw ParseError("target: unknown variable '" + v + "'");
        head.resize(at);
    }
    std::vector<cplx> p;
    for (std::string tok; in >> tok;)
        p.push_back(parse_complex(tok));
    auto need_one = [&] {
        if (p.size() != 1)
            throw ParseError("target: " + head + " takes exactly one parameter");
    };
    if (head == "const") {
        need_one();
        return constant(p[0], var);
    }
    if (head == "poly")
        return polynomial(std::move(p), var);
    if (head == "exppoly")
        return exp_polynomial(std::move(p), var);
    if (head == "reclin") {
        need_one();
        return reciprocal_linear(p[0], var);
    }
    throw ParseError("target: unknown kind '" + head + "'");
}

std::string TargetFunction::id() const
{
    static const char* names[] = {"const", "poly", "exppoly", "reclin"};
    std::string s = names[static_cast<int>(kind_)];
    s += var_ == Plane::U ? "@u" : "@s";
    for (const auto& c : p_)
        s += " " + format_complex(c);
    return s;
}

cplx TargetFunction::eval(cplx z) const
{
    switch (kind_) {
    case TargetKind::Constant:
        return p_[0];
    case TargetKind::Polynomial:
        return horner(p_.data(), static_cast<int>(p_.size()), z);
    case TargetKind::ExpPolynomial:
        return std::exp(horner(p_.data(), static_cast<int>(p_.size()), z));
    case TargetKind::ReciprocalLinear:
        return 1.0 / (z - p_[0]);
    }
    return 0;
}

std::vector<cplx> TargetFunction::values(const RegionGrid& grid) const
{
    std::vector<cplx> out;
    out.reserve(grid.size());
    for (const auto& z : grid.points()) {
        cplx w = z;
        if (grid.plane() == Plane::S && var_ == Plane::U)
            w = u_of_s(grid.q(), z);
        else if (grid.plane() == Plane::U && var_ == Plane::S)
            w = s_of_u(grid.q(), z);
        out.push_back(eval(w));
    }
    return out;
}

TargetValues target_values(const TargetFunction& target, const RegionGrid& grid)
{
    TargetValues tv;
    tv.F = target.values(grid);
    tv.min_modulus = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < tv.F.size(); ++i) {
        const double m = std::abs(tv.F[i]);
        if (!std::isfinite(m))
            throw PreconditionError("target " + target.id() + " is not finite at grid point " + std::to_string(i));
        if (m < tv.min_modulus) {
            tv.min_modulus = m;
            tv.argmin = i;
        }
    }
    if (!(tv.min_modulus > 0))
        throw PreconditionError("target " + target.id() + " vanishes at grid point " + std::to_string(tv.argmin));
    tv.logF.reserve(tv.F.size());
    double prev = 0;
    for (std::size_t i = 0; i < tv.F.size(); ++i) {
        double a = std::arg(tv.F[i]);
        if (i > 0) {
            a += 2 * kPi * std::round((prev - a) / (2 * kPi));
            if (std::abs(a - prev) > kPi / 2)
                throw NumericError("log branch: argument jumps by " + num15(std::abs(a - prev)) +
                                   " between grid points " + std::to_string(i - 1) + " and " + std::to_string(i) +
                                   " (grid too coarse for continuation)");
        }
        tv.logF.emplace_back(std::log(std::abs(tv.F[i])), a);
        prev = a;
    }
    return tv;
}

// ---------------------------------------------------------------------------

LogDecomposition decompose_logL(const Character& chi, cplx s, int mu, int rho, int K, const PrimeResidues& pr)
{
    LogDecomposition out;
    if (K < 1)
        return out;
    if (!(1 <= mu && mu < rho && rho < K))
        throw PreconditionError("decompose_logL: need 1 <= mu < rho < K, got mu=" + std::to_string(mu) +
                                " rho=" + std::to_string(rho) + " K=" + std::to_string(K));
    if (chi.is_principal())
        throw PreconditionError("decompose_logL: principal character");
    if (!(s.real() > 0.5))
        throw PreconditionError("decompose_logL: Re s must exceed 1/2");
    if (K > pr.max_degree())
        throw PreconditionError("decompose_logL: primes tabulated only to degree " + std::to_string(pr.max_degree()));
    const UnitGroup& G = chi.group();
    const double lq = std::log(static_cast<double>(G.q()));
    for (int d = 1; d <= K; ++d) {
        const cplx w = std::exp(-static_cast<double>(d) * lq * s);
        for (auto r : pr.residues(d)) {
            const cplx chiP = unit_root(static_cast<std::uint64_t>(G.angle(chi.exps(), r)), G.exponent());
            cplx term = 1.0;
            for (int j = 1; d * j <= K; ++j) {
                term *= chiP * w;
                const cplx t = term / static_cast<double>(j);
                if (d <= mu)
                    out.f1 += t;
                else if (j >= 2)
                    out.f4 += t;
                else if (d <= rho)
                    out.f2 += t;
                else
                    out.f3 += t;
            }
        }
    }
    out.log_pk = log_p_k(chi, u_of_s(G.q(), s), K, pr);
    out.residual = std::abs(out.f1 + out.f2 + out.f3 + out.f4 - out.log_pk);
    return out;
}

LogDecomposition decompose_logL(const Character& chi, cplx s, int mu, int rho, int K)
{
    if (K < 1)
        return {};
    PrimeResidues pr(chi.group_ptr(), K);
    return decompose_logL(chi, s, mu, rho, K, pr);
}

std::vector<cplx> f1_target(const GroupPtr& group, const RegionGrid& grid, int mu, int K)
{
    const auto us = grid.u_points();
    std::vector<cplx> out(us.size(), 0.0);
    if (mu < 1 || K < 1)
        return out;
    PrimeResidues pr(group, std::min(mu, K));
    for (int d = 1; d <= std::min(mu, K); ++d) {
        const double n = static_cast<double>(pr.primes(d).size());
        for (std::size_t i = 0; i < us.size(); ++i) {
            const cplx w = std::pow(us[i], d);
            cplx term = 1.0;
            for (int j = 1; d * j <= K; ++j) {
                term *= w;
                out[i] += n * term / static_cast<double>(j);
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

PhaseAssignment sieve_assignment(const PhaseAssignment& phases, int mu)
{
    PhaseAssignment out(phases.group_ptr());
    if (mu >= 1) {
        PrimeResidues pr(phases.group_ptr(), mu);
        for (int d = 1; d <= mu; ++d)
            for (const auto& P : pr.primes(d))
                out.add(P, 0.0);
    }
    for (const auto& e : phases.entries())
        out.add(e.P, e.theta);
    return out;
}

std::vector<std::uint64_t> character_sieve(const PhaseAssignment& phases, double delta, int mu, unsigned workers,
                                           bool match_within_degree)
{
    if (!(delta > 0))
        throw PreconditionError("character_sieve: delta must be positive");
    const UnitGroup& G = phases.group();
    const std::uint64_t phi = G.phi();
    std::vector<std::uint64_t> out;
    if (delta >= 0.5) {
        for (std::uint64_t i = 1; i < phi; ++i)
            out.push_back(i);
        return out;
    }
    const auto A = sieve_assignment(phases, mu);
    const double L = static_cast<double>(G.exponent());
    // entries grouped by degree
    std::map<int, std::vector<std::size_t>> blocks;
    for (std::size_t j = 0; j < A.size(); ++j)
        blocks[A.entries()[j].degree].push_back(j);
    std::vector<char> pass(phi, 0);
    parallel_for(phi > 0 ? phi - 1 : 0, workers, [&](std::uint64_t k) {
        const std::uint64_t i = k + 1;
        const auto m = G.unflatten(i);
        if (!match_within_degree) {
            for (const auto& e : A.entries()) {
                const double ph = static_cast<double>(G.angle(m, e.residue)) / L;
                if (!(circle_dist(ph - e.theta) < delta))
                    return;
            }
            pass[i] = 1;
            return;
        }
        // Kuhn's augmenting paths per degree block: primes on the left, thetas on the right
        std::vector<double> ph;
        std::vector<int> match;
        std::vector<char> seen;
        for (const auto& [deg, idx] : blocks) {
            const std::size_t n = idx.size();
            ph.resize(n);
            for (std::size_t a = 0; a < n; ++a)
                ph[a] = static_cast<double>(G.angle(m, A.entries()[idx[a]].residue)) / L;
            auto ok = [&](std::size_t a, std::size_t b) {
                return circle_dist(ph[a] - A.entries()[idx[b]].theta) < delta;
            };
            match.assign(n, -1);
            std::function<bool(std::size_t)> augment = [&](std::size_t a) {
                for (std::size_t b = 0; b < n; ++b)
                    if (!seen[b] && ok(a, b)) {
                        seen[b] = 1;
                        if (match[b] < 0 || augment(static_cast<std::size_t>(match[b]))) {
                            match[b] = static_cast<int>(a);
                            return true;
                        }
                    }
                return false;
            };
            for (std::size_t a = 0; a < n; ++a) {
                seen.assign(n, 0);
                if (!augment(a))
                    return;
            }
        }
        pass[i] = 1;
    });
    for (std::uint64_t i = 1; i < phi; ++i)
        if (pass[i])
            out.push_back(i);
    return out;
}

std::vector<std::uint64_t> hplus_positive(const PhaseAssignment& assignment, const PeakPolynomial& f, double epsilon,
                                          unsigned workers)
{
    const std::uint64_t phi = assignment.group().phi();
    std::vector<char> pass(phi, 0);
    const auto& gp = assignment.group_ptr();
    parallel_for(phi > 0 ? phi - 1 : 0, workers, [&](std::uint64_t k) {
        const Character chi = character_at(gp, k + 1);
        pass[k + 1] = h_func(chi, assignment, f, epsilon) > 0 ? 1 : 0;
    });
    std::vector<std::uint64_t> out;
    for (std::uint64_t i = 1; i < phi; ++i)
        if (pass[i])
            out.push_back(i);
    return out;
}

// ---------------------------------------------------------------------------

double sup_distance(const Character& chi, const std::vector<cplx>& F, const RegionGrid& grid)
{
    if (F.size() != grid.size())
        throw PreconditionError("sup_distance: target size differs from grid size");
    const LPolynomial L = l_coeffs(chi);
    const auto us = grid.u_points();
    double worst = 0;
    for (std::size_t i = 0; i < us.size(); ++i)
        worst = std::max(worst, std::abs(L.eval(us[i]) - F[i]));
    return worst;
}

double sup_distance(const Character& chi, const TargetFunction& target, const RegionGrid& grid)
{
    return sup_distance(chi, target.values(grid), grid);
}

std::vector<double> sup_distances(const LCoeffMatrix& M, std::span<const std::uint64_t> indices,
                                  const std::vector<cplx>& F, const RegionGrid& grid, unsigned workers)
{
    if (F.size() != grid.size())
        throw PreconditionError("sup_distances: target size differs from grid size");
    const auto us = grid.u_points();
    std::vector<double> out(indices.size(), 0.0);
    parallel_for(indices.size(), workers, [&](std::uint64_t k) {
        const std::uint64_t r = indices[k];
        if (r >= M.rows)
            throw PreconditionError("sup_distances: character index out of range");
        const cplx* c = M.row(r);
        double worst = 0;
        for (std::size_t i = 0; i < us.size(); ++i)
            worst = std::max(worst, std::abs(horner(c, M.cols, us[i]) - F[i]));
        out[k] = worst;
    });
    return out;
}

SearchReport universality_search(const GroupPtr& group, const TargetFunction& target, const RegionGrid& grid,
                                 double epsilon, unsigned workers)
{
    const auto t0 = std::chrono::steady_clock::now();
    if (group->q() != grid.q())
        throw PreconditionError("universality_search: grid built for another q");
    if (group->phi() > kMaxSearchCharacters)
        throw CapacityError("universality_search: phi(Q) = " + std::to_string(group->phi()) +
                            " exceeds the exhaustive limit " + std::to_string(kMaxSearchCharacters) +
                            "; use guided_search");
    const auto tv = target_values(target, grid);
    SearchReport r;
    r.Q = group->ring().to_string(group->modulus());
    r.target_id = target.id();
    r.grid_id = grid.description();
    r.phi = group->phi();
    r.epsilon = epsilon;
    r.min_target_modulus = tv.min_modulus;
    const auto M = l_coeffs_all(group);
    for (std::uint64_t i = 1; i < r.phi; ++i)
        r.indices.push_back(i);
    r.distances = sup_distances(M, r.indices, tv.F, grid, workers);
    summarize(r);
    r.seconds = elapsed(t0);
    return r;
}

SearchReport guided_search(const GroupPtr& group, const TargetFunction& target, const RegionGrid& grid,
                           double epsilon, const GuidedOptions& opt, unsigned workers)
{
    const auto t0 = std::chrono::steady_clock::now();
    if (group->q() != grid.q())
        throw PreconditionError("guided_search: grid built for another q");
    if (opt.mu < 0)
        throw PreconditionError("guided_search: mu < 0");
    const int degQ = group->degQ();
    std::optional<ParamSet> dp;
    if (!opt.rho || !opt.K || !opt.delta)
        dp = def_pars(group->q(), degQ);
    SearchReport r;
    r.guided = true;
    r.mu = opt.mu;
    r.rho = opt.rho ? *opt.rho : dp->rho_degree();
    r.K = opt.K ? *opt.K : dp->K;
    r.delta = opt.delta ? *opt.delta : dp->delta;
    if (!(r.delta > 0))
        throw PreconditionError("guided_search: delta must be positive");
    const auto tv = target_values(target, grid);
    r.Q = group->ring().to_string(group->modulus());
    r.target_id = target.id();
    r.grid_id = grid.description();
    r.phi = group->phi();
    r.epsilon = epsilon;
    r.min_target_modulus = tv.min_modulus;

    // fit log F - f1 on the window (mu, rho]
    PhaseAssignment phases(group);
    const auto f1 = f1_target(group, grid, r.mu, r.K);
    if (r.rho > r.mu && !PhaseAssignment::window(group, r.mu, r.rho).empty()) {
        std::vector<cplx> rhs(tv.logF.size());
        for (std::size_t i = 0; i < rhs.size(); ++i)
            rhs[i] = tv.logF[i] - f1[i];
        auto fit = fit_phases(rhs, grid, group, r.mu, r.rho, opt.fit);
        r.fit_error = fit.sup_error;
        phases = std::move(fit.phases);
    } else {
        double m = 0;
        for (std::size_t i = 0; i < f1.size(); ++i)
            m = std::max(m, std::abs(tv.logF[i] - f1[i]));
        r.fit_error = m;
    }
    r.phases = phases.serialize();

    r.matched = opt.match_within_degree;
    r.indices = character_sieve(phases, r.delta, r.mu, workers, r.matched);
    r.sieve_size = r.indices.size();
    if (opt.compare) {
        if (r.phi > kMaxSearchCharacters)
            throw CapacityError("guided_search: comparison needs the exhaustive path, phi(Q) = " +
                                std::to_string(r.phi) + " exceeds " + std::to_string(kMaxSearchCharacters) +
                                "; set compare off");
        const auto M = l_coeffs_all(group);
        std::vector<std::uint64_t> all;
        for (std::uint64_t i = 1; i < r.phi; ++i)
            all.push_back(i);
        const auto dall = sup_distances(M, all, tv.F, grid, workers);
        double sum = 0, best = std::numeric_limits<double>::infinity();
        std::uint64_t bi = 0;
        for (std::size_t k = 0; k < all.size(); ++k) {
            sum += dall[k];
            if (dall[k] < best) {
                best = dall[k];
                bi = all[k];
            }
        }
        if (!all.empty()) {
            r.exhaustive_best_index = bi;
            r.exhaustive_best_distance = best;
            r.exhaustive_mean_distance = sum / static_cast<double>(all.size());
        }
        r.distances.reserve(r.indices.size());
        for (auto i : r.indices)
            r.distances.push_back(dall[i - 1]);
    } else {
        r.distances.assign(r.indices.size(), 0.0);
        parallel_for(r.indices.size(), workers, [&](std::uint64_t k) {
            r.distances[k] = sup_distance(character_at(group, r.indices[k]), tv.F, grid);
        });
    }
    summarize(r);
    r.seconds = elapsed(t0);
    return r;
}

// ---------------------------------------------------------------------------

std::vector<double> f3_sup(const GroupPtr& group, const RegionGrid& grid, int rho, int K, unsigned workers)
{
    const std::uint64_t phi = group->phi();
    std::vector<double> out(phi, 0.0);
    if (K <= rho)
        return out;
    const int lo = std::max(rho, 0) + 1;
    PrimeResidues pr(group, K);
    const auto us = grid.u_points();
    const auto& G = *group;
    // |P|^{-s} = u^{deg P}: per degree d, sum_{deg P = d} chi(P) is one number.
    std::vector<std::vector<cplx>> w(static_cast<std::size_t>(K) + 1);
    for (int d = lo; d <= K; ++d)
        for (const auto& u : us)
            w[static_cast<std::size_t>(d)].push_back(std::pow(u, d));
    parallel_for(phi, workers, [&](std::uint64_t i) {
        const auto m = G.unflatten(i);
        std::vector<cplx> S(static_cast<std::size_t>(K) + 1, 0.0);
        for (int d = lo; d <= K; ++d)
            for (auto r : pr.residues(d))
                S[static_cast<std::size_t>(d)] += unit_root(static_cast<std::uint64_t>(G.angle(m, r)), G.exponent());
        double worst = 0;
        for (std::size_t p = 0; p < us.size(); ++p) {
            cplx v = 0;
            for (int d = lo; d <= K; ++d)
                v += S[static_cast<std::size_t>(d)] * w[static_cast<std::size_t>(d)][p];
            worst = std::max(worst, std::abs(v));
        }
        out[i] = worst;
    });
    return out;
}

SplitReport good_bad_split(const PhaseAssignment& assignment, const PeakPolynomial& f, double epsilon,
                           const RegionGrid& grid, int mu, int rho, int K, unsigned workers)
{
    const auto& gp = assignment.group_ptr();
    SplitReport r;
    r.phi = gp->phi();
    r.mu = mu;
    r.rho = rho;
    r.K = K;
    r.d = grid.min_distance_to_critical();
    if (!(r.d > 0))
        throw PreconditionError("good_bad_split: grid touches the critical line (d = " + num15(r.d) + ")");
    r.threshold = std::pow(static_cast<double>(gp->degQ()), -r.d / 2);
    const auto M = f3_sup(gp, grid, rho, K, workers);
    std::vector<double> hp(r.phi, 0.0);
    parallel_for(r.phi > 0 ? r.phi - 1 : 0, workers, [&](std::uint64_t k) {
        hp[k + 1] = std::max(0.0, h_func(character_at(gp, k + 1), assignment, f, epsilon));
    });
    for (std::uint64_t i = 1; i < r.phi; ++i) {
        r.max_M = std::max(r.max_M, M[i]);
        if (M[i] <= r.threshold) {
            ++r.good;
            r.mass_good += hp[i];
        } else {
            ++r.bad;
            r.mass_bad += hp[i];
        }
    }
    r.main = std::pow(kappa(f), static_cast<double>(assignment.size())) * static_cast<double>(r.phi);
    r.ratio_good = r.mass_good / r.main;
    r.ratio_bad = r.mass_bad / r.main;
    return r;
}

}  // namespace ffuniv
