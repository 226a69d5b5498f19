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

#include "ffuniv/approximation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "ffuniv/arith.hpp"
#include "ffuniv/error.hpp"
#include "ffuniv/parallel.hpp"

namespace ffuniv {

namespace {

constexpr double kPi = std::numbers::pi;

cplx e_of(double x)
{
    return std::polar(1.0, 2.0 * kPi * x);
}

double frac(double x)
{
    x -= std::floor(x);
    return x >= 1.0 ? 0.0 : x;
}

// Ordered reduction of per-block partial sums so results do not depend on
// the worker count.
constexpr std::uint64_t kBlock = 1024;

template <class Fn>
std::vector<double> blocked_sums(std::uint64_t n, unsigned workers, int width, Fn&& per_index)
{
    const std::uint64_t nb = (n + kBlock - 1) / kBlock;
    std::vector<double> partial(nb * static_cast<std::uint64_t>(width), 0.0);
    parallel_for(nb, workers, [&](std::uint64_t b) {
        std::vector<double> acc(static_cast<std::size_t>(width), 0.0);
        const std::uint64_t hi = std::min(n, (b + 1) * kBlock);
        for (std::uint64_t i = b * kBlock; i < hi; ++i)
            per_index(i, acc);
        for (int w = 0; w < width; ++w)
            partial[b * static_cast<std::uint64_t>(width) + static_cast<std::uint64_t>(w)] = acc[static_cast<std::size_t>(w)];
    });
    std::vector<double> total(static_cast<std::size_t>(width), 0.0);
    for (std::uint64_t b = 0; b < nb; ++b)
        for (int w = 0; w < width; ++w)
            total[static_cast<std::size_t>(w)] += partial[b * static_cast<std::uint64_t>(width) + static_cast<std::uint64_t>(w)];
    return total;
}

// |f(phase - theta)|^2 for every entry of the assignment at character index i.
void peak_factors(const UnitGroup& G, const PhaseAssignment& phases, const PeakPolynomial& f,
                  const std::vector<std::uint32_t>& m, std::vector<double>& out)
{
    const double L = static_cast<double>(G.exponent());
    out.resize(phases.size());
    for (std::size_t j = 0; j < phases.size(); ++j) {
        const auto& e = phases.entries()[j];
        const double ph = static_cast<double>(G.angle(m, e.residue)) / L;
        const double v = f.abs_at(ph - e.theta);
        out[j] = v * v;
    }
}

double g_from(const std::vector<double>& F)
{
    double g = 1.0;
    for (double v : F)
        g *= v;
    return g;
}

double h_from(const std::vector<double>& F, double eps)
{
    double g = 1.0;
    for (double v : F)
        g *= v;
    double loo = 0;
    for (std::size_t j = 0; j < F.size(); ++j) {
        double p = 1.0;
        for (std::size_t i = 0; i < F.size(); ++i)
            if (i != j)
                p *= F[i];
        loo += p;
    }
    return g - eps * loo;
}

}  // namespace

// ---------------------------------------------------------------------------

cplx PeakPolynomial::eval(double theta) const
{
    theta = frac(theta);
    if (binomial_)
        return std::pow(0.5 * (1.0 + e_of(theta)), K_);
    const double x = std::clamp(a_ * std::cos(2 * kPi * theta) + a_ - 1.0, -1.0, 1.0 + 2 * a_);
    double t;
    if (x <= 1.0) {
        t = std::cos(m_ * std::acos(x)) * inv_T0_;
    } else {
        const double A = std::acosh(x);
        t = std::exp(m_ * (A - A0_)) * (1.0 + std::exp(-2.0 * m_ * A)) / (1.0 + std::exp(-2.0 * m_ * A0_));
    }
    cplx v = std::polar(t, 2 * kPi * m_ * theta);
    if (K_ % 2 == 1)
        v *= 0.5 * (1.0 + e_of(theta));
    return v;
}

cplx PeakPolynomial::eval_series(double theta) const
{
    const cplx w = e_of(frac(theta));
    cplx acc = 0;
    for (std::size_t k = c_.size(); k-- > 0;)
        acc = acc * w + c_[k];
    return acc;
}

PeakCertificate certify_peak(const PeakPolynomial& f, int grid_points)
{
    PeakCertificate c;
    c.grid_points = grid_points;
    cplx s = 0;
    for (const auto& x : f.coeffs())
        s += x;
    c.value_at_zero = std::abs(s - 1.0);
    c.bound = 2.0 * std::exp(-kPi * f.K() * f.delta());
    c.analytic_bound = f.analytic_bound();
    for (int j = 0; j < grid_points; ++j) {
        const double th = static_cast<double>(j) / grid_points;
        const cplx v = f.eval(th);
        const double a = std::abs(v);
        if (a > c.grid_max) {
            c.grid_max = a;
            c.argmax = th;
        }
        if (th >= f.delta() && th <= 1.0 - f.delta())
            c.off_peak_max = std::max(c.off_peak_max, a);
        c.series_mismatch = std::max(c.series_mismatch, std::abs(f.eval_series(th) - v));
    }
    c.ok = c.value_at_zero < 1e-12 && c.argmax == 0.0 && std::abs(c.grid_max - 1.0) < 1e-9 &&
           c.off_peak_max <= c.bound && c.series_mismatch < 1e-14 * (f.K() + 1);
    return c;
}

PeakPolynomial peak_poly(int K, double delta)
{
    if (K < 1)
        throw PreconditionError("peak_poly: K must be >= 1");
    if (!(delta > 0 && delta <= 0.5))
        throw PreconditionError("peak_poly: delta must lie in (0, 1/2]");
    PeakPolynomial f;
    f.K_ = K;
    f.delta_ = delta;
    f.m_ = K / 2;
    if (delta == 0.5) {
        f.binomial_ = true;
        f.analytic_ = 0.0;
    } else {
        f.a_ = 2.0 / (1.0 + std::cos(2 * kPi * delta));
        // same expression as eval() at theta = 0 so that f(0) is exactly 1
        f.A0_ = std::acosh(f.a_ + f.a_ - 1.0);
        f.inv_T0_ = 2.0 * std::exp(-f.m_ * f.A0_) / (1.0 + std::exp(-2.0 * f.m_ * f.A0_));
        f.analytic_ = f.inv_T0_;
        if (K % 2 == 1)
            f.analytic_ *= std::cos(kPi * delta);
    }
    // K + 1 samples determine the K + 1 coefficients
    const int N = K + 1;
    std::vector<cplx> samples(static_cast<std::size_t>(N));
    for (int j = 0; j < N; ++j)
        samples[static_cast<std::size_t>(j)] = f.eval(static_cast<double>(j) / N);
    f.c_.assign(static_cast<std::size_t>(N), 0.0);
    for (int k = 0; k < N; ++k) {
        std::complex<long double> acc = 0;
        for (int j = 0; j < N; ++j) {
            const long double t = -2.0L * std::numbers::pi_v<long double> * static_cast<long double>((k * j) % N) / N;
            const auto& v = samples[static_cast<std::size_t>(j)];
            acc += std::complex<long double>(v.real(), v.imag()) * std::polar(1.0L, t);
        }
        acc /= static_cast<long double>(N);
        f.c_[static_cast<std::size_t>(k)] = {static_cast<double>(acc.real()), static_cast<double>(acc.imag())};
    }
    const auto cert = certify_peak(f);
    if (!cert.ok) {
        char buf[320];
        std::snprintf(buf, sizeof buf,
                      "peak_poly: K=%d delta=%.6g not certified: off-peak max %.6g vs bound %.6g, "
                      "|f(0)-1| %.3g, argmax %.6g, series mismatch %.3g",
                      K, delta, cert.off_peak_max, cert.bound, cert.value_at_zero, cert.argmax,
                      cert.series_mismatch);
        throw ConstructionError(buf);
    }
    return f;
}

double kappa(const PeakPolynomial& f)
{
    double s = 0;
    for (const auto& c : f.coeffs())
        s += std::norm(c);
    return s;
}

double kappa_quadrature(const PeakPolynomial& f, int nodes)
{
    double s = 0;
    for (int j = 0; j < nodes; ++j)
        s += std::norm(f.eval(static_cast<double>(j) / nodes));
    return s / nodes;
}

// ---------------------------------------------------------------------------

ParamSet def_pars(std::uint32_t q, int degQ)
{
    if (degQ < 2)
        throw PreconditionError("def_pars: deg Q must be >= 2");
    ParamSet p;
    p.rho = std::log(static_cast<double>(degQ)) / std::log(static_cast<double>(q));
    p.K = static_cast<int>(std::floor(degQ / (2.0 * p.rho)));
    p.delta = p.rho * p.rho / degQ;
    if (p.K < 1 || !(p.delta > 0 && p.delta <= 0.5))
        throw PreconditionError("def_pars: q=" + std::to_string(q) + " deg Q=" + std::to_string(degQ) +
                                " gives K=" + std::to_string(p.K) + ", delta=" + std::to_string(p.delta));
    return p;
}

double norm_of_degree(std::uint32_t q, double degree)
{
    return std::pow(static_cast<double>(q), degree);
}

double degree_of_norm(std::uint32_t q, double norm)
{
    return std::log(norm) / std::log(static_cast<double>(q));
}

// ---------------------------------------------------------------------------

PhaseAssignment PhaseAssignment::window(GroupPtr group, int mu, int rho)
{
    PhaseAssignment pa(group);
    if (rho <= mu || rho < 1)
        return pa;
    PrimeResidues pr(group, rho);
    for (int d = std::max(mu + 1, 1); d <= rho; ++d)
        for (std::size_t i = 0; i < pr.primes(d).size(); ++i)
            pa.entries_.push_back({pr.primes(d)[i], d, pr.residues(d)[i], 0.0});
    return pa;
}

void PhaseAssignment::add(const Poly& P, double theta)
{
    const auto& R = group_->ring();
    if (P.is_zero() || !P.is_monic() || P.deg() < 1 || !irreducible_test(R, P))
        throw PreconditionError("phase key " + R.to_string(P) + " is not a prime");
    const std::uint64_t r = group_->reduce(P);
    if (group_->flat_of(r) < 0)
        throw PreconditionError("phase key " + R.to_string(P) + " divides Q");
    for (const auto& e : entries_)
        if (e.P == P)
            throw PreconditionError("phase key " + R.to_string(P) + " repeated");
    entries_.push_back({P, P.deg(), r, frac(theta)});
}

void PhaseAssignment::set_theta(std::size_t i, double theta)
{
    entries_.at(i).theta = frac(theta);
}

std::string PhaseAssignment::serialize() const
{
    std::string out;
    char buf[64];
    for (const auto& e : entries_) {
        std::snprintf(buf, sizeof buf, " %.17g\n", e.theta);
        out += group_->ring().to_string(e.P) + buf;
    }
    return out;
}

PhaseAssignment PhaseAssignment::parse(GroupPtr group, const std::string& text)
{
    PhaseAssignment pa(group);
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        const auto cut = line.find_last_of(' ');
        if (cut == std::string::npos)
            throw ParseError("phases line " + std::to_string(lineno) + ": expected 'P-text theta'");
        double th;
        try {
            std::size_t used = 0;
            th = std::stod(line.substr(cut + 1), &used);
            if (used != line.size() - cut - 1)
                throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw ParseError("phases line " + std::to_string(lineno) + ": bad theta");
        }
        pa.add(group->ring().parse(line.substr(0, cut)), th);
    }
    return pa;
}

double char_phase(const Character& chi, std::uint64_t residue)
{
    const auto a = chi.group().angle(chi.exps(), residue);
    if (a < 0)
        throw PreconditionError("char_phase: residue not coprime to Q");
    return static_cast<double>(a) / static_cast<double>(chi.group().exponent());
}

double circle_dist(double x)
{
    const double f = frac(x);
    return std::min(f, 1.0 - f);
}

double g_func(const Character& chi, const PhaseAssignment& phases, const PeakPolynomial& f)
{
    std::vector<double> F;
    peak_factors(chi.group(), phases, f, chi.exps(), F);
    return g_from(F);
}

double h_func(const Character& chi, const PhaseAssignment& phases, const PeakPolynomial& f, double epsilon)
{
    if (!(epsilon > 0))
        throw PreconditionError("h_func: epsilon must be positive");
    std::vector<double> F;
    peak_factors(chi.group(), phases, f, chi.exps(), F);
    return h_from(F, epsilon);
}

double default_epsilon(const PeakPolynomial& f, EpsilonBase base, std::uint32_t q)
{
    const double x = 2.0 * kPi * f.K() * f.delta();
    if (base == EpsilonBase::E)
        return 4.0 * std::exp(-x);
    if (q < 3)
        throw PreconditionError("default_epsilon: base q needs q");
    return 4.0 * std::pow(static_cast<double>(q), -x);
}

// ---------------------------------------------------------------------------

MVGReport mv_g_experiment(const PhaseAssignment& phases, const PeakPolynomial& f, unsigned workers)
{
    const UnitGroup& G = phases.group();
    MVGReport r;
    r.phi = G.phi();
    r.n_primes = phases.size();
    r.K = f.K();
    r.kappa = kappa(f);
    const auto tot = blocked_sums(r.phi, workers, 1, [&](std::uint64_t i, std::vector<double>& acc) {
        if (i == 0)
            return;
        std::vector<double> F;
        peak_factors(G, phases, f, G.unflatten(i), F);
        acc[0] += g_from(F);
    });
    r.lhs = tot[0];
    const double kp = std::pow(r.kappa, static_cast<double>(r.n_primes));
    r.main = static_cast<double>(r.phi) * kp;
    r.error_scale = std::pow(static_cast<double>(r.n_primes), r.K) * kp;
    if (r.n_primes == 0)
        r.error_scale = kp;
    r.discrepancy = std::abs(r.lhs - r.main) / r.error_scale;
    return r;
}

MVHReport mv_h_experiment(const PhaseAssignment& phases, const PeakPolynomial& f, double epsilon, unsigned workers)
{
    if (!(epsilon > 0))
        throw PreconditionError("mv_h_experiment: epsilon must be positive");
    const UnitGroup& G = phases.group();
    MVHReport r;
    r.phi = G.phi();
    r.n_primes = phases.size();
    r.degQ = G.degQ();
    r.kappa = kappa(f);
    r.epsilon = epsilon;
    const auto tot = blocked_sums(r.phi, workers, 3, [&](std::uint64_t i, std::vector<double>& acc) {
        if (i == 0)
            return;
        std::vector<double> F;
        peak_factors(G, phases, f, G.unflatten(i), F);
        const double h = h_from(F, epsilon);
        acc[0] += h;
        acc[1] += std::max(h, 0.0);
        acc[2] += g_from(F);
    });
    r.lhs = tot[0];
    r.lhs_plus = tot[1];
    r.lhs_g = tot[2];
    r.main = static_cast<double>(r.phi) * std::pow(r.kappa, static_cast<double>(r.n_primes));
    r.rel_error = r.lhs / r.main - 1.0;
    r.rel_error_plus = r.lhs_plus / r.main - 1.0;
    r.scaled_error = std::abs(r.rel_error_plus) * r.degQ;
    return r;
}

MVTailReport mv_tail_experiment(const PhaseAssignment& phases, const PeakPolynomial& f, int rho, cplx s, int z,
                                const PrimeCoefficient& b, unsigned workers)
{
    if (rho < 1 || z <= rho)
        throw PreconditionError("mv_tail_experiment: need 1 <= rho < z");
    const double sigma = s.real();
    if (!(sigma > 0.5))
        throw PreconditionError("mv_tail_experiment: sigma must exceed 1/2");
    const UnitGroup& G = phases.group();
    const double q = static_cast<double>(G.q());
    const double lq = std::log(q);
    PrimeResidues pr(phases.group_ptr(), z);
    std::vector<std::uint64_t> res;
    std::vector<cplx> coef;
    for (int d = rho + 1; d <= z; ++d)
        for (std::size_t i = 0; i < pr.primes(d).size(); ++i) {
            const cplx c = b ? b(pr.primes(d)[i], d, s) : std::exp(-static_cast<double>(d) * lq * s);
            if (std::abs(c) > std::pow(q, -d * sigma) * (1 + 1e-12))
                throw PreconditionError("mv_tail_experiment: |b_P(s)| exceeds |P|^-sigma for " +
                                        G.ring().to_string(pr.primes(d)[i]));
            res.push_back(pr.residues(d)[i]);
            coef.push_back(c);
        }
    MVTailReport r;
    r.phi = G.phi();
    r.rho = rho;
    r.z = z;
    r.s = s;
    r.tail_primes = res.size();
    const double L = static_cast<double>(G.exponent());
    const auto tot = blocked_sums(r.phi, workers, 1, [&](std::uint64_t i, std::vector<double>& acc) {
        const auto m = G.unflatten(i);
        std::vector<double> F;
        peak_factors(G, phases, f, m, F);
        cplx t = 0;
        for (std::size_t j = 0; j < res.size(); ++j)
            t += coef[j] * e_of(static_cast<double>(G.angle(m, res[j])) / L);
        acc[0] += g_from(F) * std::norm(t);
    });
    r.lhs = tot[0];
    r.bound = static_cast<double>(r.phi) * std::pow(kappa(f), static_cast<double>(phases.size())) *
              std::pow(q, rho * (1.0 - 2.0 * sigma)) / rho;
    r.ratio = r.lhs / r.bound;
    return r;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::uint64_t> lambda_multiplicities(const PolyRing& R, const Poly& Q, int maxd)
{
    std::vector<std::uint64_t> mult(static_cast<std::size_t>(maxd) + 1, 0);
    const auto fac = factorize(R, Q);
    for (int d = 1; d <= maxd; ++d) {
        std::uint64_t m = prime_count(R.q(), d);
        for (const auto& [P, e] : fac.factors)
            if (P.deg() == d)
                --m;
        mult[static_cast<std::size_t>(d)] = m;
    }
    return mult;
}

std::uint64_t count_upto(const std::vector<std::uint64_t>& mult, double lq, double x)
{
    std::uint64_t n = 0;
    for (std::size_t d = 1; d < mult.size(); ++d)
        if (static_cast<double>(d) * lq <= x * (1 + 1e-14))
            n += mult[d];
    return n;
}

}  // namespace

std::uint64_t lambda_q_count(const PolyRing& R, const Poly& Q, double x)
{
    const double lq = std::log(static_cast<double>(R.q()));
    const int maxd = std::max(0, static_cast<int>(std::floor(x / lq + 1e-12)));
    return count_upto(lambda_multiplicities(R, Q, maxd), lq, x);
}

CountingReport counting_checks(const PolyRing& R, const Poly& Q, double x_min, double x_max, int n, double c)
{
    if (n < 1 || !(x_min > 0) || x_max < x_min)
        throw PreconditionError("counting_checks: need 0 < x_min <= x_max and n >= 1");
    const double lq = std::log(static_cast<double>(R.q()));
    const double x_top = x_max + c / (x_min * x_min);
    const int maxd = static_cast<int>(std::floor(x_top / lq + 1e-12));
    if (maxd > 40)
        throw CapacityError("counting_checks: x_max needs primes of degree " + std::to_string(maxd) + " > 40");
    CountingReport rep;
    rep.c = c;
    rep.multiplicity = lambda_multiplicities(R, Q, maxd);
    rep.min_scaled = 1e300;
    rep.max_scaled = -1e300;
    rep.min_short_ratio = 1e300;
    for (int i = 0; i < n; ++i) {
        CountingRow row;
        row.x = n == 1 ? x_min : x_min + (x_max - x_min) * i / (n - 1);
        row.N = count_upto(rep.multiplicity, lq, row.x);
        row.scaled = static_cast<double>(row.N) * row.x / std::exp(row.x);
        row.N_shift = count_upto(rep.multiplicity, lq, row.x + c / (row.x * row.x));
        row.short_ratio = static_cast<double>(row.N_shift - row.N) / (std::exp(row.x) / std::pow(row.x, 3));
        rep.min_scaled = std::min(rep.min_scaled, row.scaled);
        rep.max_scaled = std::max(rep.max_scaled, row.scaled);
        rep.min_short_ratio = std::min(rep.min_short_ratio, row.short_ratio);
        rep.rows.push_back(row);
    }
    return rep;
}

// ---------------------------------------------------------------------------

std::vector<FitResult> fit_phases_sweep(const std::vector<cplx>& target, const RegionGrid& grid,
                                        const GroupPtr& group, int mu, int rho_max, FitOptions opt)
{
    std::vector<FitResult> out;
    opt.balanced_init = true;
    for (int rho = mu + 1; rho <= rho_max; ++rho) {
        opt.warm_start = out.empty() ? nullptr : &out.back().phases;
        out.push_back(fit_phases(target, grid, group, mu, rho, opt));
    }
    return out;
}

double fit_objective(const std::vector<cplx>& target, const RegionGrid& grid, const PhaseAssignment& phases)
{
    if (target.size() != grid.size())
        throw PreconditionError("fit_objective: target size differs from grid size");
    const auto us = grid.u_points();
    double worst = 0;
    for (std::size_t i = 0; i < us.size(); ++i) {
        cplx s = 0;
        for (const auto& e : phases.entries())
            s += e_of(e.theta) * std::pow(us[i], e.degree);
        worst = std::max(worst, std::abs(target[i] - s));
    }
    return worst;
}

FitResult fit_phases(const std::vector<cplx>& target, const RegionGrid& grid, const GroupPtr& group, int mu,
                     int rho, const FitOptions& opt)
{
    if (target.size() != grid.size())
        throw PreconditionError("fit_phases: target size differs from grid size");
    auto phases = PhaseAssignment::window(group, mu, rho);
    if (phases.empty())
        throw PreconditionError("fit_phases: window (" + std::to_string(mu) + ", " + std::to_string(rho) +
                                "] holds no primes coprime to Q");
    {
        std::vector<char> seeded(phases.size(), 0);
        if (opt.warm_start)
            for (std::size_t i = 0; i < phases.size(); ++i)
                for (const auto& w : opt.warm_start->entries())
                    if (w.P == phases.entries()[i].P) {
                        phases.set_theta(i, w.theta);
                        seeded[i] = 1;
                    }
        if (opt.balanced_init)
            for (int d = 1; d <= rho; ++d) {
                std::vector<std::size_t> fresh;
                for (std::size_t i = 0; i < phases.size(); ++i)
                    if (!seeded[i] && phases.entries()[i].degree == d)
                        fresh.push_back(i);
                for (std::size_t j = 0; j < fresh.size(); ++j)
                    phases.set_theta(fresh[j], static_cast<double>(j) / static_cast<double>(fresh.size()));
            }
    }
    const auto us = grid.u_points();
    const std::size_t np = us.size();
    // atom weights |P|^{-s} = u^{deg P} per degree
    std::vector<std::vector<cplx>> w(static_cast<std::size_t>(rho) + 1);
    for (int d = 1; d <= rho; ++d)
        for (const auto& u : us)
            w[static_cast<std::size_t>(d)].push_back(std::pow(u, d));
    // residual r = target - current sum
    std::vector<cplx> r(target);
    for (const auto& e : phases.entries())
        for (std::size_t i = 0; i < np; ++i)
            r[i] -= e_of(e.theta) * w[static_cast<std::size_t>(e.degree)][i];

    auto sup = [&](const std::vector<cplx>& base, const std::vector<cplx>& wd, double th) {
        const cplx z = e_of(th);
        double m = 0;
        for (std::size_t i = 0; i < np; ++i)
            m = std::max(m, std::abs(base[i] - z * wd[i]));
        return m;
    };
    auto current = [&] {
        double m = 0;
        for (const auto& v : r)
            m = std::max(m, std::abs(v));
        return m;
    };

    FitResult res{phases, 0, {}};
    double obj = current();
    res.history.push_back(obj);
    std::vector<cplx> base(np);
    const double phi = (std::sqrt(5.0) - 1) / 2;
    for (int sweep = 0; sweep < opt.max_sweeps; ++sweep) {
        const double before = obj;
        for (std::size_t j = 0; j < phases.size(); ++j) {
            const auto& e = phases.entries()[j];
            const auto& wd = w[static_cast<std::size_t>(e.degree)];
            const cplx zold = e_of(e.theta);
            for (std::size_t i = 0; i < np; ++i)
                base[i] = r[i] + zold * wd[i];
            double best_t = e.theta, best_v = obj;
            int best_j = -1;
            double scan_v = 1e300;
            for (int k = 0; k < opt.scan_points; ++k) {
                const double v = sup(base, wd, static_cast<double>(k) / opt.scan_points);
                if (v < scan_v) {
                    scan_v = v;
                    best_j = k;
                }
            }
            // golden section inside the bracket around the best scan point
            double lo = static_cast<double>(best_j - 1) / opt.scan_points;
            double hi = static_cast<double>(best_j + 1) / opt.scan_points;
            double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
            double f1 = sup(base, wd, x1), f2 = sup(base, wd, x2);
            for (int it = 0; it < 60 && hi - lo > 1e-12; ++it) {
                if (f1 <= f2) {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - phi * (hi - lo);
                    f1 = sup(base, wd, x1);
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + phi * (hi - lo);
                    f2 = sup(base, wd, x2);
                }
            }
            const double cand[3] = {static_cast<double>(best_j) / opt.scan_points, x1, x2};
            const double cv[3] = {scan_v, f1, f2};
            for (int c = 0; c < 3; ++c)
                if (cv[c] < best_v) {
                    best_v = cv[c];
                    best_t = cand[c];
                }
            if (best_v <= obj && best_t != e.theta) {
                const double old_t = e.theta;
                const auto old_r = r;
                phases.set_theta(j, best_t);
                const cplx znew = e_of(phases.entries()[j].theta);
                for (std::size_t i = 0; i < np; ++i)
                    r[i] = base[i] - znew * wd[i];
                const double now = current();
                if (now <= obj) {
                    obj = now;
                } else {
                    phases.set_theta(j, old_t);
                    r = old_r;
                }
            }
        }
        res.history.push_back(obj);
        if (before - obj <= opt.stall * std::max(1.0, obj))
            break;
    }
    res.phases = std::move(phases);
    res.sup_error = obj;
    return res;
}

}  // namespace ffuniv
