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

#include "ffuniv/lfunctions.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>
#include <utility>

#include "ffuniv/error.hpp"
#include "ffuniv/roots.hpp"

namespace ffuniv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::mutex& fftw_planner_mutex()
{
    static std::mutex m;
    return m;
}

std::uint64_t ipow(std::uint64_t b, int e)
{
    std::uint64_t r = 1;
    for (int i = 0; i < e; ++i)
        r *= b;
    return r;
}

std::vector<double> linspace(double lo, double hi, int n)
{
    if (n < 1)
        throw PreconditionError("grid: point counts must be >= 1");
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return v;
}

std::string fmt(double x)
{
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

// Kahan-Babuska-Neumaier accumulation for complex sums.
struct NeumaierSum {
    double re = 0, im = 0, cre = 0, cim = 0;
    static void add1(double& s, double& c, double x)
    {
        const double t = s + x;
        if (std::abs(s) >= std::abs(x))
            c += (s - t) + x;
        else
            c += (x - t) + s;
        s = t;
    }
    void add(cplx z)
    {
        add1(re, cre, z.real());
        add1(im, cim, z.imag());
    }
    cplx value() const { return {re + cre, im + cim}; }
};

// Sum of chi over a list of residues, exact histogram when the exponent is small.
class AngleAccumulator {
public:
    explicit AngleAccumulator(std::uint64_t L) : L_(L)
    {
        if (L_ <= 360)
            hist_.assign(L_, 0);
    }
    void add(std::uint64_t num)
    {
        if (!hist_.empty())
            ++hist_[num];
        else
            sum_.add(unit_root(num, L_));
    }
    cplx value() const
    {
        if (hist_.empty())
            return sum_.value();
        NeumaierSum s;
        for (std::uint64_t a = 0; a < L_; ++a)
            if (hist_[a] != 0)
                s.add(static_cast<double>(hist_[a]) * unit_root(a, L_));
        return s.value();
    }

private:
    std::uint64_t L_;
    std::vector<std::int64_t> hist_;
    NeumaierSum sum_;
};

void require_nonprincipal(const Character& chi, const char* what)
{
    if (chi.is_principal())
        throw UnsupportedError(std::string(what) + ": principal character; use zeta_q");
}

}  // namespace

// ---------------------------------------------------------------------------

cplx u_of_s(std::uint32_t q, cplx s)
{
    return std::exp(-s * std::log(static_cast<double>(q)));
}

cplx s_of_u(std::uint32_t q, cplx u)
{
    if (u == cplx(0))
        throw DomainError("s_of_u: u = 0");
    const double lq = std::log(static_cast<double>(q));
    double t = std::fmod(-std::arg(u), kTwoPi);
    if (t < 0)
        t += kTwoPi;
    if (t >= kTwoPi)
        t = 0;
    return {-std::log(std::abs(u)) / lq, t / lq};
}

// ---------------------------------------------------------------------------

RegionGrid::RegionGrid(std::uint32_t q, Plane plane, std::vector<cplx> points, std::string desc)
    : q_(q), plane_(plane), points_(std::move(points)), desc_(std::move(desc))
{
    if (points_.empty())
        throw PreconditionError("grid: no points");
    std::set<std::pair<double, double>> seen;
    const double lq = std::log(static_cast<double>(q_));
    for (const auto& z : points_) {
        if (!seen.insert({z.real(), z.imag()}).second)
            throw PreconditionError("grid: duplicate point " + fmt(z.real()) + "+" + fmt(z.imag()) + "j");
        if (plane_ == Plane::U) {
            const double r = std::abs(z);
            if (!(r > 1.0 / q_ && r < 1.0 / std::sqrt(static_cast<double>(q_))))
                throw DomainError("grid: |u| = " + fmt(r) + " outside 1/q < |u| < q^-1/2");
        } else {
            if (!(z.real() > 0.5 && z.real() < 1.0 && z.imag() > 0 && z.imag() < kTwoPi / lq))
                throw DomainError("grid: s = " + fmt(z.real()) + "+" + fmt(z.imag()) +
                                  "j outside the open rectangle 1/2 < sigma < 1, 0 < t < 2 pi / log q");
        }
    }
}

RegionGrid RegionGrid::annulus(std::uint32_t q, double r_lo, double r_hi, int n_r, double ang_lo,
                               double ang_hi, int n_ang)
{
    const auto rs = linspace(r_lo, r_hi, n_r);
    const auto as = linspace(ang_lo, ang_hi, n_ang);
    std::vector<cplx> pts;
    pts.reserve(rs.size() * as.size());
    for (std::size_t i = 0; i < rs.size(); ++i)
        for (std::size_t j = 0; j < as.size(); ++j) {
            const double a = (i % 2 == 0) ? as[j] : as[as.size() - 1 - j];
            pts.push_back(std::polar(rs[i], a));
        }
    std::string d = "annulus r=[" + fmt(r_lo) + "," + fmt(r_hi) + "]x" + std::to_string(n_r) + " angle=[" +
                    fmt(ang_lo) + "," + fmt(ang_hi) + "]x" + std::to_string(n_ang);
    return RegionGrid(q, Plane::U, std::move(pts), std::move(d));
}

RegionGrid RegionGrid::rectangle(std::uint32_t q, double sig_lo, double sig_hi, int n_sig, double t_lo,
                                 double t_hi, int n_t)
{
    const auto ss = linspace(sig_lo, sig_hi, n_sig);
    const auto ts = linspace(t_lo, t_hi, n_t);
    std::vector<cplx> pts;
    pts.reserve(ss.size() * ts.size());
    for (std::size_t i = 0; i < ss.size(); ++i)
        for (std::size_t j = 0; j < ts.size(); ++j) {
            const double t = (i % 2 == 0) ? ts[j] : ts[ts.size() - 1 - j];
            pts.emplace_back(ss[i], t);
        }
    std::string d = "rectangle sigma=[" + fmt(sig_lo) + "," + fmt(sig_hi) + "]x" + std::to_string(n_sig) +
                    " t=[" + fmt(t_lo) + "," + fmt(t_hi) + "]x" + std::to_string(n_t);
    return RegionGrid(q, Plane::S, std::move(pts), std::move(d));
}

RegionGrid RegionGrid::default_u(std::uint32_t q)
{
    const double qd = static_cast<double>(q);
    return annulus(q, std::pow(qd, -0.85), std::pow(qd, -0.65), 10, 0.0, 0.8 * std::numbers::pi, 20);
}

RegionGrid RegionGrid::default_s(std::uint32_t q)
{
    const double T = kTwoPi / std::log(static_cast<double>(q));
    return rectangle(q, 0.6, 0.9, 10, 0.1 * T, 0.9 * T, 20);
}

RegionGrid RegionGrid::from_points(std::uint32_t q, Plane plane, std::vector<cplx> points,
                                   std::string description)
{
    return RegionGrid(q, plane, std::move(points), std::move(description));
}

std::vector<cplx> RegionGrid::u_points() const
{
    if (plane_ == Plane::U)
        return points_;
    std::vector<cplx> out;
    out.reserve(points_.size());
    for (const auto& s : points_)
        out.push_back(u_of_s(q_, s));
    return out;
}

double RegionGrid::min_distance_to_critical() const
{
    const double lq = std::log(static_cast<double>(q_));
    double d = 1e300;
    for (const auto& z : points_) {
        const double sigma = plane_ == Plane::S ? z.real() : -std::log(std::abs(z)) / lq;
        d = std::min(d, sigma - 0.5);
    }
    return d;
}

double RegionGrid::max_abs_u() const
{
    double m = 0;
    for (const auto& u : u_points())
        m = std::max(m, std::abs(u));
    return m;
}

// ---------------------------------------------------------------------------

PrimeResidues::PrimeResidues(GroupPtr group, int max_degree) : group_(std::move(group))
{
    if (max_degree < 0)
        throw PreconditionError("PrimeResidues: negative degree");
    if (max_degree == 0)
        return;
    PrimeTable table(group_->ring(), max_degree);
    primes_.resize(static_cast<std::size_t>(max_degree));
    res_.resize(static_cast<std::size_t>(max_degree));
    for (int d = 1; d <= max_degree; ++d) {
        for (const auto& P : table.of_degree(d)) {
            const std::uint64_t r = group_->reduce(P);
            if (group_->flat_of(r) < 0)
                continue;
            primes_[static_cast<std::size_t>(d - 1)].push_back(P);
            res_[static_cast<std::size_t>(d - 1)].push_back(r);
        }
    }
}

const std::vector<Poly>& PrimeResidues::primes(int d) const
{
    if (d < 1 || d > max_degree())
        throw PreconditionError("PrimeResidues: degree " + std::to_string(d) + " not tabulated");
    return primes_[static_cast<std::size_t>(d - 1)];
}

const std::vector<std::uint64_t>& PrimeResidues::residues(int d) const
{
    if (d < 1 || d > max_degree())
        throw PreconditionError("PrimeResidues: degree " + std::to_string(d) + " not tabulated");
    return res_[static_cast<std::size_t>(d - 1)];
}

// ---------------------------------------------------------------------------

int LPolynomial::observed_degree(double tol) const
{
    for (int n = degree_bound(); n > 0; --n)
        if (std::abs(coeffs[static_cast<std::size_t>(n)]) > tol)
            return n;
    return 0;
}

cplx LPolynomial::eval(cplx u) const
{
    cplx acc = 0;
    for (std::size_t i = coeffs.size(); i-- > 0;)
        acc = acc * u + coeffs[i];
    return acc;
}

LPolynomial l_coeffs(const Character& chi)
{
    require_nonprincipal(chi, "l_coeffs");
    const UnitGroup& G = chi.group();
    const int D = G.degQ() - 1;
    LPolynomial L{chi, std::vector<cplx>(static_cast<std::size_t>(D + 1))};
    for (int n = 0; n <= D; ++n) {
        AngleAccumulator acc(G.exponent());
        const std::uint64_t base = ipow(G.q(), n);
        for (std::uint64_t j = 0; j < base; ++j) {
            const auto a = G.angle(chi.exps(), base + j);
            if (a >= 0)
                acc.add(static_cast<std::uint64_t>(a));
        }
        L.coeffs[static_cast<std::size_t>(n)] = acc.value();
    }
    return L;
}

cplx monic_char_sum(const Character& chi, int n)
{
    if (n < 0)
        throw PreconditionError("monic_char_sum: negative degree");
    const UnitGroup& G = chi.group();
    AngleAccumulator acc(G.exponent());
    const std::uint64_t base = ipow(G.q(), n);
    for (std::uint64_t j = 0; j < base; ++j) {
        const std::uint64_t r = n < G.degQ() ? base + j : G.reduce(G.ring().monic_from_index(n, j));
        const auto a = G.angle(chi.exps(), r);
        if (a >= 0)
            acc.add(static_cast<std::uint64_t>(a));
    }
    return acc.value();
}

LCoeffMatrix l_coeffs_all(const GroupPtr& group)
{
    const UnitGroup& G = *group;
    const std::uint64_t phi = G.phi();
    const int D = G.degQ() - 1;
    LCoeffMatrix M;
    M.rows = phi;
    M.cols = D + 1;
    if (phi * static_cast<std::uint64_t>(D + 1) > (std::uint64_t{1} << 27))
        throw CapacityError("l_coeffs_all: phi(Q) * deg Q = " + std::to_string(phi * static_cast<std::uint64_t>(D + 1)) +
                            " exceeds 2^27 coefficients");
    M.data.assign(phi * static_cast<std::uint64_t>(D + 1), cplx(0));

    std::vector<int> dims(G.orders().begin(), G.orders().end());
    auto* in = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * phi));
    auto* out = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * phi));
    if (!in || !out) {
        fftw_free(in);
        fftw_free(out);
        throw CapacityError("l_coeffs_all: allocation of " + std::to_string(phi) + " points failed");
    }
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        plan = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), in, out, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    for (int n = 0; n <= D; ++n) {
        for (std::uint64_t i = 0; i < phi; ++i)
            in[i][0] = in[i][1] = 0.0;
        const std::uint64_t base = ipow(G.q(), n);
        for (std::uint64_t j = 0; j < base; ++j) {
            const auto f = G.flat_of(base + j);
            if (f >= 0)
                in[f][0] += 1.0;
        }
        fftw_execute(plan);
        for (std::uint64_t m = 0; m < phi; ++m)
            M.data[m * static_cast<std::uint64_t>(D + 1) + static_cast<std::uint64_t>(n)] = {out[m][0], out[m][1]};
    }
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    fftw_free(in);
    fftw_free(out);
    return M;
}

cplx zeta_q(const PolyRing& R, const Poly& Q, cplx u)
{
    const double q = static_cast<double>(R.q());
    const cplx den = 1.0 - q * u;
    if (std::abs(den) < 1e-14)
        throw DomainError("zeta_q: pole at u = 1/q");
    cplx num = 1.0;
    for (const auto& [P, e] : factorize(R, Q).factors)
        num *= 1.0 - std::pow(u, P.deg());
    return num / den;
}

// ---------------------------------------------------------------------------

const char* root_class_name(RootClass c)
{
    switch (c) {
    case RootClass::Critical: return "critical";
    case RootClass::Trivial: return "trivial";
    default: return "VIOLATION";
    }
}

int RootReport::violations() const
{
    return static_cast<int>(std::count(classes.begin(), classes.end(), RootClass::Violation));
}

RootReport roots(const LPolynomial& L)
{
    const int D = L.observed_degree();
    if (D < 1)
        throw PreconditionError("roots: L-polynomial " + L.chi.to_string() + " has degree 0");
    // alpha_j are the roots of z^D L(1/z) = sum_n c_n z^{D-n}
    std::vector<cplx> b(static_cast<std::size_t>(D + 1));
    for (int i = 0; i <= D; ++i)
        b[static_cast<std::size_t>(i)] = L.coeffs[static_cast<std::size_t>(D - i)];
    AberthOptions opt;
    const double sq = std::sqrt(static_cast<double>(L.chi.group().q()));
    opt.init_radius = sq;
    auto sol = aberth_roots(b, opt);

    RootReport rr;
    rr.observed_degree = D;
    rr.iterations = sol.iterations;
    rr.alphas = std::move(sol.roots);
    std::sort(rr.alphas.begin(), rr.alphas.end(), [](cplx x, cplx y) {
        const double ax = std::arg(x), ay = std::arg(y);
        return ax != ay ? ax < ay : std::abs(x) < std::abs(y);
    });
    for (const auto& a : rr.alphas) {
        const double m = std::abs(a);
        if (std::abs(m - sq) < kRootClassTolerance)
            rr.classes.push_back(RootClass::Critical);
        else if (std::abs(m - 1.0) < kRootClassTolerance)
            rr.classes.push_back(RootClass::Trivial);
        else
            rr.classes.push_back(RootClass::Violation);
    }
    std::vector<cplx> prod{1.0};
    for (const auto& a : rr.alphas) {
        prod.push_back(0.0);
        for (std::size_t i = prod.size() - 1; i > 0; --i)
            prod[i] -= a * prod[i - 1];
    }
    for (std::size_t n = 0; n < L.coeffs.size(); ++n) {
        const cplx c = n < prod.size() ? prod[n] : cplx(0);
        rr.reconstruction_residual = std::max(rr.reconstruction_residual, std::abs(c - L.coeffs[n]));
    }
    return rr;
}

// ---------------------------------------------------------------------------

cplx euler_product_truncated(const Character& chi, cplx u, int maxdeg)
{
    return euler_product_truncated(chi, u, maxdeg, PrimeResidues(chi.group_ptr(), std::max(maxdeg, 0)));
}

cplx euler_product_truncated(const Character& chi, cplx u, int maxdeg, const PrimeResidues& pr)
{
    const UnitGroup& G = chi.group();
    if (!(std::abs(u) < 1.0 / G.q()))
        throw DomainError("euler_product_truncated: |u| = " + fmt(std::abs(u)) + " not below 1/q");
    if (maxdeg > pr.max_degree())
        throw PreconditionError("euler_product_truncated: primes tabulated only to degree " +
                                std::to_string(pr.max_degree()));
    cplx prod = 1.0;
    cplx ud = 1.0;
    for (int d = 1; d <= maxdeg; ++d) {
        ud *= u;
        for (auto r : pr.residues(d)) {
            const auto a = static_cast<std::uint64_t>(G.angle(chi.exps(), r));
            prod /= 1.0 - unit_root(a, G.exponent()) * ud;
        }
    }
    return prod;
}

std::vector<cplx> lambda_char_sums(const Character& chi, int K, const PrimeResidues& pr)
{
    if (K < 0)
        throw PreconditionError("lambda_char_sums: K < 0");
    if (K > pr.max_degree())
        throw PreconditionError("lambda_char_sums: primes tabulated only to degree " +
                                std::to_string(pr.max_degree()));
    const UnitGroup& G = chi.group();
    const std::uint64_t L = G.exponent();
    std::vector<cplx> a(static_cast<std::size_t>(K + 1), cplx(0));
    for (int d = 1; d <= K; ++d) {
        std::vector<std::uint64_t> ang;
        for (auto r : pr.residues(d))
            ang.push_back(static_cast<std::uint64_t>(G.angle(chi.exps(), r)));
        for (int j = 1; d * j <= K; ++j) {
            AngleAccumulator acc(L);
            for (auto t : ang)
                acc.add((t * static_cast<std::uint64_t>(j)) % L);
            a[static_cast<std::size_t>(d * j)] += static_cast<double>(d) * acc.value();
        }
    }
    return a;
}

cplx log_p_k(const Character& chi, cplx u, int K, const PrimeResidues& pr)
{
    const auto a = lambda_char_sums(chi, K, pr);
    cplx acc = 0;
    cplx uk = 1.0;
    for (int k = 1; k <= K; ++k) {
        uk *= u;
        acc += a[static_cast<std::size_t>(k)] * uk / static_cast<double>(k);
    }
    return acc;
}

cplx p_k(const Character& chi, cplx u, int K)
{
    return p_k(chi, u, K, PrimeResidues(chi.group_ptr(), std::max(K, 0)));
}

cplx p_k(const Character& chi, cplx u, int K, const PrimeResidues& pr)
{
    return std::exp(log_p_k(chi, u, K, pr));
}

cplx p_k_s(const Character& chi, cplx s, int K, const PrimeResidues& pr)
{
    if (K < 0)
        throw PreconditionError("p_k_s: K < 0");
    if (K > pr.max_degree())
        throw PreconditionError("p_k_s: primes tabulated only to degree " + std::to_string(pr.max_degree()));
    const UnitGroup& G = chi.group();
    const double lq = std::log(static_cast<double>(G.q()));
    NeumaierSum total;
    for (int d = 1; d <= K; ++d) {
        const cplx w = std::exp(-static_cast<double>(d) * lq * s);  // |P|^{-s}
        for (auto r : pr.residues(d)) {
            const cplx chiP = unit_root(static_cast<std::uint64_t>(G.angle(chi.exps(), r)), G.exponent());
            cplx term = 1.0;
            for (int j = 1; d * j <= K; ++j) {
                term *= chiP * w;
                total.add(term / static_cast<double>(j));
            }
        }
    }
    return std::exp(total.value());
}

cplx z_k(const std::vector<cplx>& alphas, cplx u, int K)
{
    if (K < 0)
        throw PreconditionError("z_k: K < 0");
    cplx tail_sum = 0;
    for (const auto& a : alphas) {
        const cplx z = a * u;
        if (!(std::abs(z) < 1.0))
            throw DomainError("z_k: |alpha u| = " + fmt(std::abs(z)) + " >= 1");
        cplx partial = 0, zk = 1.0;
        for (int k = 1; k <= K; ++k) {
            zk *= z;
            partial += zk / static_cast<double>(k);
        }
        tail_sum += -std::log(1.0 - z) - partial;
    }
    return std::exp(-tail_sum);
}

cplx l_eval_s(const LPolynomial& L, cplx s)
{
    return L.eval(u_of_s(L.chi.group().q(), s));
}

cplx l_eval_s(const Character& chi, cplx s)
{
    const cplx u = u_of_s(chi.group().q(), s);
    if (chi.is_principal())
        return zeta_q(chi.group().ring(), chi.group().modulus(), u);
    return l_coeffs(chi).eval(u);
}

double hybrid_check(const Character& chi, const RegionGrid& grid, int K)
{
    const auto L = l_coeffs(chi);
    const PrimeResidues pr(chi.group_ptr(), std::max(K, 0));
    if (L.observed_degree() == 0)
        return hybrid_check(L, RootReport{}, grid, K, pr);
    return hybrid_check(L, roots(L), grid, K, pr);
}

double hybrid_check(const LPolynomial& L, const RootReport& rr, const RegionGrid& grid, int K,
                    const PrimeResidues& pr)
{
    require_nonprincipal(L.chi, "hybrid_check");
    const double lim = 1.0 / std::sqrt(static_cast<double>(grid.q()));
    const auto a = lambda_char_sums(L.chi, K, pr);
    double worst = 0;
    for (const auto& u : grid.u_points()) {
        if (std::abs(u) > lim * (1 + 1e-12))
            throw DomainError("hybrid_check: |u| = " + fmt(std::abs(u)) + " exceeds q^-1/2");
        cplx lp = 0, uk = 1.0;
        for (int k = 1; k <= K; ++k) {
            uk *= u;
            lp += a[static_cast<std::size_t>(k)] * uk / static_cast<double>(k);
        }
        const cplx rhs = std::exp(lp) * z_k(rr.alphas, u, K);
        worst = std::max(worst, std::abs(L.eval(u) - rhs));
    }
    return worst;
}

RatioReport lemma2_ratio_check(const Character& chi, const RegionGrid& grid, int K)
{
    return lemma2_ratio_check(l_coeffs(chi), grid, K, PrimeResidues(chi.group_ptr(), std::max(K, 0)));
}

RatioReport lemma2_ratio_check(const LPolynomial& L, const RegionGrid& grid, int K, const PrimeResidues& pr)
{
    require_nonprincipal(L.chi, "lemma2_ratio_check");
    if (grid.plane() != Plane::S)
        throw PreconditionError("lemma2_ratio_check: s-plane grid required");
    if (K < 1)
        throw PreconditionError("lemma2_ratio_check: K >= 1 required");
    const double q = static_cast<double>(grid.q());
    const double degQ = static_cast<double>(L.chi.group().degQ());
    RatioReport rep;
    for (const auto& s : grid.points()) {
        const cplx ratio = l_eval_s(L, s) / p_k_s(L.chi, s, K, pr);
        const double dev = std::abs(ratio - 1.0);
        const double shape = degQ / K * std::pow(q, (0.5 - s.real()) * K);
        const double r = dev / shape;
        rep.max_deviation = std::max(rep.max_deviation, dev);
        if (r > rep.max_ratio) {
            rep.max_ratio = r;
            rep.worst_s = s;
        }
    }
    return rep;
}

}  // namespace ffuniv
