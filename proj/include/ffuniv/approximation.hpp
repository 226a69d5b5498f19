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

#ifndef FFUNIV_APPROXIMATION_HPP
#define FFUNIV_APPROXIMATION_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ffuniv/characters.hpp"
#include "ffuniv/lfunctions.hpp"

namespace ffuniv {

// ---------------------------------------------------------------------------
// Peak polynomial

/// f(theta) = sum_{k=0}^K c_k e(k theta) with max |f| = f(0) = 1 and
/// |f| <= 2 e^{-pi K delta} on [delta, 1 - delta].
///
/// With m = floor(K/2), x0 = (3 - cos 2 pi delta) / (1 + cos 2 pi delta):
///   f(theta) = e(m theta) T_m(a cos 2 pi theta + a - 1) / T_m(x0),
/// a = 2 / (1 + cos 2 pi delta), times (1 + e(theta)) / 2 when K is odd.
/// The interval [delta, 1 - delta] maps onto [-1, 1], so off-peak
/// |f| <= 1 / T_m(x0), and x0 = 1 + 2 tan^2(pi delta) >= cosh(2 pi delta)
/// gives 1 / T_m(x0) <= 2 e^{-2 pi m delta}. delta = 1/2 uses
/// ((1 + e(theta)) / 2)^K.
class PeakPolynomial {
public:
    int K() const { return K_; }
    double delta() const { return delta_; }
    const std::vector<cplx>& coeffs() const { return c_; }

    /// Closed-form value; accurate to full relative precision off-peak.
    cplx eval(double theta) const;
    double abs_at(double theta) const { return std::abs(eval(theta)); }
    /// Value of the coefficient series.
    cplx eval_series(double theta) const;
    /// 1 / T_m(x0) (times cos(pi delta) for odd K): the analytic off-peak bound.
    double analytic_bound() const { return analytic_; }

private:
    friend PeakPolynomial peak_poly(int K, double delta);
    int K_ = 0;
    double delta_ = 0.5;
    int m_ = 0;
    double a_ = 0, A0_ = 0;  // A0 = acosh(x0)
    double inv_T0_ = 1;
    bool binomial_ = false;
    double analytic_ = 0;
    std::vector<cplx> c_;
};

struct PeakCertificate {
    int grid_points = 0;
    double value_at_zero = 0;    // |sum c_k - 1|
    double grid_max = 0;
    double argmax = 0;
    double off_peak_max = 0;     // closed form, grid points in [delta, 1 - delta]
    double bound = 0;            // 2 e^{-pi K delta}
    double analytic_bound = 0;
    double series_mismatch = 0;  // max |series - closed form| on the grid, < 1e-14 (K + 1)
    bool ok = false;
};

/// Evaluates the contract on an n-point grid.
PeakCertificate certify_peak(const PeakPolynomial& f, int grid_points = 10000);

/// Builds and certifies; ConstructionError carrying the measured off-peak
/// maximum when the contract fails. Requires K >= 1, 0 < delta <= 1/2.
PeakPolynomial peak_poly(int K, double delta);

/// sum |c_k|^2.
double kappa(const PeakPolynomial& f);
/// Trapezoid rule for int_0^1 |f|^2 on n nodes.
double kappa_quadrature(const PeakPolynomial& f, int nodes = 2048);

// ---------------------------------------------------------------------------
// Parameters

struct ParamSet {
    double rho = 0;  // log_q(deg Q)
    int K = 0;       // floor(deg Q / (2 log_q deg Q))
    double delta = 0;
    int rho_degree() const { return static_cast<int>(rho + 1e-12); }
};

/// Requires deg Q >= 2; PreconditionError when the formulas leave
/// K >= 1, 0 < delta <= 1/2.
ParamSet def_pars(std::uint32_t q, int degQ);

/// Degree window conversions: norm |P| = q^{deg P}.
double norm_of_degree(std::uint32_t q, double degree);
double degree_of_norm(std::uint32_t q, double norm);

// ---------------------------------------------------------------------------
// Phase assignments

struct PhaseEntry {
    Poly P;
    int degree = 0;
    std::uint64_t residue = 0;
    double theta = 0;
};

class PhaseAssignment {
public:
    explicit PhaseAssignment(GroupPtr group) : group_(std::move(group)) {}

    /// All primes with mu < deg P <= rho coprime to Q, theta = 0, ordered by
    /// degree then enumeration order.
    static PhaseAssignment window(GroupPtr group, int mu, int rho);

    /// PreconditionError if P is not a prime, divides Q, or is already present.
    void add(const Poly& P, double theta);
    void set_theta(std::size_t i, double theta);

    const GroupPtr& group_ptr() const { return group_; }
    const UnitGroup& group() const { return *group_; }
    const std::vector<PhaseEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

    /// One line per prime: "P-text theta" with theta to 15 digits.
    std::string serialize() const;
    static PhaseAssignment parse(GroupPtr group, const std::string& text);

private:
    GroupPtr group_;
    std::vector<PhaseEntry> entries_;
};

/// arg chi(residue) / 2 pi in [0, 1).
double char_phase(const Character& chi, std::uint64_t residue);
/// Distance to the nearest integer.
double circle_dist(double x);

/// prod_P |f(arg chi(P)/2pi - theta_P)|^2.
double g_func(const Character& chi, const PhaseAssignment& phases, const PeakPolynomial& f);
/// g minus epsilon times the leave-one-out products.
double h_func(const Character& chi, const PhaseAssignment& phases, const PeakPolynomial& f, double epsilon);

enum class EpsilonBase { E, Q };
/// 4 e^{-2 pi K delta} (base e) or 4 q^{-2 pi K delta}.
double default_epsilon(const PeakPolynomial& f, EpsilonBase base = EpsilonBase::E, std::uint32_t q = 0);

// ---------------------------------------------------------------------------
// Mean values over the character family (chi0 excluded unless noted)

struct MVGReport {
    std::uint64_t phi = 0;
    std::size_t n_primes = 0;
    int K = 0;
    double kappa = 0;
    double lhs = 0;            // sum_{chi != chi0} g
    double main = 0;           // phi kappa^{|P|}
    double error_scale = 0;    // |P|^K kappa^{|P|}
    double discrepancy = 0;    // |lhs - main| / error_scale
};

struct MVHReport {
    std::uint64_t phi = 0;
    std::size_t n_primes = 0;
    int degQ = 0;
    double kappa = 0;
    double epsilon = 0;
    double lhs = 0;         // sum h
    double lhs_plus = 0;    // sum max(h, 0)
    double lhs_g = 0;       // sum g
    double main = 0;
    double rel_error = 0;       // lhs / main - 1
    double rel_error_plus = 0;  // lhs_plus / main - 1
    double scaled_error = 0;    // |rel_error_plus| * deg Q
};

struct MVTailReport {
    std::uint64_t phi = 0;
    int rho = 0, z = 0;
    cplx s{0, 0};
    std::size_t tail_primes = 0;
    double lhs = 0;    // sum over all chi of g |sum b_P chi(P)|^2
    double bound = 0;  // phi kappa^{|P|} q^{rho (1 - 2 sigma)} / rho
    double ratio = 0;
};

/// b_P(s) for a prime of the given degree.
using PrimeCoefficient = std::function<cplx(const Poly& P, int degree, cplx s)>;

MVGReport mv_g_experiment(const PhaseAssignment& phases, const PeakPolynomial& f, unsigned workers = 1);
MVHReport mv_h_experiment(const PhaseAssignment& phases, const PeakPolynomial& f, double epsilon,
                          unsigned workers = 1);
/// Tail over rho < deg P <= z, rho = max degree in phases (or the given
/// rho_window). Default b_P(s) = |P|^{-s}; b is checked against |P|^{-sigma}.
MVTailReport mv_tail_experiment(const PhaseAssignment& phases, const PeakPolynomial& f, int rho, cplx s, int z,
                                const PrimeCoefficient& b = {}, unsigned workers = 1);

// ---------------------------------------------------------------------------
// Counting function of Lambda_Q = { log|P| : P not dividing Q }

struct CountingRow {
    double x = 0;
    std::uint64_t N = 0;         // N(x)
    double scaled = 0;           // N(x) x / e^x
    std::uint64_t N_shift = 0;   // N(x + c / x^2)
    double short_ratio = 0;      // (N_shift - N) / (e^x / x^3)
};

struct CountingReport {
    std::vector<CountingRow> rows;
    /// multiplicity of d log q, d = 1..max degree
    std::vector<std::uint64_t> multiplicity;
    double c = 1;
    double min_scaled = 0, max_scaled = 0;
    double min_short_ratio = 0;
};

/// Grid of n points on [x_min, x_max]. Uses the exact prime counts.
CountingReport counting_checks(const PolyRing& R, const Poly& Q, double x_min, double x_max, int n, double c = 1.0);
/// N(x) alone.
std::uint64_t lambda_q_count(const PolyRing& R, const Poly& Q, double x);

// ---------------------------------------------------------------------------
// Constructive phase fitting

struct FitOptions {
    int scan_points = 64;
    int max_sweeps = 50;
    double stall = 1e-12;  // stop when a sweep improves by less than this
    /// Start from these phases for primes they contain.
    const PhaseAssignment* warm_start = nullptr;
    /// Remaining primes of each degree start at theta = j/n (n >= 2 of them
    /// then sum to zero) instead of theta = 0.
    bool balanced_init = false;
};

struct FitResult {
    PhaseAssignment phases;
    double sup_error = 0;
    std::vector<double> history;  // objective after each sweep, first entry initial
};

/// Minimise max_grid |target - sum_P e(theta_P) |P|^{-s}| over the phases of
/// the primes in (mu, rho] coprime to Q by cyclic coordinate descent from
/// theta = 0. target holds the values on grid.points().
FitResult fit_phases(const std::vector<cplx>& target, const RegionGrid& grid, const GroupPtr& group, int mu,
                     int rho, const FitOptions& opt = {});
/// fit_phases for rho = mu+1..rho_max, each warm-started from the previous
/// with balanced new primes, so the errors are non-increasing whenever every
/// new degree has at least two primes.
std::vector<FitResult> fit_phases_sweep(const std::vector<cplx>& target, const RegionGrid& grid,
                                        const GroupPtr& group, int mu, int rho_max, FitOptions opt = {});
/// Sup error of a given assignment.
double fit_objective(const std::vector<cplx>& target, const RegionGrid& grid, const PhaseAssignment& phases);

}  // namespace ffuniv

#endif  // FFUNIV_APPROXIMATION_HPP
