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

#ifndef FFUNIV_UNIVERSALITY_HPP
#define FFUNIV_UNIVERSALITY_HPP

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ffuniv/approximation.hpp"
#include "ffuniv/characters.hpp"
#include "ffuniv/lfunctions.hpp"

namespace ffuniv {

/// %.15g; "-0" is written as "0".
std::string format_real(double x);
/// "re+imj" with 15 significant digits; "-0" is written as "0".
std::string format_complex(cplx z);
/// Accepts "a", "bj", "a+bj", "a-bj" (also with "i"). ParseError otherwise.
cplx parse_complex(const std::string& text);

// ---------------------------------------------------------------------------
// Targets

enum class TargetKind { Constant, Polynomial, ExpPolynomial, ReciprocalLinear };

/// A nonvanishing analytic target in the variable `var` (u or s).
///   Constant          c
///   Polynomial        sum c_k z^k
///   ExpPolynomial     exp(sum c_k z^k)
///   ReciprocalLinear  1 / (z - a)
/// On a grid of the other plane the point is converted first.
class TargetFunction {
public:
    static TargetFunction constant(cplx c, Plane var = Plane::U);
    static TargetFunction polynomial(std::vector<cplx> c, Plane var = Plane::U);
    static TargetFunction exp_polynomial(std::vector<cplx> c, Plane var = Plane::U);
    static TargetFunction reciprocal_linear(cplx a, Plane var = Plane::U);
    /// The L-polynomial of chi as a u-polynomial target.
    static TargetFunction planted(const LPolynomial& L);

    /// Text form: "<kind>[@u|@s] <complex>...", kinds const, poly, exppoly, reclin.
    static TargetFunction parse(const std::string& text);
    std::string id() const;

    TargetKind kind() const { return kind_; }
    Plane variable() const { return var_; }
    const std::vector<cplx>& params() const { return p_; }

    cplx eval(cplx z) const;
    /// Values on the grid points.
    std::vector<cplx> values(const RegionGrid& grid) const;

private:
    TargetFunction(TargetKind k, Plane v, std::vector<cplx> p);
    TargetKind kind_;
    Plane var_;
    std::vector<cplx> p_;
};

struct TargetValues {
    std::vector<cplx> F;
    /// log F along the grid path: principal value at the first point, then
    /// the branch nearest the previous value.
    std::vector<cplx> logF;
    double min_modulus = 0;
    std::size_t argmin = 0;
};

/// PreconditionError if F vanishes (or is not finite) somewhere on the grid;
/// NumericError if consecutive arguments jump by more than pi/2.
TargetValues target_values(const TargetFunction& target, const RegionGrid& grid);

// ---------------------------------------------------------------------------
// Decomposition of log P_K(s, chi)

struct LogDecomposition {
    cplx f1{0, 0};  // prime powers, deg P <= mu
    cplx f2{0, 0};  // primes, mu < deg P <= rho
    cplx f3{0, 0};  // primes, rho < deg P <= K
    cplx f4{0, 0};  // powers j >= 2 of primes with deg P > mu
    cplx log_pk{0, 0};  // sum_{k <= K} a_k u^k / k
    double residual = 0;  // |f1 + f2 + f3 + f4 - log_pk|
};

/// K < 1 returns zeros. Otherwise requires 1 <= mu < rho < K, nonprincipal
/// chi and Re s > 1/2. pr must reach degree K.
LogDecomposition decompose_logL(const Character& chi, cplx s, int mu, int rho, int K, const PrimeResidues& pr);
LogDecomposition decompose_logL(const Character& chi, cplx s, int mu, int rho, int K);

/// f_1 of the target side: sum_{deg P <= mu, P coprime to Q} sum_{j deg P <= K} u^{j deg P} / j.
std::vector<cplx> f1_target(const GroupPtr& group, const RegionGrid& grid, int mu, int K);

// ---------------------------------------------------------------------------
// Character sieve

/// The phases plus theta = 0 for every prime of degree <= mu coprime to Q.
PhaseAssignment sieve_assignment(const PhaseAssignment& phases, int mu);

/// Character indices (nonprincipal, ascending) with circle_dist(arg chi(P)/2pi
/// - theta_P) < delta for every P in sieve_assignment(phases, mu).
/// delta >= 1/2 passes everything.
///
/// With match_within_degree the thetas of each degree may be assigned to that
/// degree's primes in any order (a perfect matching must exist): the union of
/// the plain sieve over all within-degree permutations of the phases.
std::vector<std::uint64_t> character_sieve(const PhaseAssignment& phases, double delta, int mu = 0,
                                           unsigned workers = 1, bool match_within_degree = false);

/// Nonprincipal indices with h(chi) > 0 for the same assignment.
std::vector<std::uint64_t> hplus_positive(const PhaseAssignment& assignment, const PeakPolynomial& f,
                                          double epsilon, unsigned workers = 1);

// ---------------------------------------------------------------------------
// Distances and searches

/// max over the grid of |L(chi) - F|, per-character coefficients.
double sup_distance(const Character& chi, const std::vector<cplx>& F, const RegionGrid& grid);
double sup_distance(const Character& chi, const TargetFunction& target, const RegionGrid& grid);

/// Same quantity for the listed character indices from the family matrix.
std::vector<double> sup_distances(const LCoeffMatrix& M, std::span<const std::uint64_t> indices,
                                  const std::vector<cplx>& F, const RegionGrid& grid, unsigned workers = 1);

inline constexpr std::uint64_t kMaxSearchCharacters = std::uint64_t{1} << 20;

struct SearchReport {
    std::string Q, target_id, grid_id;
    std::uint64_t phi = 0;
    double epsilon = 0;
    /// Evaluated characters (ascending) and their distances.
    std::vector<std::uint64_t> indices;
    std::vector<double> distances;
    bool found = false;  // false when nothing was evaluated
    std::uint64_t best_index = 0;
    double best_distance = 0;
    std::uint64_t within = 0;  // distances < epsilon
    double proportion = 0;     // within / phi
    double mean_distance = 0;
    double min_target_modulus = 0;
    double seconds = 0;

    // guided runs
    bool guided = false;
    int mu = 0, rho = 0, K = 0;
    double delta = 0;
    bool matched = false;
    double fit_error = 0;
    std::uint64_t sieve_size = 0;
    std::optional<std::uint64_t> exhaustive_best_index;
    double exhaustive_best_distance = 0;
    double exhaustive_mean_distance = 0;
    std::string phases;  // PhaseAssignment::serialize()
};

/// Exhaustive over all nonprincipal characters. CapacityError beyond
/// kMaxSearchCharacters (use guided_search).
SearchReport universality_search(const GroupPtr& group, const TargetFunction& target, const RegionGrid& grid,
                                 double epsilon, unsigned workers = 1);

struct GuidedOptions {
    int mu = 0;
    std::optional<int> rho;       // default: floor(log_q deg Q)
    std::optional<int> K;         // default: the parameter formula
    std::optional<double> delta;  // default: the parameter formula
    /// Sieve up to permutation of the fitted phases within each degree. The
    /// fitted sum sees only sum_{deg P = d} e(theta_P), so which prime gets
    /// which phase is arbitrary.
    bool match_within_degree = true;
    /// Also run the exhaustive search for comparison. Without it the sieved
    /// characters get per-character coefficients and no family matrix is built.
    bool compare = true;
    FitOptions fit;
};

/// f1, phase fit of log F - f1 on (mu, rho], sieve, distances on the sieve.
/// An empty sieve is a result (no best character), not an error.
SearchReport guided_search(const GroupPtr& group, const TargetFunction& target, const RegionGrid& grid,
                           double epsilon, const GuidedOptions& opt = {}, unsigned workers = 1);

// ---------------------------------------------------------------------------
// Good / bad split

struct SplitReport {
    std::uint64_t phi = 0;
    int mu = 0, rho = 0, K = 0;
    double d = 0;          // min over the grid of sigma - 1/2
    double threshold = 0;  // (deg Q)^{-d/2}
    std::uint64_t good = 0, bad = 0;
    double mass_good = 0, mass_bad = 0;  // sums of h+ over G, B
    double main = 0;                     // kappa^{|P|} phi
    double ratio_good = 0, ratio_bad = 0;
    double max_M = 0;
};

/// M(chi) = max_grid |sum_{rho < deg P <= K} chi(P) |P|^{-s}| for every
/// nonprincipal chi; h+ from the assignment (which should cover deg <= rho).
SplitReport good_bad_split(const PhaseAssignment& assignment, const PeakPolynomial& f, double epsilon,
                           const RegionGrid& grid, int mu, int rho, int K, unsigned workers = 1);

/// M(chi) for every character (index 0 included).
std::vector<double> f3_sup(const GroupPtr& group, const RegionGrid& grid, int rho, int K, unsigned workers = 1);

}  // namespace ffuniv

#endif  // FFUNIV_UNIVERSALITY_HPP
