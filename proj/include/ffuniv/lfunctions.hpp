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

#ifndef FFUNIV_LFUNCTIONS_HPP
#define FFUNIV_LFUNCTIONS_HPP

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "ffuniv/arith.hpp"
#include "ffuniv/characters.hpp"

namespace ffuniv {

// ---------------------------------------------------------------------------
// u <-> s

/// u = q^{-s}.
cplx u_of_s(std::uint32_t q, cplx s);
/// Inverse of u_of_s with Im s in [0, 2 pi / log q). DomainError on u = 0.
cplx s_of_u(std::uint32_t q, cplx u);

// ---------------------------------------------------------------------------
// Sample grids

enum class Plane { U, S };

/// Finite sample of a compact region. Points are stored in path order
/// (serpentine for the rectangular constructors) so that consecutive points
/// are neighbours.
class RegionGrid {
public:
    /// Annulus patch in the u-plane: radii x angles, angles in radians.
    static RegionGrid annulus(std::uint32_t q, double r_lo, double r_hi, int n_r,
                              double ang_lo, double ang_hi, int n_ang);
    /// Rectangle in the s-plane: sigma x t.
    static RegionGrid rectangle(std::uint32_t q, double sig_lo, double sig_hi, int n_sig,
                                double t_lo, double t_hi, int n_t);
    /// 10 radii in [q^-0.85, q^-0.65] x 20 angles in [0, 0.8 pi].
    static RegionGrid default_u(std::uint32_t q);
    /// sigma in [0.6, 0.9] x t in [0.1, 0.9] * 2 pi / log q, 10 x 20.
    static RegionGrid default_s(std::uint32_t q);
    static RegionGrid from_points(std::uint32_t q, Plane plane, std::vector<cplx> points,
                                  std::string description = "points");

    Plane plane() const { return plane_; }
    std::uint32_t q() const { return q_; }
    const std::vector<cplx>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    /// Points mapped to the u-plane.
    std::vector<cplx> u_points() const;
    const std::string& description() const { return desc_; }
    /// min over the grid of sigma - 1/2 (s-plane) or of -log_q|u| - 1/2.
    double min_distance_to_critical() const;
    double max_abs_u() const;

private:
    RegionGrid(std::uint32_t q, Plane plane, std::vector<cplx> points, std::string desc);

    std::uint32_t q_;
    Plane plane_;
    std::vector<cplx> points_;
    std::string desc_;
};

// ---------------------------------------------------------------------------
// Primes coprime to Q, by degree, with their residues

class PrimeResidues {
public:
    PrimeResidues(GroupPtr group, int max_degree);

    const UnitGroup& group() const { return *group_; }
    int max_degree() const { return static_cast<int>(res_.size()); }
    /// Primes of degree d not dividing Q, enumeration order.
    const std::vector<Poly>& primes(int d) const;
    /// Residue indices mod Q of primes(d).
    const std::vector<std::uint64_t>& residues(int d) const;

private:
    GroupPtr group_;
    std::vector<std::vector<Poly>> primes_;
    std::vector<std::vector<std::uint64_t>> res_;
};

// ---------------------------------------------------------------------------
// L-polynomials

struct LPolynomial {
    Character chi;
    /// c_0..c_{deg Q - 1}.
    std::vector<cplx> coeffs;

    int degree_bound() const { return static_cast<int>(coeffs.size()) - 1; }
    /// Largest n with |c_n| > tol.
    int observed_degree(double tol = 1e-9) const;
    cplx eval(cplx u) const;
};

/// Direct summation of chi over monic residues, degrees 0..deg Q - 1.
/// Exact cyclotomic accumulation when the group exponent is <= 360.
/// UnsupportedError for the principal character (use zeta_q).
LPolynomial l_coeffs(const Character& chi);

/// sum_{f monic, deg f = n} chi(f) by direct summation for any n >= 0
/// (residues of degree >= deg Q are reduced mod Q). Principal allowed.
cplx monic_char_sum(const Character& chi, int n);

/// Coefficients of every character at once, rows in character order.
struct LCoeffMatrix {
    std::uint64_t rows = 0;
    int cols = 0;
    std::vector<cplx> data;

    cplx at(std::uint64_t r, int c) const { return data[r * static_cast<std::uint64_t>(cols) + static_cast<std::uint64_t>(c)]; }
    const cplx* row(std::uint64_t r) const { return data.data() + r * static_cast<std::uint64_t>(cols); }
};

/// Group DFT of the degree-sliced indicators of monic residues.
LCoeffMatrix l_coeffs_all(const GroupPtr& group);

/// Principal L-function prod_{P | Q}(1 - u^{deg P}) / (1 - q u).
/// DomainError at the pole u = 1/q.
cplx zeta_q(const PolyRing& R, const Poly& Q, cplx u);

// ---------------------------------------------------------------------------
// Inverse roots

enum class RootClass { Critical, Trivial, Violation };
const char* root_class_name(RootClass c);

struct RootReport {
    std::vector<cplx> alphas;
    std::vector<RootClass> classes;
    int observed_degree = 0;
    int iterations = 0;
    /// max |c_n - coefficient of prod (1 - alpha_j u)|.
    double reconstruction_residual = 0;

    int violations() const;
};

inline constexpr double kRootClassTolerance = 1e-6;

/// Requires observed degree >= 1. NumericError if the solver stalls.
RootReport roots(const LPolynomial& L);

// ---------------------------------------------------------------------------
// Euler product and the hybrid formula

/// prod_{deg P <= maxdeg, P not dividing Q} (1 - chi(P) u^{deg P})^{-1}.
/// DomainError unless |u| < 1/q.
cplx euler_product_truncated(const Character& chi, cplx u, int maxdeg);
cplx euler_product_truncated(const Character& chi, cplx u, int maxdeg, const PrimeResidues& pr);

/// a_k = sum_{deg f = k} Lambda(f) chi(f) for k = 1..K (index 0 is 0).
std::vector<cplx> lambda_char_sums(const Character& chi, int K, const PrimeResidues& pr);

/// log P_K(u) = sum_{k <= K} a_k u^k / k.
cplx log_p_k(const Character& chi, cplx u, int K, const PrimeResidues& pr);
cplx p_k(const Character& chi, cplx u, int K);
cplx p_k(const Character& chi, cplx u, int K, const PrimeResidues& pr);

/// s-form: exp(sum_{deg P <= K} sum_{j deg P <= K} chi(P)^j / (j |P|^{js})),
/// summed prime by prime.
cplx p_k_s(const Character& chi, cplx s, int K, const PrimeResidues& pr);

/// exp(-sum_j sum_{k > K} (alpha_j u)^k / k) via the closed-form tail.
/// DomainError if some |alpha_j u| >= 1.
cplx z_k(const std::vector<cplx>& alphas, cplx u, int K);

/// Polynomial value at u = q^{-s}.
cplx l_eval_s(const LPolynomial& L, cplx s);
/// Principal character goes through zeta_q.
cplx l_eval_s(const Character& chi, cplx s);

/// max over the grid of |L - P_K Z_K|. Grid must lie in |u| <= q^{-1/2}.
double hybrid_check(const Character& chi, const RegionGrid& grid, int K);
double hybrid_check(const LPolynomial& L, const RootReport& rr, const RegionGrid& grid, int K,
                    const PrimeResidues& pr);

struct RatioReport {
    double max_deviation = 0;  // max |L/P_K - 1|
    double max_ratio = 0;      // max of deviation / ((deg Q / K) q^{(1/2 - sigma) K})
    cplx worst_s{0, 0};
};

/// s-plane grid with sigma > 1/2, nonprincipal chi, K >= 1.
RatioReport lemma2_ratio_check(const Character& chi, const RegionGrid& grid, int K);
RatioReport lemma2_ratio_check(const LPolynomial& L, const RegionGrid& grid, int K,
                                const PrimeResidues& pr);

}  // namespace ffuniv

#endif  // FFUNIV_LFUNCTIONS_HPP
