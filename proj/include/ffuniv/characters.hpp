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

#ifndef FFUNIV_CHARACTERS_HPP
#define FFUNIV_CHARACTERS_HPP

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ffuniv/poly.hpp"

namespace ffuniv {

using cplx = std::complex<double>;

/// Largest residue ring q^{deg Q} the unit-group builder accepts.
inline constexpr std::uint64_t kMaxResidues = std::uint64_t{1} << 21;

/// e(num / den), exact at multiples of 1/4.
cplx unit_root(std::uint64_t num, std::uint64_t den);

/// Multiplication of residues mod Q, residues addressed by their index
/// sum r_i q^i (deg r < deg Q).
class ResidueRing {
public:
    ResidueRing(PolyRing ring, Poly Q);

    const PolyRing& ring() const { return ring_; }
    const Poly& modulus() const { return Q_; }
    int n() const { return n_; }
    std::uint64_t size() const { return size_; }

    std::uint64_t mul(std::uint64_t a, std::uint64_t b) const;
    std::uint64_t pow(std::uint64_t a, std::uint64_t e) const;
    std::uint64_t reduce(const Poly& f) const { return ring_.index_of(ring_.mod(f, Q_)); }

private:
    PolyRing ring_;
    Poly Q_;
    int n_;
    std::uint64_t size_;
    std::vector<std::uint32_t> qc_;  // coefficients of Q
};

/// Cyclic decomposition of (F_q[x]/Q)^* with a complete discrete-log table.
///
/// Generators are found greedily: at each round the residue of largest order
/// in G/H (smallest residue index on ties) is taken, corrected by an element
/// of H so that its order in G equals its order in G/H, and appended. Orders
/// are therefore the invariant factors n_1 >= n_2 >= ... (each dividing the
/// previous). Exponent tuples are flattened row-major, last generator fastest.
class UnitGroup {
public:
    /// Throws PreconditionError unless Q is monic of degree >= 1 and
    /// CapacityError when q^{deg Q} exceeds kMaxResidues.
    static std::shared_ptr<const UnitGroup> build(const PolyRing& R, const Poly& Q);

    const ResidueRing& residues() const { return rr_; }
    const PolyRing& ring() const { return rr_.ring(); }
    const Poly& modulus() const { return rr_.modulus(); }
    int degQ() const { return rr_.n(); }
    std::uint32_t q() const { return rr_.ring().q(); }

    std::uint64_t phi() const { return phi_; }
    std::size_t rank() const { return orders_.size(); }
    const std::vector<std::uint64_t>& generators() const { return gens_; }
    std::vector<Poly> generator_polys() const;
    const std::vector<std::uint32_t>& orders() const { return orders_; }
    /// lcm of the orders; the common denominator of every character angle.
    std::uint64_t exponent() const { return exponent_; }

    /// Flat exponent index of a residue, or -1 when not coprime to Q.
    std::int64_t flat_of(std::uint64_t residue) const { return flat_[residue]; }
    std::uint64_t residue_of_flat(std::uint64_t flat) const { return residue_[flat]; }
    std::vector<std::uint32_t> unflatten(std::uint64_t flat) const;
    std::uint64_t flatten(std::span<const std::uint32_t> digits) const;
    /// Exponent vector (d_1..d_r) of a residue; empty optional if not coprime.
    std::optional<std::vector<std::uint32_t>> dlog(std::uint64_t residue) const;

    std::uint64_t reduce(const Poly& f) const { return rr_.reduce(f); }

    /// Angle numerator over exponent() of the character with exponents m at a
    /// residue: sum m_i d_i (L / n_i) mod L; -1 when not coprime.
    std::int64_t angle(std::span<const std::uint32_t> m, std::uint64_t residue) const;

private:
    UnitGroup(const PolyRing& R, const Poly& Q);

    ResidueRing rr_;
    std::uint64_t phi_ = 0;
    std::vector<std::uint64_t> gens_;
    std::vector<std::uint32_t> orders_;
    std::vector<std::uint64_t> weights_;  // exponent / n_i
    std::uint64_t exponent_ = 1;
    std::vector<std::int32_t> flat_;
    std::vector<std::uint32_t> residue_;
};

using GroupPtr = std::shared_ptr<const UnitGroup>;

/// Rational angle num/den in [0, 1).
struct Angle {
    std::uint64_t num = 0;
    std::uint64_t den = 1;
    bool operator==(const Angle& o) const { return num * o.den == o.num * den; }
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

/// A Dirichlet character: exponent tuple against the group's generators,
/// chi(g_i) = e(m_i / n_i).
class Character {
public:
    Character(GroupPtr group, std::vector<std::uint32_t> exps);

    const UnitGroup& group() const { return *group_; }
    const GroupPtr& group_ptr() const { return group_; }
    const std::vector<std::uint32_t>& exps() const { return exps_; }
    /// Position in the odometer order of characters(group).
    std::uint64_t index() const { return group_->flatten(exps_); }
    bool is_principal() const;

    /// "Q-text : m_1,...,m_r".
    std::string to_string() const;
    static Character parse(GroupPtr group, const std::string& text);

    bool operator==(const Character& o) const { return group_ == o.group_ && exps_ == o.exps_; }

private:
    GroupPtr group_;
    std::vector<std::uint32_t> exps_;
};

/// All phi(Q) characters, principal first, odometer order (last exponent fastest).
std::vector<Character> characters(const GroupPtr& group);
Character character_at(const GroupPtr& group, std::uint64_t index);

/// Exact angle of chi(f); nullopt when gcd(f, Q) != 1.
std::optional<Angle> char_angle(const Character& chi, const Poly& f);
std::optional<Angle> char_angle_residue(const Character& chi, std::uint64_t residue);
/// chi(f) as a complex number; exactly 0 when gcd(f, Q) != 1.
cplx char_eval(const Character& chi, const Poly& f);

/// Trivial on the constants F_q^*.
bool is_even(const Character& chi);

Character char_product(const Character& a, const Character& b);
Character char_conj(const Character& chi);

struct MeanValue {
    double lhs = 0;
    double rhs = 0;
};

/// Both sides of sum_chi |sum_N a_N chi(N)|^2 = phi(Q) sum_N |a_N|^2.
/// Requires distinct N, each coprime to Q with |N| < |Q|.
MeanValue orthogonality_mean_value(const GroupPtr& group,
                                   std::span<const std::pair<Poly, cplx>> terms);

}  // namespace ffuniv

#endif  // FFUNIV_CHARACTERS_HPP
