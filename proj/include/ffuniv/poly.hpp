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

#ifndef FFUNIV_POLY_HPP
#define FFUNIV_POLY_HPP

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ffuniv/field.hpp"

namespace ffuniv {

/// Degree of a polynomial. The zero polynomial has no integer degree and is
/// represented by std::nullopt (the -infinity marker).
using Degree = std::optional<int>;

/// Polynomial over F_q, coefficients lowest degree first. Always normalized:
/// the stored leading coefficient is nonzero, and zero has no coefficients.
class Poly {
public:
    Poly() = default;
    explicit Poly(std::vector<Elem> coeffs) : c_(std::move(coeffs)) { trim(); }

    static Poly constant(Elem c) { return Poly(std::vector<Elem>{c}); }
    static Poly one() { return constant(1); }
    /// c * x^d
    static Poly monomial(int d, Elem c = 1)
    {
        std::vector<Elem> v(static_cast<std::size_t>(d) + 1, 0);
        v.back() = c;
        return Poly(std::move(v));
    }

    const std::vector<Elem>& coeffs() const { return c_; }
    bool is_zero() const { return c_.empty(); }
    Degree degree() const
    {
        if (c_.empty())
            return std::nullopt;
        return static_cast<int>(c_.size()) - 1;
    }
    /// Degree of a nonzero polynomial; throws DomainError on zero.
    int deg() const;
    Elem lead() const { return c_.empty() ? 0 : c_.back(); }
    Elem operator[](std::size_t i) const { return i < c_.size() ? c_[i] : 0; }
    bool is_monic() const { return !c_.empty() && c_.back() == 1; }

    bool operator==(const Poly&) const = default;
    /// Canonical order: by degree (zero first), then by coefficients from the
    /// top down. Coincides with the integer order of residue indices.
    std::strong_ordering operator<=>(const Poly& o) const;

private:
    void trim()
    {
        while (!c_.empty() && c_.back() == 0)
            c_.pop_back();
    }
    std::vector<Elem> c_;
};

/// Arithmetic in F_q[x].
class PolyRing {
public:
    explicit PolyRing(FieldPtr field) : field_(std::move(field)) {}

    const Field& field() const { return *field_; }
    const FieldPtr& field_ptr() const { return field_; }
    std::uint32_t q() const { return field_->q(); }

    Poly x() const { return Poly::monomial(1); }
    Poly add(const Poly& a, const Poly& b) const;
    Poly sub(const Poly& a, const Poly& b) const;
    Poly neg(const Poly& a) const;
    Poly mul(const Poly& a, const Poly& b) const;
    Poly scale(const Poly& a, Elem c) const;
    /// Quotient and remainder; throws DomainError when b is zero.
    std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b) const;
    Poly mod(const Poly& a, const Poly& b) const { return divmod(a, b).second; }
    bool divides(const Poly& d, const Poly& a) const { return mod(a, d).is_zero(); }
    /// Monic gcd; gcd(0, 0) = 0.
    Poly gcd(const Poly& a, const Poly& b) const;
    Poly pow(const Poly& a, std::uint64_t e) const;
    Poly powmod(const Poly& a, std::uint64_t e, const Poly& m) const;
    Poly monic(const Poly& a) const;

    /// |f| = q^deg f, 0 for f = 0. Throws CapacityError beyond 2^64.
    std::uint64_t norm(const Poly& f) const;

    /// Canonical text: space-separated coefficients, lowest degree first.
    /// The zero polynomial is "0".
    std::string to_string(const Poly& f) const;
    Poly parse(const std::string& text) const;

    /// Residue index sum f_i q^i of a polynomial of degree < n, and its inverse.
    std::uint64_t index_of(const Poly& f) const;
    Poly from_index(std::uint64_t idx) const;
    /// The idx-th monic polynomial of degree d, 0 <= idx < q^d.
    Poly monic_from_index(int d, std::uint64_t idx) const;

private:
    FieldPtr field_;
};

}  // namespace ffuniv

#endif  // FFUNIV_POLY_HPP
