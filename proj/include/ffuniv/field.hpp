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

#ifndef FFUNIV_FIELD_HPP
#define FFUNIV_FIELD_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace ffuniv {

/// An element of F_q, encoded as the integer sum c_0 + c_1 p + ... + c_{k-1} p^{k-1}
/// of its F_p-coordinates. Zero is 0 and one is 1 under this encoding.
using Elem = std::uint32_t;

/// Describes F_q = F_p[y]/(m(y)). For k == 1 the modulus is empty.
struct FieldSpec {
    std::uint32_t p = 3;
    std::uint32_t k = 1;
    std::vector<std::uint32_t> modulus;  // monic, lowest degree first, length k + 1

    std::uint64_t q() const;

    /// Looks up the shipped defining polynomial for (p, k). Throws
    /// UnsupportedError when p is not an odd prime or (p, k) has no entry.
    static FieldSpec make(std::uint32_t p, std::uint32_t k = 1);

    /// "p^k" followed, for k > 1, by " : " and the modulus in coefficient form.
    std::string to_string() const;
    static FieldSpec parse(const std::string& text);

    bool operator==(const FieldSpec&) const = default;
};

bool is_odd_prime(std::uint64_t n);

/// Arithmetic in F_q. Immutable after construction.
class Field {
public:
    explicit Field(FieldSpec spec);

    const FieldSpec& spec() const { return spec_; }
    std::uint32_t p() const { return spec_.p; }
    std::uint32_t k() const { return spec_.k; }
    std::uint32_t q() const { return q_; }

    Elem add(Elem a, Elem b) const
    {
        if (spec_.k == 1) {
            Elem s = a + b;
            return s >= q_ ? s - q_ : s;
        }
        return add_ext(a, b);
    }
    Elem neg(Elem a) const
    {
        if (spec_.k == 1)
            return a == 0 ? 0 : q_ - a;
        return neg_ext(a);
    }
    Elem sub(Elem a, Elem b) const { return add(a, neg(b)); }
    Elem mul(Elem a, Elem b) const
    {
        if (spec_.k == 1)
            return static_cast<Elem>((std::uint64_t{a} * b) % q_);
        if (a == 0 || b == 0)
            return 0;
        std::uint32_t e = log_[a] + log_[b];
        if (e >= q_ - 1)
            e -= q_ - 1;
        return exp_[e];
    }
    /// Throws DomainError on zero.
    Elem inv(Elem a) const;
    Elem pow(Elem a, std::uint64_t e) const;

    /// Generator of the cyclic group F_q^*; smallest encoding that works.
    Elem primitive() const { return primitive_; }

    std::vector<std::uint32_t> coords(Elem a) const;
    Elem from_coords(std::span<const std::uint32_t> c) const;

    /// Decimal text of one coefficient: the integer for k == 1, the k
    /// F_p-coordinates written as concatenated digits (lowest first) otherwise.
    std::string elem_to_string(Elem a) const;
    Elem elem_from_string(const std::string& s) const;

private:
    Elem add_ext(Elem a, Elem b) const;
    Elem neg_ext(Elem a) const;

    FieldSpec spec_;
    std::uint32_t q_;
    Elem primitive_ = 1;
    std::vector<std::uint32_t> log_;
    std::vector<Elem> exp_;
};

using FieldPtr = std::shared_ptr<const Field>;

inline FieldPtr make_field(std::uint32_t p, std::uint32_t k = 1)
{
    return std::make_shared<const Field>(FieldSpec::make(p, k));
}

}  // namespace ffuniv

#endif  // FFUNIV_FIELD_HPP
