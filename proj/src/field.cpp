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

#include "ffuniv/field.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <utility>

#include "ffuniv/error.hpp"

namespace ffuniv {

namespace {

// Conway polynomials, lowest degree first.
const std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<std::uint32_t>>&
modulus_table()
{
    static const std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<std::uint32_t>> t = {
        {{3, 2}, {2, 2, 1}},
        {{3, 3}, {1, 2, 0, 1}},
        {{3, 4}, {2, 0, 0, 2, 1}},
        {{5, 2}, {2, 4, 1}},
        {{5, 3}, {3, 3, 0, 1}},
        {{5, 4}, {2, 4, 4, 0, 1}},
        {{7, 2}, {3, 6, 1}},
        {{7, 3}, {4, 0, 6, 1}},
        {{7, 4}, {3, 4, 5, 0, 1}},
    };
    return t;
}

std::vector<std::string> words(const std::string& s)
{
    std::istringstream in(s);
    std::vector<std::string> out;
    std::string w;
    while (in >> w)
        out.push_back(w);
    return out;
}

}  // namespace

bool is_odd_prime(std::uint64_t n)
{
    if (n < 3 || n % 2 == 0)
        return false;
    for (std::uint64_t d = 3; d * d <= n; d += 2)
        if (n % d == 0)
            return false;
    return true;
}

std::uint64_t FieldSpec::q() const
{
    std::uint64_t r = 1;
    for (std::uint32_t i = 0; i < k; ++i)
        r *= p;
    return r;
}

FieldSpec FieldSpec::make(std::uint32_t p, std::uint32_t k)
{
    if (!is_odd_prime(p))
        throw UnsupportedError("field characteristic must be an odd prime, got " + std::to_string(p));
    if (k == 0)
        throw UnsupportedError("extension degree must be at least 1");
    FieldSpec s;
    s.p = p;
    s.k = k;
    if (k == 1) {
        if (p >= (1u << 24))
            throw CapacityError("prime field too large: p = " + std::to_string(p));
        return s;
    }
    auto it = modulus_table().find({p, k});
    if (it == modulus_table().end())
        throw UnsupportedError("no shipped defining polynomial for GF(" + std::to_string(p) + "^" +
                               std::to_string(k) + "); supported: p <= 7, k <= 4");
    s.modulus = it->second;
    return s;
}

std::string FieldSpec::to_string() const
{
    std::string out = std::to_string(p) + "^" + std::to_string(k);
    if (k > 1) {
        out += " :";
        for (auto c : modulus)
            out += " " + std::to_string(c);
    }
    return out;
}

FieldSpec FieldSpec::parse(const std::string& text)
{
    auto colon = text.find(':');
    std::string head = text.substr(0, colon);
    auto caret = head.find('^');
    std::uint32_t p = 0, k = 1;
    try {
        if (caret == std::string::npos) {
            p = static_cast<std::uint32_t>(std::stoul(head));
        } else {
            p = static_cast<std::uint32_t>(std::stoul(head.substr(0, caret)));
            k = static_cast<std::uint32_t>(std::stoul(head.substr(caret + 1)));
        }
    } catch (const std::exception&) {
        throw ParseError("bad field spec '" + text + "'");
    }
    FieldSpec s = make(p, k);
    if (colon != std::string::npos) {
        std::vector<std::uint32_t> m;
        for (const auto& w : words(text.substr(colon + 1)))
            m.push_back(static_cast<std::uint32_t>(std::stoul(w)));
        if (m != s.modulus)
            throw UnsupportedError("field modulus '" + text.substr(colon + 1) +
                                   "' differs from the shipped polynomial for " + s.to_string());
    }
    return s;
}

Field::Field(FieldSpec spec) : spec_(std::move(spec)), q_(static_cast<std::uint32_t>(spec_.q()))
{
    if (spec_.k == 1) {
        // smallest generator of (Z/p)^*
        std::vector<std::uint64_t> factors;
        std::uint64_t n = q_ - 1;
        for (std::uint64_t d = 2; d * d <= n; ++d)
            if (n % d == 0) {
                factors.push_back(d);
                while (n % d == 0)
                    n /= d;
            }
        if (n > 1)
            factors.push_back(n);
        for (Elem g = 1; g < q_; ++g) {
            bool ok = true;
            for (auto f : factors)
                if (pow(g, (q_ - 1) / f) == 1) {
                    ok = false;
                    break;
                }
            if (ok) {
                primitive_ = g;
                break;
            }
        }
        return;
    }
    // Extension field: find the smallest primitive element by schoolbook
    // multiplication, then tabulate logs.
    const std::uint32_t p = spec_.p, k = spec_.k;
    auto slow_mul = [&](Elem a, Elem b) {
        auto ca = coords(a), cb = coords(b);
        std::vector<std::uint64_t> prod(2 * k - 1, 0);
        for (std::uint32_t i = 0; i < k; ++i)
            for (std::uint32_t j = 0; j < k; ++j)
                prod[i + j] += std::uint64_t{ca[i]} * cb[j];
        for (auto& v : prod)
            v %= p;
        for (std::uint32_t d = 2 * k - 2; d >= k; --d) {
            std::uint64_t c = prod[d];
            if (c == 0)
                continue;
            prod[d] = 0;
            for (std::uint32_t i = 0; i < k; ++i)
                prod[d - k + i] = (prod[d - k + i] + (p - spec_.modulus[i]) * c) % p;
        }
        std::vector<std::uint32_t> out(k);
        for (std::uint32_t i = 0; i < k; ++i)
            out[i] = static_cast<std::uint32_t>(prod[i]);
        return from_coords(out);
    };
    log_.assign(q_, 0);
    exp_.assign(q_ - 1, 0);
    for (Elem g = 2; g < q_; ++g) {
        Elem x = 1;
        std::uint32_t order = 0;
        do {
            exp_[order] = x;
            x = slow_mul(x, g);
            ++order;
        } while (x != 1 && order < q_ - 1);
        if (x == 1 && order == q_ - 1) {
            primitive_ = g;
            break;
        }
    }
    if (primitive_ == 1)
        throw ConstructionError("defining polynomial of " + spec_.to_string() + " is not primitive-capable");
    for (std::uint32_t i = 0; i < q_ - 1; ++i)
        log_[exp_[i]] = i;
}

Elem Field::add_ext(Elem a, Elem b) const
{
    Elem out = 0, place = 1;
    const std::uint32_t p = spec_.p;
    for (std::uint32_t i = 0; i < spec_.k; ++i) {
        std::uint32_t d = (a % p + b % p) % p;
        out += d * place;
        place *= p;
        a /= p;
        b /= p;
    }
    return out;
}

Elem Field::neg_ext(Elem a) const
{
    Elem out = 0, place = 1;
    const std::uint32_t p = spec_.p;
    for (std::uint32_t i = 0; i < spec_.k; ++i) {
        std::uint32_t d = a % p;
        out += (d == 0 ? 0 : p - d) * place;
        place *= p;
        a /= p;
    }
    return out;
}

Elem Field::inv(Elem a) const
{
    if (a == 0)
        throw DomainError("inverse of zero in F_" + std::to_string(q_));
    return pow(a, q_ - 2);
}

Elem Field::pow(Elem a, std::uint64_t e) const
{
    Elem r = 1;
    while (e) {
        if (e & 1)
            r = mul(r, a);
        a = mul(a, a);
        e >>= 1;
    }
    return r;
}

std::vector<std::uint32_t> Field::coords(Elem a) const
{
    std::vector<std::uint32_t> c(spec_.k);
    for (std::uint32_t i = 0; i < spec_.k; ++i) {
        c[i] = a % spec_.p;
        a /= spec_.p;
    }
    return c;
}

Elem Field::from_coords(std::span<const std::uint32_t> c) const
{
    Elem out = 0, place = 1;
    for (std::uint32_t i = 0; i < spec_.k; ++i) {
        out += (i < c.size() ? c[i] % spec_.p : 0) * place;
        place *= spec_.p;
    }
    return out;
}

std::string Field::elem_to_string(Elem a) const
{
    if (spec_.k == 1)
        return std::to_string(a);
    std::string s;
    for (auto c : coords(a))
        s += static_cast<char>('0' + c);
    return s;
}

Elem Field::elem_from_string(const std::string& s) const
{
    if (s.empty())
        throw ParseError("empty coefficient");
    if (spec_.k == 1) {
        std::uint64_t v = 0;
        for (char ch : s) {
            if (ch < '0' || ch > '9')
                throw ParseError("bad coefficient '" + s + "'");
            v = v * 10 + static_cast<std::uint64_t>(ch - '0');
            if (v >= q_)
                throw ParseError("coefficient '" + s + "' out of range for F_" + std::to_string(q_));
        }
        return static_cast<Elem>(v);
    }
    if (s.size() != spec_.k)
        throw ParseError("coefficient '" + s + "' must have " + std::to_string(spec_.k) + " digits");
    std::vector<std::uint32_t> c;
    for (char ch : s) {
        if (ch < '0' || static_cast<std::uint32_t>(ch - '0') >= spec_.p)
            throw ParseError("bad digit in coefficient '" + s + "'");
        c.push_back(static_cast<std::uint32_t>(ch - '0'));
    }
    return from_coords(c);
}

}  // namespace ffuniv
