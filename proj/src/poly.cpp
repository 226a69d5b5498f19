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

#include "ffuniv/poly.hpp"

#include <limits>
#include <sstream>

#include "ffuniv/error.hpp"

namespace ffuniv {

int Poly::deg() const
{
    if (c_.empty())
        throw DomainError("degree of the zero polynomial");
    return static_cast<int>(c_.size()) - 1;
}

std::strong_ordering Poly::operator<=>(const Poly& o) const
{
    if (c_.size() != o.c_.size())
        return c_.size() <=> o.c_.size();
    for (std::size_t i = c_.size(); i-- > 0;)
        if (c_[i] != o.c_[i])
            return c_[i] <=> o.c_[i];
    return std::strong_ordering::equal;
}

Poly PolyRing::add(const Poly& a, const Poly& b) const
{
    const auto& F = *field_;
    std::vector<Elem> r(std::max(a.coeffs().size(), b.coeffs().size()));
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] = F.add(a[i], b[i]);
    return Poly(std::move(r));
}

Poly PolyRing::neg(const Poly& a) const
{
    std::vector<Elem> r(a.coeffs());
    for (auto& c : r)
        c = field_->neg(c);
    return Poly(std::move(r));
}

Poly PolyRing::sub(const Poly& a, const Poly& b) const
{
    return add(a, neg(b));
}

Poly PolyRing::mul(const Poly& a, const Poly& b) const
{
    if (a.is_zero() || b.is_zero())
        return {};
    const auto& F = *field_;
    const auto& ac = a.coeffs();
    const auto& bc = b.coeffs();
    std::vector<Elem> r(ac.size() + bc.size() - 1, 0);
    for (std::size_t i = 0; i < ac.size(); ++i) {
        if (ac[i] == 0)
            continue;
        for (std::size_t j = 0; j < bc.size(); ++j)
            r[i + j] = F.add(r[i + j], F.mul(ac[i], bc[j]));
    }
    return Poly(std::move(r));
}

Poly PolyRing::scale(const Poly& a, Elem c) const
{
    std::vector<Elem> r(a.coeffs());
    for (auto& v : r)
        v = field_->mul(v, c);
    return Poly(std::move(r));
}

std::pair<Poly, Poly> PolyRing::divmod(const Poly& a, const Poly& b) const
{
    if (b.is_zero())
        throw DomainError("polynomial division by zero");
    const auto& F = *field_;
    if (a.coeffs().size() < b.coeffs().size())
        return {Poly{}, a};
    std::vector<Elem> rem(a.coeffs());
    const auto& bc = b.coeffs();
    const std::size_t db = bc.size() - 1;
    const Elem inv_lead = F.inv(b.lead());
    std::vector<Elem> quo(rem.size() - db, 0);
    for (std::size_t i = rem.size(); i-- > db;) {
        Elem c = rem[i];
        if (c == 0)
            continue;
        Elem f = F.mul(c, inv_lead);
        quo[i - db] = f;
        for (std::size_t j = 0; j <= db; ++j)
            rem[i - db + j] = F.sub(rem[i - db + j], F.mul(f, bc[j]));
    }
    rem.resize(db);
    return {Poly(std::move(quo)), Poly(std::move(rem))};
}

Poly PolyRing::monic(const Poly& a) const
{
    if (a.is_zero())
        return a;
    return scale(a, field_->inv(a.lead()));
}

Poly PolyRing::gcd(const Poly& a, const Poly& b) const
{
    Poly x = a, y = b;
    while (!y.is_zero()) {
        Poly r = mod(x, y);
        x = std::move(y);
        y = std::move(r);
    }
    return monic(x);
}

Poly PolyRing::pow(const Poly& a, std::uint64_t e) const
{
    Poly r = Poly::one(), base = a;
    while (e) {
        if (e & 1)
            r = mul(r, base);
        e >>= 1;
        if (e)
            base = mul(base, base);
    }
    return r;
}

Poly PolyRing::powmod(const Poly& a, std::uint64_t e, const Poly& m) const
{
    Poly r = mod(Poly::one(), m), base = mod(a, m);
    while (e) {
        if (e & 1)
            r = mod(mul(r, base), m);
        e >>= 1;
        if (e)
            base = mod(mul(base, base), m);
    }
    return r;
}

std::uint64_t PolyRing::norm(const Poly& f) const
{
    if (f.is_zero())
        return 0;
    std::uint64_t r = 1;
    for (int i = 0; i < f.deg(); ++i) {
        if (r > std::numeric_limits<std::uint64_t>::max() / q())
            throw CapacityError("norm q^deg overflows 64 bits");
        r *= q();
    }
    return r;
}

std::string PolyRing::to_string(const Poly& f) const
{
    if (f.is_zero())
        return "0";
    std::string s;
    for (std::size_t i = 0; i < f.coeffs().size(); ++i) {
        if (i)
            s += ' ';
        s += field_->elem_to_string(f.coeffs()[i]);
    }
    return s;
}

Poly PolyRing::parse(const std::string& text) const
{
    std::istringstream in(text);
    std::vector<Elem> c;
    std::string w;
    while (in >> w)
        c.push_back(field_->elem_from_string(w));
    if (c.empty())
        throw ParseError("empty polynomial text");
    return Poly(std::move(c));
}

std::uint64_t PolyRing::index_of(const Poly& f) const
{
    std::uint64_t idx = 0;
    const auto& c = f.coeffs();
    for (std::size_t i = c.size(); i-- > 0;)
        idx = idx * q() + c[i];
    return idx;
}

Poly PolyRing::from_index(std::uint64_t idx) const
{
    std::vector<Elem> c;
    while (idx) {
        c.push_back(static_cast<Elem>(idx % q()));
        idx /= q();
    }
    return Poly(std::move(c));
}

Poly PolyRing::monic_from_index(int d, std::uint64_t idx) const
{
    std::vector<Elem> c(static_cast<std::size_t>(d) + 1, 0);
    for (int i = 0; i < d; ++i) {
        c[static_cast<std::size_t>(i)] = static_cast<Elem>(idx % q());
        idx /= q();
    }
    c.back() = 1;
    return Poly(std::move(c));
}

}  // namespace ffuniv
