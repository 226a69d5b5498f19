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

#include "ffuniv/characters.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>
#include <sstream>

#include "ffuniv/arith.hpp"
#include "ffuniv/error.hpp"

namespace ffuniv {

namespace {

constexpr int kMaxDeg = 32;

std::vector<std::uint64_t> prime_factors(std::uint64_t n)
{
    std::vector<std::uint64_t> out;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) {
            out.push_back(d);
            while (n % d == 0)
                n /= d;
        }
    if (n > 1)
        out.push_back(n);
    return out;
}

}  // namespace

cplx unit_root(std::uint64_t num, std::uint64_t den)
{
    num %= den;
    if (num == 0)
        return {1.0, 0.0};
    if ((4 * num) % den == 0) {
        switch ((4 * num) / den) {
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
        }
    }
    const double t = 2.0 * std::numbers::pi * static_cast<double>(num) / static_cast<double>(den);
    return {std::cos(t), std::sin(t)};
}

// ---------------------------------------------------------------------------
// ResidueRing

ResidueRing::ResidueRing(PolyRing ring, Poly Q) : ring_(std::move(ring)), Q_(std::move(Q))
{
    if (Q_.is_zero() || !Q_.is_monic() || Q_.deg() < 1)
        throw PreconditionError("modulus must be monic of degree >= 1");
    n_ = Q_.deg();
    if (n_ > kMaxDeg)
        throw CapacityError("modulus degree " + std::to_string(n_) + " exceeds " + std::to_string(kMaxDeg));
    size_ = 1;
    for (int i = 0; i < n_; ++i) {
        size_ *= ring_.q();
        if (size_ > kMaxResidues)
            throw CapacityError("q^deg Q exceeds the residue capacity " + std::to_string(kMaxResidues) +
                                " (limiting parameter: deg Q = " + std::to_string(n_) + ")");
    }
    qc_.assign(Q_.coeffs().begin(), Q_.coeffs().end());
}

std::uint64_t ResidueRing::mul(std::uint64_t a, std::uint64_t b) const
{
    const std::uint32_t q = ring_.q();
    std::array<std::uint32_t, kMaxDeg> da{}, db{};
    int la = 0, lb = 0;
    while (a) {
        da[static_cast<std::size_t>(la++)] = static_cast<std::uint32_t>(a % q);
        a /= q;
    }
    while (b) {
        db[static_cast<std::size_t>(lb++)] = static_cast<std::uint32_t>(b % q);
        b /= q;
    }
    if (la == 0 || lb == 0)
        return 0;
    const Field& F = ring_.field();
    std::array<std::uint64_t, 2 * kMaxDeg> prod{};
    const int lp = la + lb - 1;
    if (F.k() == 1) {
        const std::uint64_t p = F.p();
        for (int i = 0; i < la; ++i) {
            if (!da[static_cast<std::size_t>(i)])
                continue;
            for (int j = 0; j < lb; ++j)
                prod[static_cast<std::size_t>(i + j)] +=
                    std::uint64_t{da[static_cast<std::size_t>(i)]} * db[static_cast<std::size_t>(j)];
            if ((i & 7) == 7)
                for (int t = 0; t < lp; ++t)
                    prod[static_cast<std::size_t>(t)] %= p;
        }
        for (int t = 0; t < lp; ++t)
            prod[static_cast<std::size_t>(t)] %= p;
        for (int d = lp - 1; d >= n_; --d) {
            const std::uint64_t c = prod[static_cast<std::size_t>(d)];
            if (!c)
                continue;
            prod[static_cast<std::size_t>(d)] = 0;
            for (int i = 0; i < n_; ++i) {
                auto& slot = prod[static_cast<std::size_t>(d - n_ + i)];
                slot = (slot + c * (p - qc_[static_cast<std::size_t>(i)])) % p;
            }
        }
    } else {
        for (int i = 0; i < la; ++i)
            for (int j = 0; j < lb; ++j) {
                auto& slot = prod[static_cast<std::size_t>(i + j)];
                slot = F.add(static_cast<Elem>(slot),
                             F.mul(da[static_cast<std::size_t>(i)], db[static_cast<std::size_t>(j)]));
            }
        for (int d = lp - 1; d >= n_; --d) {
            const Elem c = static_cast<Elem>(prod[static_cast<std::size_t>(d)]);
            if (!c)
                continue;
            prod[static_cast<std::size_t>(d)] = 0;
            for (int i = 0; i < n_; ++i) {
                auto& slot = prod[static_cast<std::size_t>(d - n_ + i)];
                slot = F.sub(static_cast<Elem>(slot), F.mul(c, qc_[static_cast<std::size_t>(i)]));
            }
        }
    }
    std::uint64_t idx = 0;
    for (int i = std::min(lp, n_) - 1; i >= 0; --i)
        idx = idx * q + prod[static_cast<std::size_t>(i)];
    return idx;
}

std::uint64_t ResidueRing::pow(std::uint64_t a, std::uint64_t e) const
{
    std::uint64_t r = n_ > 0 ? 1 : 0;
    while (e) {
        if (e & 1)
            r = mul(r, a);
        e >>= 1;
        if (e)
            a = mul(a, a);
    }
    return r;
}

// ---------------------------------------------------------------------------
// UnitGroup

UnitGroup::UnitGroup(const PolyRing& R, const Poly& Q) : rr_(R, Q) {}

std::shared_ptr<const UnitGroup> UnitGroup::build(const PolyRing& R, const Poly& Q)
{
    std::shared_ptr<UnitGroup> G(new UnitGroup(R, Q));
    const ResidueRing& rr = G->rr_;
    const std::uint64_t size = rr.size();

    // coprimality through the prime divisors of Q
    const auto fac = factorize(R, Q);
    std::vector<char> coprime(size, 1);
    coprime[0] = 0;
    for (const auto& [P, e] : fac.factors) {
        // multiples of P of degree < n: P * t for deg t < n - deg P
        const int dt = Q.deg() - P.deg();
        std::uint64_t count = 1;
        for (int i = 0; i < dt; ++i)
            count *= R.q();
        for (std::uint64_t t = 0; t < count; ++t)
            coprime[R.index_of(R.mul(P, R.from_index(t)))] = 0;
    }
    std::uint64_t phi = 0;
    for (auto c : coprime)
        phi += static_cast<std::uint64_t>(c);
    G->phi_ = phi;

    // exponent of prod (F_q[x]/P^e)^*: lcm of q^{deg P} - 1 and p^t, p^t >= e
    std::uint64_t group_exponent = 1;
    for (const auto& [P, e] : fac.factors) {
        std::uint64_t pt = 1;
        while (pt < static_cast<std::uint64_t>(e))
            pt *= R.field().p();
        group_exponent = std::lcm(group_exponent, std::lcm(R.norm(P) - 1, pt));
    }

    // H = subgroup generated so far; hpos = flat index in H or -1
    std::vector<std::int32_t> hpos(size, -1);
    std::vector<std::uint32_t> hlist{1};
    hpos[1] = 0;
    std::vector<std::uint32_t> qorder(size, 0);

    while (hlist.size() < phi) {
        const std::uint64_t nq = phi / hlist.size();
        const auto primes = prime_factors(nq);
        std::fill(qorder.begin(), qorder.end(), 0u);
        for (auto h : hlist)
            qorder[h] = 1;

        auto mark_coset = [&](std::uint64_t b, std::uint32_t ord) {
            for (auto h : hlist)
                qorder[rr.mul(b, h)] = ord;
        };
        // order of a in G/H, one prime of nq at a time
        auto quotient_order = [&](std::uint64_t a) {
            std::uint64_t order = 1;
            for (auto p : primes) {
                std::uint64_t pe = 1, rest = nq;
                while (rest % p == 0) {
                    rest /= p;
                    pe *= p;
                }
                std::uint64_t b = rr.pow(a, rest);
                while (hpos[b] < 0) {
                    b = rr.pow(b, p);
                    order *= p;
                }
            }
            return order;
        };

        // No element of G/H can have order above the exponent of G (first
        // round) or above the previous invariant factor.
        const std::uint64_t bound = std::gcd(nq, G->orders_.empty() ? group_exponent : G->orders_.back());
        std::uint64_t best = 0, best_ord = 0;
        for (std::uint64_t a = 1; a < size; ++a) {
            if (!coprime[a] || hpos[a] >= 0)
                continue;
            if (qorder[a] == 0) {
                const std::uint64_t m = quotient_order(a);
                mark_coset(a, static_cast<std::uint32_t>(m));
                std::uint64_t b = a;
                for (std::uint64_t j = 2; j < m; ++j) {
                    b = rr.mul(b, a);
                    if (qorder[b] == 0)
                        mark_coset(b, static_cast<std::uint32_t>(m / std::gcd(m, j)));
                }
            }
            if (qorder[a] > best_ord) {
                best_ord = qorder[a];
                best = a;
                if (best_ord == bound)
                    break;
            }
        }
        if (best_ord < 2)
            throw ConstructionError("unit group decomposition stalled");

        // correct the candidate so that its order in G equals best_ord
        const std::uint64_t m = best_ord;
        const std::uint64_t gm = rr.pow(best, m);
        if (hpos[gm] < 0)
            throw ConstructionError("candidate power not in subgroup");
        std::uint64_t corrected = best;
        {
            std::uint64_t flat = static_cast<std::uint64_t>(hpos[gm]);
            for (std::size_t i = G->orders_.size(); i-- > 0;) {
                const std::uint64_t ni = G->orders_[i];
                const std::uint64_t ei = flat % ni;
                flat /= ni;
                if (ei % m != 0)
                    throw ConstructionError("unit group correction failed: exponent not divisible");
                const std::uint64_t shift = (ni - ei / m) % ni;
                if (shift)
                    corrected = rr.mul(corrected, rr.pow(G->gens_[i], shift));
            }
        }
        if (rr.pow(corrected, m) != 1)
            throw ConstructionError("corrected generator has wrong order");

        // H <- H x <g>, new coordinate last (fastest)
        std::vector<std::uint64_t> pw(m);
        pw[0] = 1;
        for (std::uint64_t j = 1; j < m; ++j)
            pw[j] = rr.mul(pw[j - 1], corrected);
        std::vector<std::uint32_t> next(hlist.size() * m);
        for (std::size_t o = 0; o < hlist.size(); ++o)
            for (std::uint64_t j = 0; j < m; ++j) {
                const std::uint64_t e = rr.mul(hlist[o], pw[j]);
                if (j != 0 && hpos[e] >= 0)
                    throw ConstructionError("subgroup product is not direct");
                next[o * m + j] = static_cast<std::uint32_t>(e);
            }
        for (std::size_t i = 0; i < next.size(); ++i)
            hpos[next[i]] = static_cast<std::int32_t>(i);
        hlist = std::move(next);
        G->gens_.push_back(corrected);
        G->orders_.push_back(static_cast<std::uint32_t>(m));
    }

    G->flat_ = std::move(hpos);
    G->residue_ = std::move(hlist);
    std::uint64_t L = 1;
    for (auto n : G->orders_)
        L = std::lcm(L, std::uint64_t{n});
    G->exponent_ = L;
    for (auto n : G->orders_)
        G->weights_.push_back(L / n);
    return G;
}

std::vector<Poly> UnitGroup::generator_polys() const
{
    std::vector<Poly> out;
    for (auto g : gens_)
        out.push_back(ring().from_index(g));
    return out;
}

std::vector<std::uint32_t> UnitGroup::unflatten(std::uint64_t flat) const
{
    std::vector<std::uint32_t> d(orders_.size());
    for (std::size_t i = orders_.size(); i-- > 0;) {
        d[i] = static_cast<std::uint32_t>(flat % orders_[i]);
        flat /= orders_[i];
    }
    return d;
}

std::uint64_t UnitGroup::flatten(std::span<const std::uint32_t> digits) const
{
    std::uint64_t f = 0;
    for (std::size_t i = 0; i < orders_.size(); ++i)
        f = f * orders_[i] + (i < digits.size() ? digits[i] : 0);
    return f;
}

std::optional<std::vector<std::uint32_t>> UnitGroup::dlog(std::uint64_t residue) const
{
    if (residue >= flat_.size() || flat_[residue] < 0)
        return std::nullopt;
    return unflatten(static_cast<std::uint64_t>(flat_[residue]));
}

std::int64_t UnitGroup::angle(std::span<const std::uint32_t> m, std::uint64_t residue) const
{
    std::int64_t f = flat_[residue];
    if (f < 0)
        return -1;
    std::uint64_t flat = static_cast<std::uint64_t>(f);
    std::uint64_t acc = 0;
    for (std::size_t i = orders_.size(); i-- > 0;) {
        const std::uint64_t d = flat % orders_[i];
        flat /= orders_[i];
        acc += (std::uint64_t{m[i]} * d % orders_[i]) * weights_[i];
    }
    return static_cast<std::int64_t>(acc % exponent_);
}

// ---------------------------------------------------------------------------
// Characters

Character::Character(GroupPtr group, std::vector<std::uint32_t> exps)
    : group_(std::move(group)), exps_(std::move(exps))
{
    if (exps_.size() != group_->rank())
        throw PreconditionError("character exponent tuple has wrong length");
    for (std::size_t i = 0; i < exps_.size(); ++i)
        if (exps_[i] >= group_->orders()[i])
            throw PreconditionError("character exponent out of range");
}

bool Character::is_principal() const
{
    return std::all_of(exps_.begin(), exps_.end(), [](auto m) { return m == 0; });
}

std::string Character::to_string() const
{
    std::string s = group_->ring().to_string(group_->modulus()) + " :";
    for (std::size_t i = 0; i < exps_.size(); ++i)
        s += (i ? "," : " ") + std::to_string(exps_[i]);
    return s;
}

Character Character::parse(GroupPtr group, const std::string& text)
{
    auto colon = text.find(':');
    if (colon == std::string::npos)
        throw ParseError("character text needs 'Q : m_1,...,m_r'");
    Poly Q = group->ring().parse(text.substr(0, colon));
    if (Q != group->modulus())
        throw ParseError("character modulus does not match the group");
    std::vector<std::uint32_t> m;
    std::string rest = text.substr(colon + 1);
    std::replace(rest.begin(), rest.end(), ',', ' ');
    std::istringstream in(rest);
    std::string w;
    while (in >> w) {
        try {
            m.push_back(static_cast<std::uint32_t>(std::stoul(w)));
        } catch (const std::exception&) {
            throw ParseError("bad character exponent '" + w + "'");
        }
    }
    return Character(std::move(group), std::move(m));
}

Character character_at(const GroupPtr& group, std::uint64_t index)
{
    return Character(group, group->unflatten(index));
}

std::vector<Character> characters(const GroupPtr& group)
{
    std::vector<Character> out;
    out.reserve(group->phi());
    for (std::uint64_t i = 0; i < group->phi(); ++i)
        out.push_back(character_at(group, i));
    return out;
}

std::optional<Angle> char_angle_residue(const Character& chi, std::uint64_t residue)
{
    auto a = chi.group().angle(chi.exps(), residue);
    if (a < 0)
        return std::nullopt;
    return Angle{static_cast<std::uint64_t>(a), chi.group().exponent()};
}

std::optional<Angle> char_angle(const Character& chi, const Poly& f)
{
    return char_angle_residue(chi, chi.group().reduce(f));
}

cplx char_eval(const Character& chi, const Poly& f)
{
    auto a = char_angle(chi, f);
    if (!a)
        return {0.0, 0.0};
    return unit_root(a->num, a->den);
}

bool is_even(const Character& chi)
{
    const auto q = chi.group().q();
    for (Elem c = 1; c < q; ++c) {
        auto a = char_angle_residue(chi, c);
        if (!a || a->num != 0)
            return false;
    }
    return true;
}

Character char_product(const Character& a, const Character& b)
{
    if (a.group_ptr() != b.group_ptr())
        throw PreconditionError("characters belong to different groups");
    std::vector<std::uint32_t> m(a.exps().size());
    for (std::size_t i = 0; i < m.size(); ++i)
        m[i] = (a.exps()[i] + b.exps()[i]) % a.group().orders()[i];
    return Character(a.group_ptr(), std::move(m));
}

Character char_conj(const Character& chi)
{
    std::vector<std::uint32_t> m(chi.exps().size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        const auto n = chi.group().orders()[i];
        m[i] = (n - chi.exps()[i]) % n;
    }
    return Character(chi.group_ptr(), std::move(m));
}

MeanValue orthogonality_mean_value(const GroupPtr& group,
                                   std::span<const std::pair<Poly, cplx>> terms)
{
    const auto& G = *group;
    std::vector<std::uint64_t> res;
    std::set<std::uint64_t> seen;
    MeanValue mv;
    for (const auto& [N, a] : terms) {
        if (N.is_zero() || N.deg() >= G.degQ())
            throw PreconditionError("orthogonality_mean_value: every |N| must be below |Q|");
        const std::uint64_t r = G.ring().index_of(N);
        if (!seen.insert(r).second)
            throw PreconditionError("orthogonality_mean_value: duplicate N");
        if (G.flat_of(r) < 0)
            throw PreconditionError("orthogonality_mean_value: N must be coprime to Q");
        res.push_back(r);
        mv.rhs += std::norm(a);
    }
    mv.rhs *= static_cast<double>(G.phi());
    const std::uint64_t L = G.exponent();
    std::vector<cplx> roots(L);
    for (std::uint64_t j = 0; j < L; ++j)
        roots[j] = unit_root(j, L);
    for (std::uint64_t c = 0; c < G.phi(); ++c) {
        const auto m = G.unflatten(c);
        cplx s = 0;
        for (std::size_t t = 0; t < res.size(); ++t)
            s += terms[t].second * roots[static_cast<std::uint64_t>(G.angle(m, res[t]))];
        mv.lhs += std::norm(s);
    }
    return mv;
}

}  // namespace ffuniv
