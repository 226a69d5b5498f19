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

#include "ffuniv/arith.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/multiprecision/cpp_int.hpp>

#include "ffuniv/error.hpp"

namespace ffuniv {

namespace {

void require_monic_positive(const Poly& f, const char* what)
{
    if (f.is_zero() || !f.is_monic() || f.deg() < 1)
        throw PreconditionError(std::string(what) + ": argument must be monic of degree >= 1");
}

int mobius(int n)
{
    int result = 1;
    for (int p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            n /= p;
            if (n % p == 0)
                return 0;
            result = -result;
        }
    }
    if (n > 1)
        result = -result;
    return result;
}

std::uint64_t checked_pow(std::uint64_t b, int e)
{
    std::uint64_t r = 1;
    for (int i = 0; i < e; ++i) {
        if (r > std::numeric_limits<std::uint64_t>::max() / b)
            throw CapacityError("q^" + std::to_string(e) + " overflows 64 bits");
        r *= b;
    }
    return r;
}

Factorization factor_with(const PolyRing& R, const Poly& f, const PrimeTable* table)
{
    if (f.is_zero())
        throw DomainError("factorize: zero polynomial");
    Factorization out;
    out.unit = f.lead();
    Poly rest = R.monic(f);
    int d = 1;
    std::vector<Poly> local;
    while (!rest.is_zero() && 2 * d <= rest.deg()) {
        const std::vector<Poly>* primes;
        if (table && d <= table->max_degree()) {
            primes = &table->of_degree(d);
        } else {
            local = primes_of_degree(R, d);
            primes = &local;
        }
        for (const auto& P : *primes) {
            if (2 * d > rest.deg())
                break;
            int e = 0;
            for (;;) {
                auto [qt, rm] = R.divmod(rest, P);
                if (!rm.is_zero())
                    break;
                rest = std::move(qt);
                ++e;
            }
            if (e)
                out.factors.emplace_back(P, e);
        }
        ++d;
    }
    if (rest.deg() >= 1) {
        auto it = std::find_if(out.factors.begin(), out.factors.end(),
                               [&](const auto& pe) { return pe.first == rest; });
        if (it != out.factors.end())
            ++it->second;
        else
            out.factors.emplace_back(rest, 1);
    }
    std::sort(out.factors.begin(), out.factors.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

}  // namespace

bool irreducible_test(const PolyRing& R, const Poly& f)
{
    require_monic_positive(f, "irreducible_test");
    const int n = f.deg();
    if (n == 1)
        return true;
    const Poly x = R.x();
    Poly h = R.mod(x, f);
    for (int i = 1; i <= n / 2; ++i) {
        h = R.powmod(h, R.q(), f);
        Poly g = R.gcd(f, R.sub(h, x));
        if (g.deg() != 0)
            return false;
    }
    return true;
}

std::vector<Poly> primes_of_degree(const PolyRing& R, int d)
{
    if (d < 1)
        throw PreconditionError("primes_of_degree: d must be >= 1");
    const std::uint64_t count = checked_pow(R.q(), d);
    if (count > (std::uint64_t{1} << 26))
        throw CapacityError("primes_of_degree: q^d = " + std::to_string(count) + " candidates");
    std::vector<Poly> out;
    for (std::uint64_t i = 0; i < count; ++i) {
        Poly f = R.monic_from_index(d, i);
        // cheap root check before the full test
        if (d > 1 && f[0] == 0)
            continue;
        if (irreducible_test(R, f))
            out.push_back(std::move(f));
    }
    return out;
}

std::uint64_t prime_count(std::uint64_t q, int d)
{
    if (d < 1)
        throw PreconditionError("prime_count: d must be >= 1");
    // signed accumulation in 128 bits
    __int128 total = 0;
    for (int e = 1; e <= d; ++e)
        if (d % e == 0) {
            int mu = mobius(e);
            if (mu)
                total += static_cast<__int128>(mu) * checked_pow(q, d / e);
        }
    return static_cast<std::uint64_t>(total / d);
}

PrimeTable::PrimeTable(const PolyRing& R, int max_degree)
{
    for (int d = 1; d <= max_degree; ++d)
        by_degree_.push_back(primes_of_degree(R, d));
}

const std::vector<Poly>& PrimeTable::of_degree(int d) const
{
    if (d < 1 || d > max_degree())
        throw PreconditionError("PrimeTable: degree " + std::to_string(d) + " outside table");
    return by_degree_[static_cast<std::size_t>(d - 1)];
}

Factorization factorize(const PolyRing& R, const Poly& f)
{
    return factor_with(R, f, nullptr);
}

Factorization factorize(const PolyRing& R, const Poly& f, const PrimeTable& primes)
{
    return factor_with(R, f, &primes);
}

Poly expand(const PolyRing& R, const Factorization& fac)
{
    Poly r = Poly::constant(fac.unit);
    for (const auto& [P, e] : fac.factors)
        r = R.mul(r, R.pow(P, static_cast<std::uint64_t>(e)));
    return r;
}

int von_mangoldt(const PolyRing& R, const Poly& f)
{
    require_monic_positive(f, "von_mangoldt");
    auto fac = factorize(R, f);
    return fac.factors.size() == 1 ? fac.factors[0].first.deg() : 0;
}

int von_mangoldt(const PolyRing& R, const Poly& f, const PrimeTable& primes)
{
    require_monic_positive(f, "von_mangoldt");
    auto fac = factorize(R, f, primes);
    return fac.factors.size() == 1 ? fac.factors[0].first.deg() : 0;
}

std::uint64_t euler_phi(const PolyRing& R, const Poly& Q)
{
    require_monic_positive(Q, "euler_phi");
    auto fac = factorize(R, Q);
    std::uint64_t phi = 1;
    for (const auto& [P, e] : fac.factors) {
        std::uint64_t np = R.norm(P);
        phi *= (np - 1) * checked_pow(np, e - 1);
    }
    return phi;
}

int omega(const PolyRing& R, const Poly& Q)
{
    require_monic_positive(Q, "omega");
    return static_cast<int>(factorize(R, Q).factors.size());
}

PhiBoundReport phi_lower_bound_check(const PolyRing& R, int n, double threshold)
{
    using boost::multiprecision::cpp_int;
    if (n < 1)
        throw PreconditionError("phi_lower_bound_check: n must be >= 1");
    const std::uint64_t q = R.q();
    PhiBoundReport rep;
    rep.n = n;
    rep.threshold = threshold;
    cpp_int phi = 1, norm = 1;
    double log_ratio = 0;
    long long degQ = 0;
    for (int j = 1; j <= n; ++j) {
        const std::uint64_t pj = prime_count(q, j);
        degQ += static_cast<long long>(j) * static_cast<long long>(pj);
        if (degQ > 200000)
            throw CapacityError("phi_lower_bound_check: deg Q exceeds 200000 at n = " + std::to_string(n));
        cpp_int qj = boost::multiprecision::pow(cpp_int(q), j);
        for (std::uint64_t i = 0; i < pj; ++i) {
            phi *= qj - 1;
            norm *= qj;
        }
        log_ratio += static_cast<double>(pj) * std::log1p(-std::pow(static_cast<double>(q), -j));
    }
    rep.degQ = static_cast<int>(degQ);
    rep.phi = phi.str();
    rep.norm = norm.str();
    rep.phi_over_norm = std::exp(log_ratio);
    const double logq_deg = degQ > 1 ? std::log(static_cast<double>(degQ)) / std::log(static_cast<double>(q)) : 0.0;
    rep.ratio = rep.phi_over_norm * logq_deg;
    rep.pass = rep.ratio > threshold;
    return rep;
}

}  // namespace ffuniv
