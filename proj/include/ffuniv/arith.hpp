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

#ifndef FFUNIV_ARITH_HPP
#define FFUNIV_ARITH_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ffuniv/poly.hpp"

namespace ffuniv {

struct Factorization {
    Elem unit = 1;
    std::vector<std::pair<Poly, int>> factors;  // monic primes, ascending canonical order
};

/// Ben-Or test. Requires f monic of degree >= 1 (PreconditionError otherwise).
bool irreducible_test(const PolyRing& R, const Poly& f);

/// All monic irreducibles of degree d in canonical order.
std::vector<Poly> primes_of_degree(const PolyRing& R, int d);

/// Exact prime count (1/d) sum_{e | d} mu(e) q^{d/e}.
std::uint64_t prime_count(std::uint64_t q, int d);

/// Immutable table of the primes of degree 1..max_degree.
class PrimeTable {
public:
    PrimeTable(const PolyRing& R, int max_degree);

    int max_degree() const { return static_cast<int>(by_degree_.size()); }
    /// Primes of degree d (1 <= d <= max_degree()).
    const std::vector<Poly>& of_degree(int d) const;

private:
    std::vector<std::vector<Poly>> by_degree_;
};

/// Trial division by enumerated primes. Throws DomainError on zero.
Factorization factorize(const PolyRing& R, const Poly& f);
Factorization factorize(const PolyRing& R, const Poly& f, const PrimeTable& primes);
Poly expand(const PolyRing& R, const Factorization& fac);

/// deg P when f = P^n, else 0. Requires f monic with deg >= 1.
int von_mangoldt(const PolyRing& R, const Poly& f);
int von_mangoldt(const PolyRing& R, const Poly& f, const PrimeTable& primes);

/// Number of coprime residues mod Q. Requires Q monic with deg >= 1.
std::uint64_t euler_phi(const PolyRing& R, const Poly& Q);
/// Number of distinct monic primes dividing Q.
int omega(const PolyRing& R, const Poly& Q);

struct PhiBoundReport {
    int n = 0;
    int degQ = 0;
    std::string phi;   // exact decimal
    std::string norm;  // |Q| exact decimal
    double phi_over_norm = 0;
    double ratio = 0;  // phi(Q) log_q(deg Q) / |Q|
    double threshold = 0.25;
    bool pass = false;
};

/// Q = product of all monic primes of degree <= n.
PhiBoundReport phi_lower_bound_check(const PolyRing& R, int n, double threshold = 0.25);

}  // namespace ffuniv

#endif  // FFUNIV_ARITH_HPP
