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

#include <gtest/gtest.h>

#include <random>

#include "ffuniv/arith.hpp"
#include "ffuniv/error.hpp"
#include "ffuniv/poly.hpp"

using namespace ffuniv;

namespace {

PolyRing ring(std::uint32_t p, std::uint32_t k = 1)
{
    return PolyRing(make_field(p, k));
}

// Oracle: trial division by every monic polynomial of degree 1..deg/2.
bool brute_irreducible(const PolyRing& R, const Poly& f)
{
    const int n = f.deg();
    for (int d = 1; 2 * d <= n; ++d) {
        std::uint64_t count = 1;
        for (int i = 0; i < d; ++i)
            count *= R.q();
        for (std::uint64_t i = 0; i < count; ++i)
            if (R.divides(R.monic_from_index(d, i), f))
                return false;
    }
    return true;
}

std::uint64_t brute_phi(const PolyRing& R, const Poly& Q)
{
    std::uint64_t size = 1, count = 0;
    for (int i = 0; i < Q.deg(); ++i)
        size *= R.q();
    for (std::uint64_t r = 1; r < size; ++r)
        if (R.gcd(R.from_index(r), Q) == Poly::one())
            ++count;
    return count;
}

}  // namespace

TEST(Field, AxiomsExhaustiveQ3)
{
    Field F(FieldSpec::make(3));
    for (Elem a = 0; a < 3; ++a)
        for (Elem b = 0; b < 3; ++b)
            for (Elem c = 0; c < 3; ++c) {
                EXPECT_EQ(F.add(F.add(a, b), c), F.add(a, F.add(b, c)));
                EXPECT_EQ(F.mul(F.mul(a, b), c), F.mul(a, F.mul(b, c)));
                EXPECT_EQ(F.mul(a, F.add(b, c)), F.add(F.mul(a, b), F.mul(a, c)));
            }
}

TEST(Field, AxiomsSampledAndInverses)
{
    std::mt19937_64 rng(7);
    for (auto [p, k] : {std::pair{5u, 1u}, {7u, 1u}, {3u, 2u}, {5u, 2u}, {3u, 3u}, {3u, 4u}, {7u, 2u}}) {
        Field F(FieldSpec::make(p, k));
        std::uniform_int_distribution<Elem> pick(0, F.q() - 1);
        for (int t = 0; t < 2000; ++t) {
            Elem a = pick(rng), b = pick(rng), c = pick(rng);
            ASSERT_EQ(F.mul(F.mul(a, b), c), F.mul(a, F.mul(b, c)));
            ASSERT_EQ(F.mul(a, F.add(b, c)), F.add(F.mul(a, b), F.mul(a, c)));
            ASSERT_EQ(F.add(a, F.neg(a)), 0u);
            ASSERT_EQ(F.mul(a, b), F.mul(b, a));
        }
        for (Elem a = 1; a < F.q(); ++a)
            ASSERT_EQ(F.mul(a, F.inv(a)), 1u) << F.spec().to_string();
        EXPECT_THROW(F.inv(0), DomainError);
    }
}

TEST(Field, ShippedModuliAreIrreducible)
{
    for (std::uint32_t p : {3u, 5u, 7u})
        for (std::uint32_t k : {2u, 3u, 4u}) {
            auto spec = FieldSpec::make(p, k);
            PolyRing Fp = ring(p);
            std::vector<Elem> m(spec.modulus.begin(), spec.modulus.end());
            EXPECT_TRUE(irreducible_test(Fp, Poly(m))) << spec.to_string();
            EXPECT_EQ(FieldSpec::parse(spec.to_string()), spec);
        }
}

TEST(Field, RejectsEvenAndUnsupported)
{
    EXPECT_THROW(FieldSpec::make(2), UnsupportedError);
    EXPECT_THROW(FieldSpec::make(9), UnsupportedError);
    EXPECT_THROW(FieldSpec::make(11, 2), UnsupportedError);
}

TEST(Poly, ZeroDegreeIsMarker)
{
    Poly z;
    EXPECT_FALSE(z.degree().has_value());
    EXPECT_THROW((void)z.deg(), DomainError);
    auto R = ring(3);
    EXPECT_EQ(R.norm(z), 0u);
    EXPECT_EQ(R.norm(R.parse("1 0 1")), 9u);
}

TEST(Poly, CanonicalText)
{
    auto R = ring(3);
    Poly f = R.parse("1 0 1");
    EXPECT_EQ(f.deg(), 2);
    EXPECT_EQ(R.to_string(f), "1 0 1");
    EXPECT_EQ(R.to_string(Poly{}), "0");
    EXPECT_THROW(R.parse("1 3"), ParseError);
    auto R9 = ring(3, 2);
    Poly g = R9.parse("12 00 10");
    EXPECT_EQ(R9.to_string(g), "12 00 10");
    EXPECT_TRUE(g.is_monic());
}

TEST(Poly, DivmodReconstructs)
{
    auto R = ring(5);
    std::mt19937_64 rng(3);
    for (int t = 0; t < 200; ++t) {
        Poly a = R.from_index(rng() % 100000), b = R.from_index(1 + rng() % 3000);
        auto [qt, rm] = R.divmod(a, b);
        EXPECT_EQ(R.add(R.mul(qt, b), rm), a);
        if (!rm.is_zero())
            EXPECT_LT(rm.deg(), b.deg());
    }
}

TEST(Irreducible, Examples)
{
    auto R = ring(3);
    EXPECT_TRUE(irreducible_test(R, R.parse("1 1")));
    EXPECT_FALSE(irreducible_test(R, R.parse("0 0 1")));
    EXPECT_TRUE(irreducible_test(R, R.parse("1 0 1")));
    EXPECT_THROW(irreducible_test(R, R.parse("2 2")), PreconditionError);
    EXPECT_THROW(irreducible_test(R, R.parse("1")), PreconditionError);
}

TEST(Irreducible, AgreesWithTrialDivisionOracle)
{
    for (auto [p, k, maxd] : {std::tuple{3u, 1u, 5}, {5u, 1u, 3}, {3u, 2u, 2}}) {
        auto R = ring(p, k);
        for (int d = 1; d <= maxd; ++d) {
            std::uint64_t count = 1;
            for (int i = 0; i < d; ++i)
                count *= R.q();
            for (std::uint64_t i = 0; i < count; ++i) {
                Poly f = R.monic_from_index(d, i);
                ASSERT_EQ(irreducible_test(R, f), brute_irreducible(R, f)) << R.to_string(f);
            }
        }
    }
}

TEST(Primes, Examples)
{
    auto R = ring(3);
    auto p1 = primes_of_degree(R, 1);
    ASSERT_EQ(p1.size(), 3u);
    EXPECT_EQ(R.to_string(p1[0]), "0 1");
    EXPECT_EQ(R.to_string(p1[1]), "1 1");
    EXPECT_EQ(R.to_string(p1[2]), "2 1");
    EXPECT_EQ(primes_of_degree(R, 2).size(), 3u);
    EXPECT_EQ(primes_of_degree(ring(5), 2).size(), 10u);  // (25 - 5) / 2
    EXPECT_THROW(primes_of_degree(R, 0), PreconditionError);
}

TEST(Primes, CountMatchesEnumeration)
{
    EXPECT_EQ(prime_count(3, 1), 3u);
    EXPECT_EQ(prime_count(3, 2), 3u);
    EXPECT_EQ(prime_count(3, 4), 18u);
    for (auto [p, k, maxd] : {std::tuple{3u, 1u, 7}, {5u, 1u, 4}, {7u, 1u, 3}, {3u, 2u, 3}}) {
        auto R = ring(p, k);
        for (int d = 1; d <= maxd; ++d)
            EXPECT_EQ(primes_of_degree(R, d).size(), prime_count(R.q(), d)) << "q=" << R.q() << " d=" << d;
    }
}

TEST(Primes, DegreeOfProductConsistency)
{
    auto R = ring(3);
    PrimeTable T(R, 4);
    Poly prod = Poly::one();
    int expected = 0;
    for (int d = 1; d <= 4; ++d) {
        expected += d * static_cast<int>(prime_count(3, d));
        for (const auto& P : T.of_degree(d))
            prod = R.mul(prod, P);
    }
    EXPECT_EQ(prod.deg(), expected);
}

TEST(Factorize, Examples)
{
    auto R = ring(3);
    auto f1 = factorize(R, R.parse("0 0 1"));
    ASSERT_EQ(f1.factors.size(), 1u);
    EXPECT_EQ(R.to_string(f1.factors[0].first), "0 1");
    EXPECT_EQ(f1.factors[0].second, 2);
    EXPECT_EQ(f1.unit, 1u);

    auto f2 = factorize(R, R.parse("2 0 2"));
    EXPECT_EQ(f2.unit, 2u);
    ASSERT_EQ(f2.factors.size(), 1u);
    EXPECT_EQ(R.to_string(f2.factors[0].first), "1 0 1");

    // x^3 + 2x = x (x^2 + 2) = x (x + 1) (x + 2)
    auto f3 = factorize(R, R.parse("0 2 0 1"));
    ASSERT_EQ(f3.factors.size(), 3u);
    EXPECT_EQ(R.to_string(f3.factors[0].first), "0 1");
    EXPECT_EQ(R.to_string(f3.factors[1].first), "1 1");
    EXPECT_EQ(R.to_string(f3.factors[2].first), "2 1");

    EXPECT_THROW(factorize(R, Poly{}), DomainError);
}

TEST(Factorize, RoundTripRandomProducts)
{
    std::mt19937_64 rng(11);
    for (auto [p, k] : {std::pair{3u, 1u}, {5u, 1u}, {3u, 2u}}) {
        auto R = ring(p, k);
        PrimeTable T(R, 3);
        for (int t = 0; t < 60; ++t) {
            Factorization fac;
            fac.unit = static_cast<Elem>(1 + rng() % (R.q() - 1));
            for (int d = 1; d <= 3; ++d) {
                const auto& ps = T.of_degree(d);
                for (const auto& P : ps)
                    if (rng() % (4 * ps.size()) == 0)
                        fac.factors.emplace_back(P, 1 + static_cast<int>(rng() % 2));
            }
            std::sort(fac.factors.begin(), fac.factors.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            Poly f = expand(R, fac);
            auto back = factorize(R, f);
            EXPECT_EQ(back.unit, fac.unit);
            EXPECT_EQ(back.factors, fac.factors);
            EXPECT_EQ(expand(R, back), f);
        }
    }
}

TEST(VonMangoldt, Examples)
{
    auto R = ring(3);
    EXPECT_EQ(von_mangoldt(R, R.parse("0 0 0 1")), 1);
    EXPECT_EQ(von_mangoldt(R, R.pow(R.parse("1 0 1"), 2)), 2);
    EXPECT_EQ(von_mangoldt(R, R.mul(R.parse("0 1"), R.parse("1 1"))), 0);
    EXPECT_THROW(von_mangoldt(R, R.parse("1 2")), PreconditionError);
}

TEST(VonMangoldt, PrimePowerIdentity)
{
    auto R = ring(3);
    PrimeTable T(R, 3);
    std::uint64_t qn = 1;
    for (int n = 1; n <= 6; ++n) {
        qn *= 3;
        std::uint64_t sum = 0;
        for (std::uint64_t i = 0; i < qn; ++i)
            sum += static_cast<std::uint64_t>(von_mangoldt(R, R.monic_from_index(n, i), T));
        EXPECT_EQ(sum, qn) << "n=" << n;
    }
}

TEST(EulerPhi, Examples)
{
    auto R = ring(3);
    EXPECT_EQ(euler_phi(R, R.parse("0 1")), 2u);
    EXPECT_EQ(euler_phi(R, R.parse("0 0 1")), 6u);
    EXPECT_EQ(euler_phi(R, R.parse("0 1 1")), 4u);
    EXPECT_EQ(brute_phi(R, R.parse("0 0 1")), 6u);
    EXPECT_EQ(brute_phi(R, R.parse("0 1 1")), 4u);
}

TEST(EulerPhi, AgreesWithResidueCountAndIsMultiplicative)
{
    auto R = ring(3);
    std::vector<Poly> monics;
    for (int d = 1; d <= 3; ++d)
        for (std::uint64_t i = 0; i < 27 && i < static_cast<std::uint64_t>(std::pow(3, d)); ++i)
            monics.push_back(R.monic_from_index(d, i));
    for (const auto& Q : monics)
        ASSERT_EQ(euler_phi(R, Q), brute_phi(R, Q)) << R.to_string(Q);
    for (const auto& A : monics)
        for (const auto& B : monics)
            if (R.gcd(A, B) == Poly::one())
                ASSERT_EQ(euler_phi(R, R.mul(A, B)), euler_phi(R, A) * euler_phi(R, B));
}

TEST(PhiBound, Examples)
{
    auto R = ring(3);
    auto r1 = phi_lower_bound_check(R, 1);
    EXPECT_EQ(r1.degQ, 3);
    EXPECT_EQ(r1.phi, "8");
    EXPECT_EQ(r1.norm, "27");
    auto r2 = phi_lower_bound_check(R, 2);
    EXPECT_EQ(r2.degQ, 9);
    // (2 * 2 * 2) * (8 * 8 * 8)
    EXPECT_EQ(r2.phi, "4096");
    for (int n = 1; n <= 4; ++n) {
        auto r = phi_lower_bound_check(R, n);
        EXPECT_GT(r.ratio, 0.25) << "n=" << n;
        EXPECT_TRUE(r.pass);
    }
}
