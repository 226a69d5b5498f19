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

#include <cmath>
#include <numbers>
#include <random>

#include "ffuniv/arith.hpp"
#include "ffuniv/characters.hpp"
#include "ffuniv/error.hpp"
#include "ffuniv/lfunctions.hpp"
#include "ffuniv/roots.hpp"

using namespace ffuniv;

namespace {

PolyRing ring(std::uint32_t p, std::uint32_t k = 1)
{
    return PolyRing(make_field(p, k));
}

std::vector<Poly> monics_of_degree(const PolyRing& R, int d)
{
    std::vector<Poly> out;
    std::uint64_t count = 1;
    for (int i = 0; i < d; ++i)
        count *= R.q();
    for (std::uint64_t i = 0; i < count; ++i)
        out.push_back(R.monic_from_index(d, i));
    return out;
}

// c_n by evaluating chi on polynomials, independent of residue indexing
std::vector<cplx> coeffs_by_poly_eval(const Character& chi)
{
    const auto& R = chi.group().ring();
    std::vector<cplx> c;
    for (int n = 0; n < chi.group().degQ(); ++n) {
        cplx s = 0;
        for (const auto& f : monics_of_degree(R, n))
            s += char_eval(chi, f);
        c.push_back(s);
    }
    return c;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b)
{
    double m = 0;
    for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
        const cplx x = i < a.size() ? a[i] : cplx(0), y = i < b.size() ? b[i] : cplx(0);
        m = std::max(m, std::abs(x - y));
    }
    return m;
}

}  // namespace

TEST(USCorrespondence, Examples)
{
    EXPECT_NEAR(std::abs(u_of_s(3, {1, 0}) - cplx(1.0 / 3, 0)), 0, 1e-15);
    EXPECT_NEAR(std::abs(u_of_s(5, {0.5, 0})), 1 / std::sqrt(5.0), 1e-15);
    EXPECT_THROW(s_of_u(3, 0), DomainError);
}

TEST(USCorrespondence, RoundTrip)
{
    std::mt19937_64 rng(7);
    for (std::uint32_t q : {3u, 5u, 9u, 49u}) {
        const double T = 2 * std::numbers::pi / std::log(static_cast<double>(q));
        std::uniform_real_distribution<double> sig(-2, 2), t(0, T);
        for (int i = 0; i < 200; ++i) {
            const cplx s(sig(rng), t(rng));
            EXPECT_LT(std::abs(s_of_u(q, u_of_s(q, s)) - s), 1e-12);
        }
    }
}

TEST(RegionGridTest, DefaultsAndValidation)
{
    auto g = RegionGrid::default_u(3);
    EXPECT_EQ(g.size(), 200u);
    EXPECT_EQ(g.plane(), Plane::U);
    // serpentine path: consecutive points are neighbours
    double step = 0;
    for (std::size_t i = 1; i < g.size(); ++i)
        step = std::max(step, std::abs(g.points()[i] - g.points()[i - 1]));
    EXPECT_LT(step, 0.07);

    auto s = RegionGrid::default_s(5);
    EXPECT_EQ(s.plane(), Plane::S);
    EXPECT_NEAR(s.min_distance_to_critical(), 0.1, 1e-12);
    EXPECT_EQ(s.u_points().size(), s.size());

    EXPECT_THROW(RegionGrid::from_points(3, Plane::U, {{0.4, 0}, {0.4, 0}}), PreconditionError);
    EXPECT_THROW(RegionGrid::from_points(3, Plane::U, {{0.3, 0}}), DomainError);
    EXPECT_THROW(RegionGrid::from_points(3, Plane::U, {{0.6, 0}}), DomainError);
    EXPECT_THROW(RegionGrid::from_points(3, Plane::S, {{0.5, 1}}), DomainError);
    EXPECT_THROW(RegionGrid::from_points(3, Plane::S, {{0.7, 6}}), DomainError);
    EXPECT_THROW(RegionGrid::from_points(3, Plane::U, {}), PreconditionError);
}

TEST(Aberth, KnownRoots)
{
    // (z - 1)(z + 2)(z - 3i) expanded
    const cplx i(0, 1);
    std::vector<cplx> r{1.0, -2.0, 3.0 * i};
    std::vector<cplx> b{1.0};
    for (auto x : r) {
        b.insert(b.begin(), 0.0);
        for (std::size_t k = 0; k + 1 < b.size(); ++k)
            b[k] -= x * b[k + 1];
    }
    auto res = aberth_roots(b);
    for (auto x : r) {
        double best = 1e9;
        for (auto y : res.roots)
            best = std::min(best, std::abs(x - y));
        EXPECT_LT(best, 1e-12);
    }
    EXPECT_THROW(aberth_roots(std::vector<cplx>{1.0, 0.0}), PreconditionError);
}

TEST(LCoeffs, ConstantTermAndPrincipal)
{
    auto R = ring(3);
    auto G = UnitGroup::build(R, R.parse("1 0 1 1"));
    auto chars = characters(G);
    EXPECT_THROW(l_coeffs(chars[0]), UnsupportedError);
    for (std::size_t i = 1; i < chars.size(); ++i)
        EXPECT_EQ(l_coeffs(chars[i]).coeffs[0], cplx(1.0));
}

TEST(LCoeffs, SquareModulusExample)
{
    auto R = ring(3);
    auto G = UnitGroup::build(R, R.parse("0 0 1"));
    for (const auto& chi : characters(G)) {
        if (chi.is_principal())
            continue;
        auto L = l_coeffs(chi);
        ASSERT_LE(L.observed_degree(), 1);
        // three monic linears: x, x+1, x+2 (x is not coprime)
        const cplx c1 = char_eval(chi, R.parse("1 1")) + char_eval(chi, R.parse("2 1"));
        EXPECT_LT(std::abs(L.coeffs[1] - c1), 1e-12);
        if (L.observed_degree() == 1) {
            auto rr = roots(L);
            ASSERT_EQ(rr.alphas.size(), 1u);
            EXPECT_LT(std::abs(rr.alphas[0] + L.coeffs[1]), 1e-12);
            const double m = std::abs(rr.alphas[0]);
            EXPECT_TRUE(std::abs(m - 1) < 1e-6 || std::abs(m - std::sqrt(3.0)) < 1e-6) << m;
        }
    }
}

TEST(LCoeffs, DirectMatchesPolynomialEvaluation)
{
    for (auto [p, k, d] : {std::tuple{3u, 1u, 3}, {5u, 1u, 2}, {3u, 2u, 2}}) {
        auto R = ring(p, k);
        for (const auto& Q : monics_of_degree(R, d)) {
            auto G = UnitGroup::build(R, Q);
            for (const auto& chi : characters(G)) {
                if (chi.is_principal())
                    continue;
                EXPECT_LT(max_diff(l_coeffs(chi).coeffs, coeffs_by_poly_eval(chi)), 1e-10) << chi.to_string();
            }
        }
    }
}

TEST(LCoeffs, BulkMatchesDirect)
{
    auto R = ring(3);
    for (int d = 1; d <= 4; ++d)
        for (const auto& Q : monics_of_degree(R, d)) {
            auto G = UnitGroup::build(R, Q);
            auto M = l_coeffs_all(G);
            ASSERT_EQ(M.rows, G->phi());
            ASSERT_EQ(M.cols, d);
            EXPECT_LT(std::abs(M.at(0, 0) - cplx(1.0)), 1e-12);
            for (const auto& chi : characters(G)) {
                if (chi.is_principal())
                    continue;
                auto L = l_coeffs(chi);
                std::vector<cplx> row(M.row(chi.index()), M.row(chi.index()) + M.cols);
                EXPECT_LT(max_diff(L.coeffs, row), 1e-9) << chi.to_string();
            }
        }
}

TEST(LCoeffs, BulkPrincipalRowCountsCoprimeMonics)
{
    auto R = ring(5);
    auto Q = R.parse("0 1 0 1");
    auto G = UnitGroup::build(R, Q);
    auto M = l_coeffs_all(G);
    Character chi0(G, std::vector<std::uint32_t>(G->rank(), 0));
    for (int n = 0; n < 3; ++n)
        EXPECT_LT(std::abs(M.at(0, n) - monic_char_sum(chi0, n)), 1e-9);
}

TEST(LCoeffs, TruncationValidity)
{
    auto R = ring(3);
    std::vector<Poly> moduli;
    for (int d = 1; d <= 4; ++d)
        for (const auto& Q : monics_of_degree(R, d))
            moduli.push_back(Q);
    for (const char* t : {"0 0 0 0 0 1", "1 2 0 0 0 1", "0 1 2 0 1 1"})
        moduli.push_back(R.parse(t));
    for (const auto& Q : moduli) {
        auto G = UnitGroup::build(R, Q);
        const int n = G->degQ();
        auto chars = characters(G);
        // a spread of characters keeps the degree-5 cases quick
        const std::size_t stride = n >= 5 ? 17 : 1;
        for (std::size_t i = 1; i < chars.size(); i += stride) {
            EXPECT_LT(std::abs(monic_char_sum(chars[i], n)), 1e-9) << chars[i].to_string();
            EXPECT_LT(std::abs(monic_char_sum(chars[i], n + 1)), 1e-9) << chars[i].to_string();
        }
    }
}

TEST(LCoeffs, ConjugationSymmetry)
{
    auto R = ring(5);
    auto G = UnitGroup::build(R, R.parse("2 0 1 1"));
    for (const auto& chi : characters(G)) {
        if (chi.is_principal())
            continue;
        auto a = l_coeffs(chi).coeffs;
        auto b = l_coeffs(char_conj(chi)).coeffs;
        for (auto& z : b)
            z = std::conj(z);
        EXPECT_LT(max_diff(a, b), 1e-12);
    }
}

TEST(Roots, DegreeOne)
{
    auto R = ring(3);
    auto G = UnitGroup::build(R, R.parse("0 0 1"));
    LPolynomial L{characters(G)[1], {1.0, cplx(0.5, -1.5)}};
    auto rr = roots(L);
    ASSERT_EQ(rr.alphas.size(), 1u);
    EXPECT_LT(std::abs(rr.alphas[0] - cplx(-0.5, 1.5)), 1e-15);
    L.coeffs[1] = 0;
    EXPECT_THROW(roots(L), PreconditionError);
}

TEST(Roots, RiemannHypothesisSweep)
{
    int checked = 0;
    for (auto [p, maxd] : {std::pair{3u, 4}, {5u, 3}}) {
        auto R = ring(p);
        for (int d = 2; d <= maxd; ++d)
            for (const auto& Q : monics_of_degree(R, d)) {
                auto G = UnitGroup::build(R, Q);
                auto M = l_coeffs_all(G);
                for (const auto& chi : characters(G)) {
                    if (chi.is_principal())
                        continue;
                    LPolynomial L{chi, std::vector<cplx>(M.row(chi.index()), M.row(chi.index()) + M.cols)};
                    if (L.observed_degree() == 0)
                        continue;
                    auto rr = roots(L);
                    EXPECT_EQ(rr.violations(), 0) << chi.to_string();
                    EXPECT_LT(rr.reconstruction_residual, 1e-9) << chi.to_string();
                    ++checked;
                }
            }
    }
    EXPECT_GT(checked, 1000);
}

TEST(Roots, CubeModulusAllCharacters)
{
    auto R = ring(3);
    auto G = UnitGroup::build(R, R.parse("0 0 0 1"));
    for (const auto& chi : characters(G)) {
        if (chi.is_principal())
            continue;
        auto L = l_coeffs(chi);
        if (L.observed_degree() == 0)
            continue;
        EXPECT_EQ(roots(L).violations(), 0);
    }
}

TEST(Roots, TripleTrivialRootFromImprimitiveCharacter)
{
    // 2 + 2x^2 + x^4 splits into four linear factors over F_5; this character
    // is induced from a modulus of degree 1, so L = (1 - alpha u)^3 with |alpha| = 1
    auto R = ring(5);
    auto G = UnitGroup::build(R, R.parse("2 0 2 0 1"));
    auto rr = roots(l_coeffs(character_at(G, 192)));
    ASSERT_EQ(rr.observed_degree, 3);
    EXPECT_EQ(rr.violations(), 0);
    for (const auto& a : rr.alphas)
        EXPECT_NEAR(std::abs(a), 1.0, 1e-12);
    EXPECT_LT(rr.reconstruction_residual, 1e-12);
}

TEST(Zeta, Examples)
{
    auto R = ring(3);
    const auto x = R.parse("0 1");
    EXPECT_EQ(zeta_q(R, x, 0.0), cplx(1.0));
    EXPECT_NEAR(std::abs(zeta_q(R, x, 1.0 / 9) - cplx(4.0 / 3)), 0, 1e-15);
    EXPECT_THROW(zeta_q(R, x, 1.0 / 3), DomainError);
}

TEST(Zeta, SeriesPartialSumsConverge)
{
    auto R = ring(3);
    auto Q = R.parse("1 0 1 1");
    auto G = UnitGroup::build(R, Q);
    Character chi0(G, std::vector<std::uint32_t>(G->rank(), 0));
    const cplx u(0.04, 0.03);
    const cplx z = zeta_q(R, Q, u);
    cplx partial = 0, un = 1.0;
    double prev = 1e9;
    for (int n = 0; n <= 8; ++n) {
        partial += monic_char_sum(chi0, n) * un;
        un *= u;
        const double err = std::abs(partial - z);
        EXPECT_LT(err, prev);
        prev = err;
    }
    EXPECT_LT(prev, 1e-6);
}

TEST(EulerProduct, EmptyAndDomain)
{
    auto R = ring(3);
    auto G = UnitGroup::build(R, R.parse("0 0 1"));
    auto chi = characters(G)[1];
    EXPECT_EQ(euler_product_truncated(chi, 0.2, 0), cplx(1.0));
    EXPECT_THROW(euler_product_truncated(chi, 0.34, 2), DomainError);
}

TEST(EulerProduct, GeometricConvergence)
{
    auto R = ring(3);
    auto G = UnitGroup::build(R, R.parse("0 0 1"));
    PrimeResidues pr(G, 10);
    for (const auto& chi : characters(G)) {
        if (chi.is_principal())
            continue;
        auto L = l_coeffs(chi);
        const cplx u = 0.2;
        std::vector<double> err;
        for (int m = 1; m <= 10; ++m)
            err.push_back(std::abs(euler_product_truncated(chi, u, m, pr) - L.eval(u)));
        // tail behaves like (q|u|)^m = 0.6^m
        EXPECT_LT(err.back(), 0.02);
        EXPECT_LT(err[9], err[4]);
        EXPECT_LT(err[4], err[0]);
    }
}

TEST(EulerProduct, PrincipalMatchesZeta)
{
    auto R = ring(3);
    auto Q = R.parse("0 1 1");
    auto G = UnitGroup::build(R, Q);
    Character chi0(G, std::vector<std::uint32_t>(G->rank(), 0));
    const cplx u(0.05, 0.03);
    const double tail = std::pow(3 * std::abs(u), 11);
    EXPECT_LT(std::abs(euler_product_truncated(chi0, u, 10) - zeta_q(R, Q, u)), 10 * tail);
}

TEST(HybridFormula, LambdaSumsMatchBruteForce)
{
    auto R = ring(3);
    auto Q = R.parse("2 1 0 1");
    auto G = UnitGroup::build(R, Q);
    const int K = 6;
    PrimeResidues pr(G, K);
    PrimeTable table(R, K);
    auto chars = characters(G);
    for (std::size_t i = 0; i < chars.size(); i += 5) {
        auto a = lambda_char_sums(chars[i], K, pr);
        for (int k = 1; k <= K; ++k) {
            cplx s = 0;
            for (const auto& f : monics_of_degree(R, k))
                s += static_cast<double>(von_mangoldt(R, f, table)) * char_eval(chars[i], f);
            EXPECT_LT(std::abs(a[k] - s), 1e-9) << k;
        }
    }
}

TEST(HybridFormula, PkForms)
{
    auto R = ring(3);
    auto G = UnitGroup::build(R, R.parse("0 0 0 1"));
    PrimeResidues pr(G, 8);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> sig(0.55, 1.2), t(0, 5.7);
    for (const auto& chi : characters(G)) {
        EXPECT_EQ(p_k(chi, 0.3, 0, pr), cplx(1.0));
        // u^1 coefficient: degree-one primes coprime to Q
        cplx c1 = 0;
        for (const auto& P : pr.primes(1))
            c1 += char_eval(chi, P);
        EXPECT_LT(std::abs(lambda_char_sums(chi, 1, pr)[1] - c1), 1e-12);
        for (int K : {1, 3, 8}) {
            const cplx s(sig(rng), t(rng));
            const cplx a = p_k(chi, u_of_s(3, s), K, pr), b = p_k_s(chi, s, K, pr);
            EXPECT_LT(std::abs(a - b), 1e-12 * std::max(1.0, std::abs(a)));
        }
    }
}

TEST(HybridFormula, ZkClosedFormAndDegenerateCases)
{
    std::vector<cplx> alphas{{1.2, 0.9}, {-0.3, -1.6}};
    EXPECT_EQ(z_k(alphas, 0.0, 5), cplx(1.0));
    const cplx u(0.25, 0.35);
    EXPECT_LT(std::abs(z_k(alphas, u, 0) - (1.0 - alphas[0] * u) * (1.0 - alphas[1] * u)), 1e-14);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ang(0, 2 * std::numbers::pi), rad(0.05, 0.9);
    for (int i = 0; i < 100; ++i) {
        const cplx z = std::polar(rad(rng), ang(rng));
        for (int K : {0, 1, 4, 12}) {
            cplx direct = 0, zk = std::pow(z, K);
            for (int k = K + 1; k <= K + 200; ++k) {
                zk *= z;
                direct += zk / static_cast<double>(k);
            }
            // the 200-term oracle carries its own truncation error
            const double r = std::abs(z);
            const double oracle_tail = std::pow(r, K + 201) / ((K + 201) * (1 - r));
            EXPECT_LT(std::abs(z_k({z}, 1.0, K) - std::exp(-direct)), 1e-12 + 2 * oracle_tail);
        }
    }
    EXPECT_THROW(z_k({cplx(2.0)}, 0.5, 1), DomainError);
}

TEST(HybridFormula, ResidualCubeModulus)
{
    auto R = ring(3);
    for (const char* text : {"0 0 0 1", "1 2 0 1"}) {
        auto G = UnitGroup::build(R, R.parse(text));
        const double lim = 0.999 / std::sqrt(3.0);
        auto grid = RegionGrid::annulus(3, 1.001 / 3, lim, 10, 0, 2 * std::numbers::pi * 0.95, 10);
        PrimeResidues pr(G, 8);
        for (const auto& chi : characters(G)) {
            if (chi.is_principal())
                continue;
            auto L = l_coeffs(chi);
            RootReport rr;
            if (L.observed_degree() > 0)
                rr = roots(L);
            for (int K : {0, 1, 2, 4, 8})
                EXPECT_LT(hybrid_check(L, rr, grid, K, pr), 1e-9) << chi.to_string() << " K=" << K;
        }
    }
}

TEST(RatioCheck, DeviationShrinksWithK)
{
    auto R = ring(3);
    auto G = UnitGroup::build(R, R.parse("0 0 0 0 1"));
    auto grid = RegionGrid::rectangle(3, 0.75, 0.75, 1, 0.5, 5.0, 12);
    PrimeResidues pr(G, 8);
    double mean2 = 0, mean8 = 0;
    int n = 0;
    for (const auto& chi : characters(G)) {
        if (chi.is_principal())
            continue;
        auto L = l_coeffs(chi);
        auto r2 = lemma2_ratio_check(L, grid, 2, pr), r8 = lemma2_ratio_check(L, grid, 8, pr);
        EXPECT_TRUE(std::isfinite(r2.max_ratio));
        mean2 += r2.max_deviation;
        mean8 += r8.max_deviation;
        ++n;
    }
    EXPECT_LT(mean8 / n, mean2 / n);
    EXPECT_THROW(lemma2_ratio_check(characters(G)[1], RegionGrid::default_u(3), 2), PreconditionError);
}

TEST(LEvalS, PrincipalUsesZeta)
{
    auto R = ring(3);
    auto Q = R.parse("0 1");
    auto G = UnitGroup::build(R, Q);
    Character chi0(G, {0});
    const cplx s(0.7, 1.1);
    EXPECT_LT(std::abs(l_eval_s(chi0, s) - zeta_q(R, Q, u_of_s(3, s))), 1e-15);
    Character chi1(G, {1});
    EXPECT_LT(std::abs(l_eval_s(chi1, s) - l_coeffs(chi1).eval(u_of_s(3, s))), 1e-15);
}
