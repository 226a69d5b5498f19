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

#include "ffuniv/approximation.hpp"
#include "ffuniv/arith.hpp"
#include "ffuniv/error.hpp"

using namespace ffuniv;

namespace {

PolyRing ring(std::uint32_t p, std::uint32_t k = 1)
{
    return PolyRing(make_field(p, k));
}

GroupPtr group(std::uint32_t p, const char* Q)
{
    auto R = ring(p);
    return UnitGroup::build(R, R.parse(Q));
}

}  // namespace

TEST(Peak, NormalisedAtZero)
{
    for (int K : {1, 2, 7, 8, 33, 64})
        for (double d : {0.05, 0.3, 0.5}) {
            try {
                auto f = peak_poly(K, d);
                EXPECT_NEAR(std::abs(f.eval(0) - 1.0), 0, 1e-15);
                EXPECT_NEAR(std::abs(f.eval_series(0) - 1.0), 0, 1e-12);
                EXPECT_EQ(f.coeffs().size(), static_cast<std::size_t>(K + 1));
            } catch (const ConstructionError&) {
                // odd K with large delta can fall short of the bound
                EXPECT_EQ(K % 2, 1);
            }
        }
}

TEST(Peak, CertifiedGrid)
{
    for (int K : {8, 16, 32, 64})
        for (double d : {0.05, 0.1, 0.25}) {
            auto f = peak_poly(K, d);
            auto c = certify_peak(f, 10000);
            EXPECT_TRUE(c.ok) << K << " " << d;
            EXPECT_EQ(c.argmax, 0.0);
            EXPECT_LE(c.off_peak_max, 2 * std::exp(-std::numbers::pi * K * d));
            const double k = kappa(f);
            EXPECT_GE(k, 1.0 / (K + 1));
            EXPECT_LE(k, 1.0);
            EXPECT_LT(std::abs(k - kappa_quadrature(f, 2048)), 1e-6);
        }
    auto f = peak_poly(32, 0.1);
    EXPECT_LE(certify_peak(f).off_peak_max, 8.6e-5);
}

TEST(Peak, AnalyticBoundBelowContractForEvenK)
{
    // 1 / T_m(x0) <= 2 e^{-2 pi m delta} since x0 = 1 + 2 tan^2(pi delta) >= cosh(2 pi delta)
    for (int K = 2; K <= 200; K += 2)
        for (double d = 0.01; d < 0.5; d += 0.01) {
            const int m = K / 2;
            const double t = std::tan(std::numbers::pi * d);
            const double x0 = 1 + 2 * t * t;
            EXPECT_GE(x0, std::cosh(2 * std::numbers::pi * d));
            EXPECT_LE(1 / std::cosh(m * std::acosh(x0)), 2 * std::exp(-std::numbers::pi * K * d) * (1 + 1e-12));
        }
}

TEST(Peak, KappaOfTrivialPolynomial)
{
    // delta = 1/2, K = 1: f = (1 + e(theta)) / 2, coefficients 1/2, 1/2
    auto f = peak_poly(1, 0.5);
    EXPECT_NEAR(kappa(f), 0.5, 1e-15);
}

TEST(Peak, Preconditions)
{
    EXPECT_THROW(peak_poly(0, 0.1), PreconditionError);
    EXPECT_THROW(peak_poly(4, 0.0), PreconditionError);
    EXPECT_THROW(peak_poly(4, 0.6), PreconditionError);
    try {
        peak_poly(3, 0.25);
        FAIL() << "expected ConstructionError";
    } catch (const ConstructionError& e) {
        EXPECT_NE(std::string(e.what()).find("off-peak max"), std::string::npos);
    }
}

TEST(Params, DefPars)
{
    auto p = def_pars(3, 9);
    EXPECT_NEAR(p.rho, 2.0, 1e-12);
    EXPECT_EQ(p.rho_degree(), 2);
    EXPECT_EQ(p.K, 2);
    EXPECT_NEAR(p.delta, 4.0 / 9, 1e-12);
    auto p12 = def_pars(3, 12);
    EXPECT_EQ(p12.K, 2);
    EXPECT_EQ(p12.rho_degree(), 2);
    EXPECT_THROW(def_pars(3, 1), PreconditionError);
    EXPECT_NEAR(degree_of_norm(3, norm_of_degree(3, 2.5)), 2.5, 1e-12);
}

TEST(Phases, WindowAndSerialisation)
{
    auto G = group(3, "0 1 1");  // x(x+1)
    auto pa = PhaseAssignment::window(G, 0, 2);
    // degree one: only x+2 is coprime; degree two: three primes
    ASSERT_EQ(pa.size(), 4u);
    EXPECT_EQ(pa.entries()[0].degree, 1);
    pa.set_theta(0, 1.25);
    EXPECT_DOUBLE_EQ(pa.entries()[0].theta, 0.25);
    auto back = PhaseAssignment::parse(G, pa.serialize());
    ASSERT_EQ(back.size(), pa.size());
    for (std::size_t i = 0; i < pa.size(); ++i) {
        EXPECT_EQ(back.entries()[i].P, pa.entries()[i].P);
        EXPECT_NEAR(back.entries()[i].theta, pa.entries()[i].theta, 1e-15);
    }
    auto R = G->ring();
    PhaseAssignment bad(G);
    EXPECT_THROW(bad.add(R.parse("0 1"), 0.1), PreconditionError);     // divides Q
    EXPECT_THROW(bad.add(R.parse("0 0 1"), 0.1), PreconditionError);   // not prime
    bad.add(R.parse("2 1"), 0.1);
    EXPECT_THROW(bad.add(R.parse("2 1"), 0.2), PreconditionError);     // repeated
    EXPECT_THROW(PhaseAssignment::parse(G, "2 1 abc\n"), ParseError);
}

TEST(Functionals, GBasics)
{
    auto G = group(3, "0 0 0 1");
    auto f = peak_poly(8, 0.1);
    PhaseAssignment empty(G);
    for (const auto& chi : characters(G))
        EXPECT_EQ(g_func(chi, empty, f), 1.0);

    auto chars = characters(G);
    auto pa = PhaseAssignment::window(G, 0, 2);
    const auto& chi = chars[7];
    for (std::size_t i = 0; i < pa.size(); ++i)
        pa.set_theta(i, char_phase(chi, pa.entries()[i].residue));
    EXPECT_NEAR(g_func(chi, pa, f), 1.0, 1e-12);

    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0, 1);
    for (std::size_t i = 0; i < pa.size(); ++i)
        pa.set_theta(i, U(rng));
    for (const auto& c : chars) {
        const double g = g_func(c, pa, f);
        EXPECT_GE(g, 0.0);
        EXPECT_LE(g, 1.0 + 1e-12);
    }
}

TEST(Functionals, HImplicationAndOrdering)
{
    auto G = group(3, "0 0 0 1");
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(0, 1);
    for (auto [K, d] : {std::pair{8, 0.25}, {16, 0.1}, {2, 0.4444444444444444}}) {
        auto f = peak_poly(K, d);
        const double eps = default_epsilon(f);
        auto pa = PhaseAssignment::window(G, 0, 1);
        for (int trial = 0; trial < 5; ++trial) {
            for (std::size_t i = 0; i < pa.size(); ++i)
                pa.set_theta(i, U(rng));
            for (const auto& chi : characters(G)) {
                const double g = g_func(chi, pa, f), h = h_func(chi, pa, f, eps);
                EXPECT_LE(h, g);
                EXPECT_LE(std::max(h, 0.0), g);
                bool off = false, all_in = true;
                for (const auto& e : pa.entries()) {
                    const double dist = circle_dist(char_phase(chi, e.residue) - e.theta);
                    off = off || dist > d;
                    all_in = all_in && dist < d;
                }
                if (off)
                    EXPECT_LE(h, 0.0) << chi.to_string();
                if (h > 0)
                    EXPECT_TRUE(all_in) << chi.to_string();
            }
        }
    }
}

TEST(Functionals, HOnTarget)
{
    auto G = group(3, "0 0 0 1");
    auto f = peak_poly(8, 0.25);
    auto chi = characters(G)[11];
    auto pa = PhaseAssignment::window(G, 0, 2);
    for (std::size_t i = 0; i < pa.size(); ++i)
        pa.set_theta(i, char_phase(chi, pa.entries()[i].residue));
    const double eps = 1e-4;
    EXPECT_NEAR(h_func(chi, pa, f, eps), 1 - eps * static_cast<double>(pa.size()), 1e-12);
    EXPECT_THROW(h_func(chi, pa, f, 0.0), PreconditionError);
    EXPECT_NEAR(default_epsilon(f, EpsilonBase::Q, 3), 4 * std::pow(3.0, -2 * std::numbers::pi * 8 * 0.25), 1e-18);
}

TEST(MeanValues, EmptyAssignment)
{
    auto G = group(3, "0 0 0 1");
    auto f = peak_poly(2, 0.4);
    PhaseAssignment empty(G);
    auto g = mv_g_experiment(empty, f);
    EXPECT_EQ(g.lhs, static_cast<double>(G->phi() - 1));
    EXPECT_EQ(g.main, static_cast<double>(G->phi()));
    auto h = mv_h_experiment(empty, f, default_epsilon(f));
    EXPECT_EQ(h.lhs, g.lhs);
    EXPECT_EQ(h.lhs_plus, g.lhs);
}

TEST(MeanValues, OrthogonalityMakesFullSumExact)
{
    // one degree-1 prime with K = 2: every N = P^k has degree < deg Q, so
    // the sum over all characters of g equals phi kappa exactly
    auto G = group(3, "0 0 0 1");
    auto f = peak_poly(2, 0.3);
    PhaseAssignment pa(G);
    pa.add(G->ring().parse("1 1"), 0.37);
    auto r = mv_g_experiment(pa, f);
    Character chi0(G, std::vector<std::uint32_t>(G->rank(), 0));
    const double full = r.lhs + g_func(chi0, pa, f);
    EXPECT_NEAR(full / r.main, 1.0, 1e-12);
    EXPECT_LT(r.discrepancy, 1.0);

    double brute = 0;
    for (const auto& chi : characters(G))
        if (!chi.is_principal())
            brute += g_func(chi, pa, f);
    EXPECT_NEAR(brute, r.lhs, 1e-9);
}

TEST(MeanValues, HBelowGAndWorkerIndependent)
{
    auto G = group(3, "0 0 0 0 0 1");
    auto f = peak_poly(4, 0.3);
    auto pa = PhaseAssignment::window(G, 0, 1);
    for (std::size_t i = 0; i < pa.size(); ++i)
        pa.set_theta(i, 0.1 * static_cast<double>(i + 1));
    const double eps = default_epsilon(f);
    auto a = mv_h_experiment(pa, f, eps, 1), b = mv_h_experiment(pa, f, eps, 4);
    EXPECT_EQ(a.lhs, b.lhs);
    EXPECT_EQ(a.lhs_plus, b.lhs_plus);
    EXPECT_LE(a.lhs, a.lhs_g);
    EXPECT_LE(a.lhs_plus, a.lhs_g);
    auto g1 = mv_g_experiment(pa, f, 1), g3 = mv_g_experiment(pa, f, 3);
    EXPECT_EQ(g1.lhs, g3.lhs);
    EXPECT_NEAR(g1.lhs, a.lhs_g, 1e-9);
}

TEST(MeanValues, Tail)
{
    auto G = group(3, "0 0 0 0 1");
    auto f = peak_poly(2, 0.3);
    auto pa = PhaseAssignment::window(G, 0, 1);
    const cplx s(0.75, 0.4);
    auto zero = mv_tail_experiment(pa, f, 1, s, 3, [](const Poly&, int, cplx) { return cplx(0); });
    EXPECT_EQ(zero.lhs, 0.0);
    auto r3 = mv_tail_experiment(pa, f, 1, s, 3);
    EXPECT_TRUE(std::isfinite(r3.ratio));
    EXPECT_GT(r3.ratio, 0.0);
    // with deg Q = 9 every product N P (deg N <= 2, deg P <= 6) stays below
    // deg Q, so doubling z only adds the convergent tail
    auto G9 = group(3, "0 0 0 0 0 0 0 0 0 1");
    auto pa9 = PhaseAssignment::window(G9, 0, 1);
    auto a = mv_tail_experiment(pa9, f, 1, s, 3), b = mv_tail_experiment(pa9, f, 1, s, 6);
    EXPECT_LT(std::abs(b.ratio / a.ratio - 1), 0.5);
    EXPECT_THROW(mv_tail_experiment(pa, f, 1, s, 3, [](const Poly&, int, cplx) { return cplx(1); }),
                 PreconditionError);
    EXPECT_THROW(mv_tail_experiment(pa, f, 2, s, 2), PreconditionError);
}

TEST(Counting, Examples)
{
    auto R = ring(3);
    const auto x = R.parse("0 1");
    const double l3 = std::log(3.0);
    EXPECT_EQ(lambda_q_count(R, x, l3 * 0.999), 0u);
    EXPECT_EQ(lambda_q_count(R, x, 3 * l3), 13u);
    auto rep = counting_checks(R, x, 2 * l3, 8 * l3, 50);
    EXPECT_EQ(rep.rows.size(), 50u);
    EXPECT_GT(rep.min_scaled, 0.0);
}

TEST(Counting, MultiplicityMatchesEnumeration)
{
    for (auto [p, Qt] : {std::pair{3u, "0 1 1"}, {5u, "0 0 1 1"}, {3u, "1 0 1"}}) {
        auto R = ring(p);
        auto Q = R.parse(Qt);
        auto rep = counting_checks(R, Q, 1.0, 4 * std::log(static_cast<double>(p)), 3);
        for (int d = 1; d <= 4; ++d) {
            std::uint64_t n = 0;
            for (const auto& P : primes_of_degree(R, d))
                if (!R.divides(P, Q))
                    ++n;
            EXPECT_EQ(rep.multiplicity[static_cast<std::size_t>(d)], n) << d;
        }
    }
}

TEST(Fit, ZeroTarget)
{
    auto G = group(3, "0 0 0 1");
    auto grid = RegionGrid::default_u(3);
    std::vector<cplx> target(grid.size(), 0.0);
    auto res = fit_phases(target, grid, G, 0, 2);
    double bound = 0;
    for (const auto& e : res.phases.entries())
        bound += std::pow(grid.max_abs_u(), e.degree);
    EXPECT_LE(res.sup_error, bound + 1e-12);
    for (std::size_t i = 1; i < res.history.size(); ++i)
        EXPECT_LE(res.history[i], res.history[i - 1]);
    EXPECT_THROW(fit_phases(target, grid, G, 2, 2), PreconditionError);
}

TEST(Fit, PlantedAtom)
{
    auto G = group(3, "0 1 1");  // only x+2 is a coprime degree-1 prime
    auto grid = RegionGrid::default_u(3);
    const double theta = 0.3;
    std::vector<cplx> target;
    for (const auto& u : grid.u_points())
        target.push_back(std::polar(1.0, 2 * std::numbers::pi * theta) * u);
    auto res = fit_phases(target, grid, G, 0, 1);
    ASSERT_EQ(res.phases.size(), 1u);
    EXPECT_NEAR(res.phases.entries()[0].theta, theta, 1e-6);
    EXPECT_LT(res.sup_error, 1e-6);
    EXPECT_NEAR(fit_objective(target, grid, res.phases), res.sup_error, 1e-15);
}

TEST(Fit, Deterministic)
{
    auto G = group(3, "0 0 0 1");
    auto grid = RegionGrid::default_u(3);
    std::vector<cplx> target;
    for (const auto& u : grid.u_points())
        target.push_back(0.3 + 0.2 * u);
    auto a = fit_phases(target, grid, G, 0, 3), b = fit_phases(target, grid, G, 0, 3);
    EXPECT_EQ(a.sup_error, b.sup_error);
    EXPECT_EQ(a.phases.serialize(), b.phases.serialize());
}

TEST(Fit, ErrorNonIncreasingInRho)
{
    auto G = group(3, "0 0 0 0 0 1");
    auto grid = RegionGrid::default_u(3);
    std::vector<cplx> target;
    for (const auto& u : grid.u_points())
        target.push_back(std::exp(0.5 * u) - 1.0);
    auto sweep = fit_phases_sweep(target, grid, G, 0, 4);
    ASSERT_EQ(sweep.size(), 4u);
    for (std::size_t i = 1; i < sweep.size(); ++i)
        EXPECT_LE(sweep[i].sup_error, sweep[i - 1].sup_error);
}
