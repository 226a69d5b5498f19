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

#include "ffuniv/roots.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "ffuniv/error.hpp"

namespace ffuniv {

namespace {

using cplx = std::complex<double>;

// p(z), p'(z) and the running bound sum |b_i| |z|^i for the backward error.
void horner(std::span<const cplx> b, cplx z, cplx& p, cplx& dp, double& mag)
{
    p = b.back();
    dp = 0;
    mag = std::abs(b.back());
    const double az = std::abs(z);
    for (std::size_t i = b.size() - 1; i-- > 0;) {
        dp = dp * z + p;
        p = p * z + b[i];
        mag = mag * az + std::abs(b[i]);
    }
}

// max |coefficient| difference between prod (z - r_j) and b / b_n
double expansion_error(std::span<const cplx> b, const std::vector<cplx>& r)
{
    std::vector<cplx> e{1.0};
    for (const auto& x : r) {
        e.insert(e.begin(), 0.0);
        for (std::size_t k = 0; k + 1 < e.size(); ++k)
            e[k] -= x * e[k + 1];
    }
    double m = 0;
    for (std::size_t i = 0; i < b.size(); ++i)
        m = std::max(m, std::abs(e[i] - b[i] / b.back()));
    return m;
}

// Derivative of order m, coefficients lowest first.
std::vector<cplx> derivative(std::span<const cplx> b, int m)
{
    std::vector<cplx> d(b.begin(), b.end());
    for (int t = 0; t < m && d.size() > 1; ++t) {
        for (std::size_t i = 1; i < d.size(); ++i)
            d[i - 1] = d[i] * static_cast<double>(i);
        d.pop_back();
    }
    return d;
}

// A root of multiplicity m comes out of the iteration as m points spread by
// about eps^{1/m}. Each such cluster is replaced by its centroid refined by
// Newton on the (m-1)-th derivative; kept only if the expansion improves.
void polish_clusters(std::span<const cplx> b, std::vector<cplx>& roots)
{
    const std::size_t n = roots.size();
    std::vector<int> label(n, -1);
    int nl = 0;
    // single linkage: a triple root spreads by ~eps^{1/3}, about 1e-5 relative
    for (std::size_t i = 0; i < n; ++i) {
        if (label[i] >= 0)
            continue;
        label[i] = nl;
        std::vector<std::size_t> stack{i};
        while (!stack.empty()) {
            const std::size_t k = stack.back();
            stack.pop_back();
            for (std::size_t j = 0; j < n; ++j)
                if (label[j] < 0 && std::abs(roots[k] - roots[j]) < 1e-4 * std::max(1.0, std::abs(roots[k]))) {
                    label[j] = nl;
                    stack.push_back(j);
                }
        }
        ++nl;
    }
    if (nl == static_cast<int>(n))
        return;
    std::vector<cplx> polished = roots;
    for (int l = 0; l < nl; ++l) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < n; ++i)
            if (label[i] == l)
                members.push_back(i);
        if (members.size() < 2)
            continue;
        cplx c = 0;
        for (auto i : members)
            c += roots[i];
        c /= static_cast<double>(members.size());
        const auto d = derivative(b, static_cast<int>(members.size()) - 1);
        for (int it = 0; it < 8; ++it) {
            cplx p, dp;
            double mag;
            horner(d, c, p, dp, mag);
            if (dp == cplx(0))
                break;
            const cplx step = p / dp;
            c -= step;
            if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(c)))
                break;
        }
        for (auto i : members)
            polished[i] = c;
    }
    if (expansion_error(b, polished) < expansion_error(b, roots))
        roots = std::move(polished);
}

}  // namespace

AberthResult aberth_roots(std::span<const cplx> b, const AberthOptions& opt)
{
    if (b.empty() || b.back() == cplx(0))
        throw PreconditionError("aberth_roots: leading coefficient must be nonzero");
    const std::size_t n = b.size() - 1;
    AberthResult res;
    if (n == 0)
        return res;
    if (n == 1) {
        res.roots.push_back(-b[0] / b[1]);
        return res;
    }
    res.roots.resize(n);
    // small offset keeps the starting points off any symmetry axis
    for (std::size_t j = 0; j < n; ++j) {
        const double t = 2.0 * std::numbers::pi * (static_cast<double>(j) + 0.25) / static_cast<double>(n) + 0.1;
        res.roots[j] = std::polar(opt.init_radius, t);
    }
    std::vector<char> done(n, 0);
    const double eps = std::numeric_limits<double>::epsilon();
    for (int it = 1; it <= opt.max_iterations; ++it) {
        res.iterations = it;
        double worst = 0;
        bool all_done = true;
        for (std::size_t j = 0; j < n; ++j) {
            if (done[j])
                continue;
            cplx p, dp;
            double mag;
            horner(b, res.roots[j], p, dp, mag);
            if (std::abs(p) <= 4.0 * eps * mag) {
                done[j] = 1;
                continue;
            }
            const cplx w = p / dp;
            cplx s = 0;
            for (std::size_t k = 0; k < n; ++k)
                if (k != j)
                    s += 1.0 / (res.roots[j] - res.roots[k]);
            const cplx step = w / (1.0 - w * s);
            res.roots[j] -= step;
            const double rel = std::abs(step) / std::max(1.0, std::abs(res.roots[j]));
            worst = std::max(worst, rel);
            if (rel <= opt.tolerance)
                done[j] = 1;
            else
                all_done = false;
        }
        res.last_step = worst;
        if (all_done) {
            polish_clusters(b, res.roots);
            return res;
        }
    }
    throw NumericError("aberth_roots: no convergence after " + std::to_string(opt.max_iterations) +
                       " iterations (degree " + std::to_string(n) + ", last relative step " +
                       std::to_string(res.last_step) + ")");
}

}  // namespace ffuniv
