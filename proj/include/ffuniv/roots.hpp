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

#ifndef FFUNIV_ROOTS_HPP
#define FFUNIV_ROOTS_HPP

#include <complex>
#include <span>
#include <vector>

namespace ffuniv {

struct AberthOptions {
    double tolerance = 1e-12;  // relative step size at convergence
    int max_iterations = 200;
    double init_radius = 1.0;  // initial guesses equally spaced on this circle
};

struct AberthResult {
    std::vector<std::complex<double>> roots;
    int iterations = 0;
    double last_step = 0;
};

/// All roots of sum_i b_i z^i (b lowest degree first, b.back() != 0) by
/// Aberth-Ehrlich simultaneous iteration. Throws NumericError with the final
/// step size when it fails to converge.
AberthResult aberth_roots(std::span<const std::complex<double>> b, const AberthOptions& opt = {});

}  // namespace ffuniv

#endif  // FFUNIV_ROOTS_HPP
