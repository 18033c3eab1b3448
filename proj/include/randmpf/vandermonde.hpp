// Copyright 2026 The randmpf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

#include "randmpf/error.hpp"

namespace randmpf {

inline constexpr double kMaxVandermondeCondition = 1e14;

using LongMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

struct LinearSolution {
    std::vector<double> x;
    double condition = 0.0;  // 1-norm condition estimate
    double residual = 0.0;   // max-norm residual relative to max |rhs|
    double backward_error = 0.0;  // componentwise, see refined_solve
};

/// Partial-pivot LU on the double rounding of A, then iterative refinement with
/// residuals accumulated in long double. Refinement continues while the
/// componentwise backward error max_i |r_i| / (sum_j |A_ij x_j| + |rhs_i|)
/// decreases, so rows with small entries are refined as far as rows with
/// large ones.
inline LinearSolution refined_solve(const LongMatrix& A, const std::vector<long double>& rhs,
                                    double max_condition = kMaxVandermondeCondition) {
    const Eigen::Index n = A.rows();
    if (A.cols() != n || static_cast<Eigen::Index>(rhs.size()) != n) {
        throw DimensionError("refined_solve: shape mismatch");
    }
    Eigen::MatrixXd Ad = A.cast<double>();
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(Ad);
    LinearSolution out;
    double rcond = lu.rcond();
    out.condition = rcond > 0 ? 1.0 / rcond : std::numeric_limits<double>::infinity();
    if (!(out.condition <= max_condition)) {
        std::ostringstream msg;
        msg << "linear system rejected: condition estimate " << out.condition << " exceeds "
            << max_condition;
        throw IllConditionedError(msg.str());
    }

    Eigen::VectorXd b(n);
    long double rhs_scale = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        b[i] = static_cast<double>(rhs[i]);
        rhs_scale = std::max(rhs_scale, std::fabs(rhs[i]));
    }
    Eigen::VectorXd x = lu.solve(b);
    Eigen::Matrix<long double, Eigen::Dynamic, 1> r(n);
    long double max_abs = 0;
    // Fills r and max_abs; returns the componentwise backward error.
    auto residual = [&] {
        long double worst = 0;
        max_abs = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            long double acc = rhs[i];
            long double mag = std::fabs(rhs[i]);
            for (Eigen::Index j = 0; j < n; ++j) {
                long double term = A(i, j) * static_cast<long double>(x[j]);
                acc -= term;
                mag += std::fabs(term);
            }
            r[i] = acc;
            max_abs = std::max(max_abs, std::fabs(acc));
            if (acc != 0) worst = std::max(worst, std::fabs(acc) / mag);
        }
        return worst;
    };
    long double worst = residual();
    for (int iter = 0; iter < 10 && worst > 0; ++iter) {
        long double saved_abs = max_abs;
        Eigen::VectorXd saved = x;
        x += lu.solve(r.cast<double>());
        long double next = residual();
        if (!(next < worst)) {
            x = saved;
            residual();
            max_abs = saved_abs;
            break;
        }
        worst = next;
    }
    out.x.assign(x.data(), x.data() + n);
    out.residual = rhs_scale > 0 ? static_cast<double>(max_abs / rhs_scale) : static_cast<double>(max_abs);
    out.backward_error = static_cast<double>(worst);
    return out;
}

/// Vandermonde matrix B_{j,q} = b_q^j in extended precision.
inline LongMatrix vandermonde_matrix(const std::vector<double>& b) {
    const Eigen::Index n = static_cast<Eigen::Index>(b.size());
    LongMatrix B(n, n);
    for (Eigen::Index q = 0; q < n; ++q) {
        long double p = 1;
        for (Eigen::Index j = 0; j < n; ++j) {
            B(j, q) = p;
            p *= static_cast<long double>(b[q]);
        }
    }
    return B;
}

struct VandermondeSolution {
    std::vector<double> C;
    double condition = 0.0;
    double residual = 0.0;        // max-norm, relative to max |nu|
    double backward_error = 0.0;  // componentwise
};

inline constexpr double kMaxBackwardError = 1e-12;

/// Solves sum_q C_q b_q^j = nu_j for j = 0..n-1. Each moment must be matched to
/// kMaxBackwardError relative to sum_q |C_q b_q^j| + |nu_j|.
inline VandermondeSolution solve_vandermonde(const std::vector<double>& b,
                                             const std::vector<double>& nu) {
    if (b.empty()) throw InvalidArgument("solve_vandermonde: empty node vector");
    if (b.size() != nu.size()) throw DimensionError("solve_vandermonde: b and nu lengths differ");
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (!std::isfinite(b[i])) throw InvalidArgument("solve_vandermonde: non-finite node");
        for (std::size_t j = 0; j < i; ++j) {
            if (b[i] == b[j]) throw IllConditionedError("solve_vandermonde: repeated node b");
        }
    }
    std::vector<long double> rhs(nu.begin(), nu.end());
    LinearSolution sol = refined_solve(vandermonde_matrix(b), rhs);
    if (!(sol.backward_error <= kMaxBackwardError)) {
        std::ostringstream msg;
        msg << "solve_vandermonde: componentwise residual " << sol.backward_error << " above "
            << kMaxBackwardError << " (condition " << sol.condition << ")";
        throw IllConditionedError(msg.str());
    }
    return {std::move(sol.x), sol.condition, sol.residual, sol.backward_error};
}

}  // namespace randmpf
