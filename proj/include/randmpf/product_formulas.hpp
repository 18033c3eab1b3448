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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "randmpf/operator_core.hpp"

namespace randmpf {

struct Step {
    std::size_t term = 0;
    double alpha = 0.0;
};

/// prod_j e^{-i alpha_j h_{k_j} t}. steps[0] is applied first, so the matrix is
/// F_N ... F_2 F_1.
struct ExponentSchedule {
    std::vector<Step> steps;
    std::size_t L = 0;
    int chi = 0;

    std::size_t size() const { return steps.size(); }
};

inline ExponentSchedule s1_schedule(std::size_t L) {
    if (L == 0) throw InvalidArgument("s1_schedule: L must be positive");
    ExponentSchedule s{{}, L, 0};
    for (std::size_t k = 0; k < L; ++k) s.steps.push_back({k, 1.0});
    return s;
}

inline ExponentSchedule s2_schedule(std::size_t L) {
    if (L == 0) throw InvalidArgument("s2_schedule: L must be positive");
    ExponentSchedule s{{}, L, 1};
    for (std::size_t k = 0; k < L; ++k) s.steps.push_back({k, 0.5});
    for (std::size_t k = L; k-- > 0;) s.steps.push_back({k, 0.5});
    return s;
}

/// s_{2 chi} = 1 / (4 - 4^{1/(2 chi + 1)}); S_{2 chi} recurses with s_{2 chi - 2}.
inline double suzuki_s(int chi) {
    return 1.0 / (4.0 - std::pow(4.0, 1.0 / (2.0 * chi + 1.0)));
}

namespace detail {

inline void append_scaled(ExponentSchedule& out, const ExponentSchedule& in, double factor) {
    for (const Step& st : in.steps) out.steps.push_back({st.term, st.alpha * factor});
}

}  // namespace detail

/// Combine consecutive steps on the same term. Never lengthens the schedule.
inline ExponentSchedule merge_adjacent(const ExponentSchedule& s) {
    ExponentSchedule out{{}, s.L, s.chi};
    for (const Step& st : s.steps) {
        if (!out.steps.empty() && out.steps.back().term == st.term) {
            out.steps.back().alpha += st.alpha;
        } else {
            out.steps.push_back(st);
        }
    }
    return out;
}

/// Unmerged Suzuki recursion for S_{2 chi}; 2 L 5^{chi-1} steps.
inline ExponentSchedule suzuki_schedule(int chi, std::size_t L) {
    if (chi < 1) throw InvalidArgument("suzuki_schedule: chi must be >= 1");
    if (chi == 1) return s2_schedule(L);
    ExponentSchedule inner = suzuki_schedule(chi - 1, L);
    double s = suzuki_s(chi - 1);
    ExponentSchedule out{{}, L, chi};
    detail::append_scaled(out, inner, s);
    detail::append_scaled(out, inner, s);
    detail::append_scaled(out, inner, 1.0 - 4.0 * s);
    detail::append_scaled(out, inner, s);
    detail::append_scaled(out, inner, s);
    return out;
}

/// (prod e^{-i alpha_j h t / r})^r, merging only where copies meet.
inline ExponentSchedule repeat_schedule(const ExponentSchedule& s, int r) {
    if (r < 1) throw InvalidArgument("repeat_schedule: r must be >= 1");
    ExponentSchedule out{{}, s.L, s.chi};
    for (int copy = 0; copy < r; ++copy) {
        for (std::size_t j = 0; j < s.steps.size(); ++j) {
            Step st{s.steps[j].term, s.steps[j].alpha / r};
            if (j == 0 && copy > 0 && out.steps.back().term == st.term) {
                out.steps.back().alpha += st.alpha;
            } else {
                out.steps.push_back(st);
            }
        }
    }
    return out;
}

/// Per-term sum of alpha.
inline std::vector<double> alpha_sums(const ExponentSchedule& s) {
    std::vector<double> sums(s.L, 0.0);
    for (const Step& st : s.steps) sums.at(st.term) += st.alpha;
    return sums;
}

inline std::uint64_t raw_oracle_count(int chi, std::size_t L) {
    std::uint64_t p = 1;
    for (int i = 1; i < chi; ++i) p *= 5;
    return 2 * L * p;
}

inline std::uint64_t merged_oracle_count(int chi, std::size_t L) {
    std::uint64_t p = 1;
    for (int i = 1; i < chi; ++i) p *= 5;
    return 2 * p * (L - 1) + 1;
}

template <typename Derived>
void apply_schedule(const ExponentSchedule& s, const HamiltonianSpec& H, double t,
                    Eigen::MatrixBase<Derived>& x) {
    if (s.L != H.L()) throw DimensionError("apply_schedule: schedule and Hamiltonian term counts differ");
    for (const Step& st : s.steps) H.term(st.term).apply_expm(st.alpha * t, x);
}

inline Matrix schedule_matrix(const ExponentSchedule& s, const HamiltonianSpec& H, double t) {
    if (s.L != H.L()) {
        throw DimensionError("schedule_matrix: schedule addresses " + std::to_string(s.L) +
                             " terms, Hamiltonian has " + std::to_string(H.L()));
    }
    Matrix x = Matrix::Identity(H.dim(), H.dim());
    apply_schedule(s, H, t, x);
    return x;
}

/// (sum_j |alpha_j| ||h_{k_j}|| t)^{ell+1} / (ell+1)!
inline double remainder_bound(const ExponentSchedule& s, const HamiltonianSpec& H, double t,
                              int ell) {
    if (t < 0 || ell < 0) throw InvalidArgument("remainder_bound: t and ell must be nonnegative");
    double x = 0.0;
    for (const Step& st : s.steps) x += std::abs(st.alpha) * H.term(st.term).norm();
    x *= t;
    return std::pow(x, ell + 1) / std::tgamma(ell + 2.0);
}

}  // namespace randmpf
