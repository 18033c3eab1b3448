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
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "randmpf/mpf.hpp"
#include "randmpf/operator_core.hpp"
#include "randmpf/product_formulas.hpp"

namespace randmpf {

/// (4 chi / 5)(5/3)^{chi-1}
inline double g_factor(int chi) {
    if (chi < 1) throw InvalidArgument("g_factor: chi must be >= 1");
    return 0.8 * chi * std::pow(5.0 / 3.0, chi - 1);
}

namespace detail {

inline double taylor_tail(double x, int order) { return std::pow(x, order) / std::tgamma(order + 1.0); }

inline void check_time(double Lambda, double t) {
    if (!(Lambda >= 0) || !(t >= 0)) throw InvalidArgument("bound: Lambda and t must be nonnegative");
}

}  // namespace detail

/// 2 (g Lambda t / r)^{2 chi + 1} / (2 chi + 1)!
inline double ts_bound(int chi, int r, double Lambda, double t) {
    detail::check_time(Lambda, t);
    if (r < 1) throw InvalidArgument("ts_bound: r must be >= 1");
    return 2.0 * detail::taylor_tail(g_factor(chi) * Lambda * t / r, 2 * chi + 1);
}

/// (1 + g^{2(chi+K)+1} sum|C|) (Lambda t)^{2(chi+K)+1} / (2(chi+K)+1)!
inline double cw_bound(int chi, int K, double c_one_norm, double Lambda, double t) {
    detail::check_time(Lambda, t);
    const int order = 2 * (chi + K) + 1;
    return (1.0 + std::pow(g_factor(chi), order) * c_one_norm) * detail::taylor_tail(Lambda * t, order);
}

/// (1 + zeta g^{2 chi R + 1}) (Lambda t)^{2 chi R + 1} / (2 chi R + 1)!
inline double new_bound(int chi, int R, double zeta, double Lambda, double t) {
    detail::check_time(Lambda, t);
    const int order = 2 * chi * R + 1;
    return (1.0 + zeta * std::pow(g_factor(chi), order)) * detail::taylor_tail(Lambda * t, order);
}

/// Sum over r of (sum_q |C_q b_q|)^{(r)} times the other blocks' 1-norms.
inline double zeta_matching(const MPFSpec& spec) {
    const auto& blocks = std::get<Matching>(spec.data).blocks;
    double zeta = 0.0;
    for (std::size_t r = 0; r < blocks.size(); ++r) {
        double term = blocks[r].weighted_norm();
        for (std::size_t s = 0; s < blocks.size(); ++s) {
            if (s != r) term *= blocks[s].one_norm;
        }
        zeta += term;
    }
    return zeta;
}

/// Sum over r of A0^{r-1} B_r + (r-1) A0^{r-2} B0 A_r, with A the 1-norms and
/// B the |C b| sums of the shift block (0) and correction blocks.
inline double zeta_cf(const MPFSpec& spec) {
    const auto& cf = std::get<ClosedForm>(spec.data);
    const double A0 = cf.block0.one_norm;
    const double B0 = cf.block0.weighted_norm();
    double zeta = 0.0;
    for (std::size_t i = 0; i < cf.blocks.size(); ++i) {
        const int r = static_cast<int>(i) + 1;
        zeta += std::pow(A0, r - 1) * cf.blocks[i].weighted_norm();
        if (r >= 2) zeta += (r - 1) * std::pow(A0, r - 2) * B0 * cf.blocks[i].one_norm;
    }
    return zeta;
}

inline double zeta(const MPFSpec& spec) {
    switch (spec.kind()) {
        case MpfKind::Matching:
            return zeta_matching(spec);
        case MpfKind::ClosedForm:
            return zeta_cf(spec);
        case MpfKind::ChildsWiebe:
            return 0.0;
    }
    return 0.0;
}

/// The error bound belonging to the spec's family.
inline double mpf_bound(const MPFSpec& spec, double Lambda, double t) {
    if (spec.kind() == MpfKind::ChildsWiebe) {
        return cw_bound(spec.chi, spec.K, spec.resolution, Lambda, t);
    }
    return new_bound(spec.chi, spec.R, zeta(spec), Lambda, t);
}

namespace detail {

inline void tuple_sum(const std::vector<const LBlock*>& factors, std::size_t depth, double weight, double bsum,
                      int power, double& acc) {
    if (depth == factors.size()) {
        acc += weight * std::pow(bsum, power);
        return;
    }
    const LBlock& blk = *factors[depth];
    for (std::size_t q = 0; q < blk.b.size(); ++q) {
        if (blk.C[q] != 0.0) tuple_sum(factors, depth + 1, weight * std::abs(blk.C[q]), bsum + std::abs(blk.b[q]), power, acc);
    }
}

}  // namespace detail

/// Sum over the index tuples of every product in the formula of
/// |C_{q_1} ... C_{q_r}| (|b_{q_1}| + ... + |b_{q_r}|)^power. power = 1 is zeta.
inline double full_power_zeta(const MPFSpec& spec, int power) {
    if (spec.kind() == MpfKind::ChildsWiebe) throw InvalidArgument("full_power_zeta: not defined for Childs-Wiebe");
    std::vector<std::vector<const LBlock*>> products;
    if (const auto* m = std::get_if<Matching>(&spec.data)) {
        std::vector<const LBlock*> f;
        for (const LBlock& b : m->blocks) f.push_back(&b);
        products.push_back(f);
    } else {
        const auto& cf = std::get<ClosedForm>(spec.data);
        for (std::size_t r = 0; r < cf.blocks.size(); ++r) {
            std::vector<const LBlock*> f(r, &cf.block0);
            f.push_back(&cf.blocks[r]);
            products.push_back(f);
        }
    }
    double tuples = 0;
    for (const auto& f : products) {
        double n = 1;
        for (const LBlock* b : f) n *= static_cast<double>(b->b.size());
        tuples += n;
    }
    if (tuples > 1e8) throw DimensionError("full_power_zeta: too many index tuples");
    double acc = 0.0;
    for (const auto& f : products) detail::tuple_sum(f, 0, 1.0, 0.0, power, acc);
    return acc;
}

/// Bound from the Taylor remainder of each product S(b_1 t)...S(b_r t) taken
/// at full power: (1 + Z g^p) (Lambda t)^p / p! with p = 2 chi R + 1 and
/// Z = full_power_zeta(spec, p). new_bound keeps the node sum at power one,
/// which undercounts the remainder once nodes exceed 1 in magnitude.
inline double full_power_bound(const MPFSpec& spec, double Lambda, double t) {
    if (spec.kind() == MpfKind::ChildsWiebe) return mpf_bound(spec, Lambda, t);
    detail::check_time(Lambda, t);
    const int p = spec.order();
    return (1.0 + full_power_zeta(spec, p) * std::pow(g_factor(spec.chi), p)) * detail::taylor_tail(Lambda * t, p);
}

namespace detail {

// Ceiling that ignores a last-ulp excess above an integer.
inline std::uint64_t ceil_count(double x) {
    if (!std::isfinite(x) || x < 0) throw NumericError("shot count is not a finite nonnegative number");
    double c = std::ceil(x * (1.0 - 4.0 * std::numeric_limits<double>::epsilon()));
    return static_cast<std::uint64_t>(c);
}

}  // namespace detail

/// ceil(2 L 5^{2 chi} (L tau)^{1 + 1/(2 chi)} / eps^{1/(2 chi)})
inline std::uint64_t ts_oracle_calls(int chi, std::size_t L, double tau, double epsilon) {
    if (chi < 1 || L < 1 || !(tau > 0) || !(epsilon > 0) || epsilon > 1) {
        throw InvalidArgument("ts_oracle_calls: need chi, L >= 1, tau > 0, 0 < eps <= 1");
    }
    const double m = 2.0 * chi;
    const double Ld = static_cast<double>(L);
    return detail::ceil_count(2.0 * Ld * std::pow(5.0, m) * std::pow(Ld * tau, 1.0 + 1.0 / m) /
                              std::pow(epsilon, 1.0 / m));
}

struct ShotPlan {
    double epsilon = 0.0;
    double delta = 0.0;
    double Xi = 1.0;
    std::uint64_t N = 0;
};

namespace detail {

inline void check_accuracy(double epsilon, double delta) {
    if (!(epsilon > 0 && epsilon < 1) || !(delta > 0 && delta < 1)) {
        throw InvalidArgument("shot plan: epsilon and delta must lie in (0, 1)");
    }
}

}  // namespace detail

/// ceil(2 ln(2/delta) / eps^2)
inline ShotPlan hoeffding_shots(double epsilon, double delta) {
    detail::check_accuracy(epsilon, delta);
    return {epsilon, delta, 1.0, detail::ceil_count(2.0 * std::log(2.0 / delta) / (epsilon * epsilon))};
}

/// ceil(8 ln(2/delta) (Xi/eps)^2)
inline ShotPlan resolution_shots(double Xi, double epsilon, double delta) {
    detail::check_accuracy(epsilon, delta);
    if (!(Xi >= 1.0)) throw InvalidArgument("resolution_shots: Xi must be >= 1");
    const double ratio = Xi / epsilon;
    return {epsilon, delta, Xi, detail::ceil_count(8.0 * std::log(2.0 / delta) * ratio * ratio)};
}

struct ClosenessCheck {
    double lhs = 0.0;     // |tr(O U rho U^dag) - Xi^2 tr(O V rho V^dag)|
    double rhs = 0.0;     // 3 eps_hat
    double sharp = 0.0;   // 2 eps_hat + eps_hat^2
    double eps_hat = 0.0; // ||Xi V - U||
    bool holds = false;
};

/// Compares expectation values of a unitary U and a scaled approximation V.
inline ClosenessCheck lemma_closeness_check(const Matrix& U, const Matrix& V, double Xi,
                                            const Observable& O, const QuantumState& rho) {
    if (O.rescaled()) throw InvalidArgument("lemma_closeness_check: observable must have norm <= 1");
    ClosenessCheck c;
    c.eps_hat = spectral_distance(Xi * V, U);
    double exact = expectation(O, rho, U);
    double approx = Xi * Xi * expectation(O, rho, V);
    c.lhs = std::abs(exact - approx);
    c.rhs = 3.0 * c.eps_hat;
    c.sharp = 2.0 * c.eps_hat + c.eps_hat * c.eps_hat;
    c.holds = c.lhs <= c.rhs;
    return c;
}

enum class Method { TrotterSuzuki, ChildsWiebe, Matching, ClosedForm };

inline std::string method_name(Method m) {
    switch (m) {
        case Method::TrotterSuzuki:
            return "ts";
        case Method::ChildsWiebe:
            return "cw";
        case Method::Matching:
            return "matching";
        case Method::ClosedForm:
            return "closedform";
    }
    return "?";
}

struct BoundReport {
    Method method = Method::TrotterSuzuki;
    int chi = 1;
    int RK = 0;  // R for the new formulas, K for Childs-Wiebe, 0 for TS
    int r = 1;   // S blocks along the deepest product
    double Lambda = 0.0;
    double t = 0.0;
    double zeta = 0.0;
    double bound = 0.0;
    std::uint64_t depth_merged = 0;  // merged exponentials along the deepest product
    std::uint64_t depth_blocks = 0;  // r * 2 * 5^{chi-1}
};

namespace detail {

inline void fill_depth(BoundReport& rep, std::size_t L) {
    std::uint64_t m = merged_oracle_count(rep.chi, L);
    rep.depth_merged = static_cast<std::uint64_t>(rep.r) * (m - 1) + 1;
    rep.depth_blocks = static_cast<std::uint64_t>(rep.r) * raw_oracle_count(rep.chi, 1);
}

}  // namespace detail

inline BoundReport ts_report(int chi, int r, double Lambda, double t, std::size_t L) {
    BoundReport rep{Method::TrotterSuzuki, chi, 0, r, Lambda, t, 0.0, ts_bound(chi, r, Lambda, t), 0, 0};
    detail::fill_depth(rep, L);
    return rep;
}

inline BoundReport mpf_report(const MPFSpec& spec, double Lambda, double t, std::size_t L) {
    BoundReport rep;
    switch (spec.kind()) {
        case MpfKind::ChildsWiebe:
            rep.method = Method::ChildsWiebe;
            rep.RK = spec.K;
            break;
        case MpfKind::Matching:
            rep.method = Method::Matching;
            rep.RK = spec.R;
            break;
        case MpfKind::ClosedForm:
            rep.method = Method::ClosedForm;
            rep.RK = spec.R;
            break;
    }
    rep.chi = spec.chi;
    rep.r = spec.depth_blocks();
    rep.Lambda = Lambda;
    rep.t = t;
    rep.zeta = zeta(spec);
    rep.bound = mpf_bound(spec, Lambda, t);
    detail::fill_depth(rep, L);
    return rep;
}

}  // namespace randmpf
