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
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "randmpf/bounds.hpp"
#include "randmpf/formula.hpp"
#include "randmpf/mpf.hpp"
#include "randmpf/parallel.hpp"
#include "randmpf/series.hpp"

namespace randmpf {

/// One approximation of e^{-iHt} together with its error bound.
struct MethodCase {
    std::string name;
    Method method = Method::TrotterSuzuki;
    int chi = 1;
    int rk = 1;  // r for TS, K for Childs-Wiebe, R otherwise
    Approximation approx;
    int order = 0;
    std::optional<MPFSpec> spec;

    double bound(double Lambda, double t) const {
        return spec ? mpf_bound(*spec, Lambda, t) : ts_bound(chi, rk, Lambda, t);
    }

    /// Same as bound() except for the new formulas, see full_power_bound.
    double full_bound(double Lambda, double t) const {
        return spec ? full_power_bound(*spec, Lambda, t) : ts_bound(chi, rk, Lambda, t);
    }

    BoundReport report(double Lambda, double t, std::size_t L) const {
        return spec ? mpf_report(*spec, Lambda, t, L) : ts_report(chi, rk, Lambda, t, L);
    }

    Matrix matrix(const HamiltonianSpec& H, double t) const { return evaluate(approx, H, t); }
};

inline MethodCase ts_case(int chi, int r) {
    return {"ts", Method::TrotterSuzuki, chi, r, ts_approximation(chi, r), 2 * chi + 1, std::nullopt};
}

inline MethodCase mpf_case(const MPFSpec& spec) {
    MethodCase c;
    c.chi = spec.chi;
    c.approx = approximation(spec);
    c.order = spec.order();
    c.spec = spec;
    switch (spec.kind()) {
        case MpfKind::ChildsWiebe:
            c.name = "cw";
            c.method = Method::ChildsWiebe;
            c.rk = spec.K;
            break;
        case MpfKind::Matching:
            c.name = "matching";
            c.method = Method::Matching;
            c.rk = spec.R;
            break;
        case MpfKind::ClosedForm:
            c.name = "closedform";
            c.method = Method::ClosedForm;
            c.rk = spec.R;
            break;
    }
    return c;
}

/// TS with r = R, Childs-Wiebe with K = R - 1 (ell = 1..R), and the two given
/// formulas. All four have R Suzuki blocks along their deepest product.
inline std::vector<MethodCase> depth_parity_cases(int chi, int R, const MPFSpec& matching, const MPFSpec& cf) {
    if (matching.kind() != MpfKind::Matching || cf.kind() != MpfKind::ClosedForm) {
        throw InvalidArgument("depth_parity_cases: expected a matching and a closed-form spec");
    }
    if (matching.chi != chi || matching.R != R || cf.chi != chi || cf.R != R) {
        throw InvalidArgument("depth_parity_cases: specs do not match (chi, R)");
    }
    std::vector<MethodCase> cases{ts_case(chi, R), mpf_case(cw_coefficients(chi, R - 1)), mpf_case(matching),
                                  mpf_case(cf)};
    for (const MethodCase& c : cases) {
        if (block_depth(c.approx.root) != R) {
            throw InvalidArgument("depth_parity_cases: method " + c.name + " breaks depth parity");
        }
    }
    return cases;
}

/// n log-spaced points from lo to hi inclusive.
inline std::vector<double> log_grid(double lo, double hi, int n) {
    if (!(lo > 0) || !(hi > lo) || n < 2) throw InvalidArgument("log_grid: need 0 < lo < hi and n >= 2");
    std::vector<double> g;
    const double a = std::log10(lo), b = std::log10(hi);
    for (int i = 0; i < n; ++i) g.push_back(std::pow(10.0, a + (b - a) * i / (n - 1)));
    g.back() = hi;
    return g;
}

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    double t_lo = 0.0, t_hi = 0.0;  // fit window
    int points = 0;
};

inline constexpr double kSlopeWindowLo = 1e-11;
inline constexpr double kSlopeWindowHi = 1e-4;

/// Least-squares slope of log10(distance) against log10(t), using only the
/// points whose distance lies in [1e-11, 1e-4]. Needs at least 4 such points
/// spanning a decade of distance.
inline SlopeFit fit_slope(const std::vector<double>& t, const std::vector<double>& d) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (d[i] >= kSlopeWindowLo && d[i] <= kSlopeWindowHi) {
            x.push_back(std::log10(t[i]));
            y.push_back(std::log10(d[i]));
        }
    }
    if (x.size() < 4 || *std::max_element(y.begin(), y.end()) - *std::min_element(y.begin(), y.end()) < 1.0) {
        std::ostringstream msg;
        msg << "fit_slope: only " << x.size() << " points with distance in [1e-11, 1e-4]";
        if (!x.empty()) {
            msg << " spanning " << *std::max_element(y.begin(), y.end()) - *std::min_element(y.begin(), y.end())
                << " decades";
        }
        throw NumericError(msg.str());
    }
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i] / n;
        my += y[i] / n;
    }
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    SlopeFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.t_lo = std::pow(10.0, *std::min_element(x.begin(), x.end()));
    f.t_hi = std::pow(10.0, *std::max_element(x.begin(), x.end()));
    f.points = static_cast<int>(x.size());
    return f;
}

/// Scans tau = Lambda t over [1e-4, 10] and fits the direct double distance.
inline SlopeFit measure_slope(const MethodCase& c, const HamiltonianSpec& H, int points = 80) {
    const double lambda = lambda_norm(H);
    std::vector<double> t, d;
    for (double tau : log_grid(1e-4, 10.0, points)) {
        t.push_back(tau / lambda);
        d.push_back(spectral_distance(exact_evolution(H, t.back()), c.matrix(H, t.back())));
    }
    return fit_slope(t, d);
}

/// The default tolerance on a fitted slope: 0.15 for S2, 0.2 for S4, 0.7 for
/// orders of 9 and above, 0.5 otherwise.
inline double default_slope_tolerance(const MethodCase& c) {
    if (c.method == Method::TrotterSuzuki && c.chi == 1) return 0.15;
    if (c.method == Method::TrotterSuzuki && c.chi == 2) return 0.2;
    if (c.order >= 9) return 0.7;
    return 0.5;
}

struct SweepRow {
    double tau = 0.0;
    std::string method;
    double distance = 0.0;
    double bound = 0.0;
    double full_bound = 0.0;
    bool from_series = false;
};

/// Distance and bound for every case at every tau of the grid. Cases run in
/// parallel; rows come back grouped by case in input order.
inline std::vector<SweepRow> distance_sweep(const std::vector<MethodCase>& cases, const HamiltonianSpec& H,
                                            const std::vector<double>& taus, int series_degree = 64,
                                            unsigned threads = thread_count()) {
    const double lambda = lambda_norm(H);
    std::vector<std::vector<SweepRow>> per_case(cases.size());
    auto jets = std::make_shared<JetCache>(H, series_degree);
    parallel_for(
        cases.size(),
        [&](std::size_t i) {
            const MethodCase& c = cases[i];
            DistanceEvaluator ev(c.approx, H, c.order, series_degree, jets);
            for (double tau : taus) {
                double t = tau / lambda;
                DistanceSample s = ev.distance(t);
                per_case[i].push_back({tau, c.name, s.value, c.bound(lambda, t), c.full_bound(lambda, t), s.from_series});
            }
        },
        threads);
    std::vector<SweepRow> rows;
    for (auto& v : per_case) rows.insert(rows.end(), v.begin(), v.end());
    return rows;
}

}  // namespace randmpf
