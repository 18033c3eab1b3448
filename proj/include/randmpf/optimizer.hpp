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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "randmpf/bounds.hpp"
#include "randmpf/mpf.hpp"
#include "randmpf/rng.hpp"

namespace randmpf {

using Point = std::vector<double>;
using Objective = std::function<double(const Point&)>;

struct NelderMeadOptions {
    double tol = 1e-8;        // stop when every vertex is this close to the best (max norm)
    int max_iters = 2000;
    double box = std::numeric_limits<double>::infinity();  // trial points are clipped to [-box, box]
    double initial_step = 0.05;  // relative edge length of the starting simplex
};

struct LocalResult {
    Point x;
    double f = std::numeric_limits<double>::infinity();
    int iterations = 0;
    int evaluations = 0;
};

/// Downhill simplex. Uses the dimension-dependent coefficients of Gao and Han
/// for n >= 3 and the classic (1, 2, 1/2, 1/2) otherwise.
inline LocalResult nelder_mead(const Objective& f, const Point& x0, const NelderMeadOptions& opt = {}) {
    const std::size_t n = x0.size();
    if (n == 0) throw InvalidArgument("nelder_mead: empty starting point");
    const double nd = static_cast<double>(n);
    const double alpha = 1.0;
    const double beta = n >= 3 ? 1.0 + 2.0 / nd : 2.0;
    const double gamma = n >= 3 ? 0.75 - 0.5 / nd : 0.5;
    const double delta = n >= 3 ? 1.0 - 1.0 / nd : 0.5;

    LocalResult res;
    auto clip = [&](Point& x) {
        for (double& v : x) v = std::clamp(v, -opt.box, opt.box);
    };
    auto eval = [&](const Point& x) {
        ++res.evaluations;
        double v = f(x);
        return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
    };

    std::vector<Point> simplex(n + 1, x0);
    clip(simplex[0]);
    for (std::size_t i = 0; i < n; ++i) {
        double step = opt.initial_step * std::max(std::abs(x0[i]), 0.5);
        simplex[i + 1] = simplex[0];
        simplex[i + 1][i] += step;
        if (simplex[i + 1][i] > opt.box) simplex[i + 1][i] = simplex[0][i] - step;
        clip(simplex[i + 1]);
    }
    std::vector<double> fv(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    Point centroid(n), xr(n), xe(n), xc(n);
    for (;;) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order[0], worst = order[n], second = order[n - 1];

        double diameter = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                diameter = std::max(diameter, std::abs(simplex[i][j] - simplex[best][j]));
            }
        }
        if (diameter < opt.tol || res.iterations >= opt.max_iters) break;
        ++res.iterations;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / nd;
        }
        for (std::size_t j = 0; j < n; ++j) xr[j] = centroid[j] + alpha * (centroid[j] - simplex[worst][j]);
        clip(xr);
        double fr = eval(xr);
        if (fr < fv[best]) {
            for (std::size_t j = 0; j < n; ++j) xe[j] = centroid[j] + beta * (xr[j] - centroid[j]);
            clip(xe);
            double fe = eval(xe);
            if (fe < fr) {
                simplex[worst] = xe;
                fv[worst] = fe;
            } else {
                simplex[worst] = xr;
                fv[worst] = fr;
            }
            continue;
        }
        if (fr < fv[second]) {
            simplex[worst] = xr;
            fv[worst] = fr;
            continue;
        }
        bool outside = fr < fv[worst];
        for (std::size_t j = 0; j < n; ++j) {
            xc[j] = outside ? centroid[j] + gamma * (xr[j] - centroid[j])
                            : centroid[j] + gamma * (simplex[worst][j] - centroid[j]);
        }
        clip(xc);
        double fc = eval(xc);
        if (fc < (outside ? fr : fv[worst])) {
            simplex[worst] = xc;
            fv[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t j = 0; j < n; ++j) {
                simplex[i][j] = simplex[best][j] + delta * (simplex[i][j] - simplex[best][j]);
            }
            clip(simplex[i]);
            fv[i] = eval(simplex[i]);
        }
    }
    std::size_t best = static_cast<std::size_t>(std::min_element(fv.begin(), fv.end()) - fv.begin());
    res.x = simplex[best];
    res.f = fv[best];
    return res;
}

struct BasinHopOptions {
    int hops = 100;
    double step_scale = 0.5;
    double accept_temperature = 1.0;
    double box = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 0;
};

struct BasinHopResult {
    Point x;
    double f = std::numeric_limits<double>::infinity();
    std::vector<double> history;  // best-ever value after each hop
    int accepted = 0;
};

using LocalSearch = std::function<LocalResult(const Objective&, const Point&)>;

/// Hop 0 is a local search from x0. Each later hop perturbs the current chain
/// state by U(-step, step) per coordinate, searches locally and accepts with
/// probability min(1, exp(-(f_new - f_cur) / T)). Hop h draws from Stream(seed, h, 0).
inline BasinHopResult basin_hop(const Objective& f, const Point& x0, const BasinHopOptions& opt,
                                const LocalSearch& local) {
    if (opt.hops < 1) throw InvalidArgument("basin_hop: hops must be >= 1");
    BasinHopResult res;
    LocalResult cur = local(f, x0);
    res.x = cur.x;
    res.f = cur.f;
    res.history.push_back(res.f);
    for (int h = 1; h < opt.hops; ++h) {
        Stream rng(opt.seed, static_cast<std::uint64_t>(h), 0);
        Point trial = cur.x;
        for (double& v : trial) {
            v += opt.step_scale * (2.0 * rng.uniform() - 1.0);
            v = std::clamp(v, -opt.box, opt.box);
        }
        LocalResult next = local(f, trial);
        double u = rng.uniform();
        bool accept = next.f < cur.f ||
                      (std::isfinite(next.f) && u < std::exp(-(next.f - cur.f) / opt.accept_temperature));
        if (accept) {
            cur = std::move(next);
            ++res.accepted;
        }
        if (cur.f < res.f) {
            res.f = cur.f;
            res.x = cur.x;
        }
        res.history.push_back(res.f);
    }
    return res;
}

inline BasinHopResult basin_hop(const Objective& f, const Point& x0, const BasinHopOptions& opt,
                                const NelderMeadOptions& nm = {}) {
    NelderMeadOptions local_opt = nm;
    local_opt.box = std::min(local_opt.box, opt.box);
    return basin_hop(f, x0, opt, [local_opt](const Objective& g, const Point& x) {
        return nelder_mead(g, x, local_opt);
    });
}

enum class LossKind { BoundTimesXiPow, XiPow };

struct OptimizerConfig {
    LossKind loss = LossKind::BoundTimesXiPow;
    double tau_ref = 0.1;
    double p = 20.0;
    double b_max = 0.0;  // 0 selects chi * R + 1
    int hops = 100;
    double step_scale = 0.5;
    double accept_temperature = 1.0;
    double simplex_tol = 1e-8;
    int max_local_iters = 2000;
    int max_sweeps = 8;  // block-cyclic passes per local search
    std::uint64_t seed = 20240229;
};

/// p = 20 for matching and 10 for closed-form.
inline OptimizerConfig default_optimizer_config(MpfKind kind) {
    OptimizerConfig c;
    c.p = kind == MpfKind::ClosedForm ? 10.0 : 20.0;
    return c;
}

/// (1, -1, 2, -2, ...) of length 2 chi R + 1, once per block.
inline std::vector<std::vector<double>> default_initial_b(int chi, int R, MpfKind kind) {
    if (chi < 1 || R < 1) throw InvalidArgument("default_initial_b: need chi, R >= 1");
    if (kind == MpfKind::ChildsWiebe) throw InvalidArgument("default_initial_b: Childs-Wiebe has no b");
    std::vector<double> b;
    for (int i = 0; static_cast<int>(b.size()) < 2 * chi * R + 1; ++i) {
        double v = i / 2 + 1;
        b.push_back(i % 2 == 0 ? v : -v);
    }
    const int blocks = kind == MpfKind::Matching ? R : R + 1;
    return std::vector<std::vector<double>>(static_cast<std::size_t>(blocks), b);
}

inline MPFSpec build_mpf(MpfKind kind, int chi, int R, const std::vector<std::vector<double>>& b_list) {
    if (kind == MpfKind::Matching) return build_matching(chi, R, b_list);
    if (kind == MpfKind::ClosedForm) return build_closedform(chi, R, b_list);
    throw InvalidArgument("build_mpf: Childs-Wiebe formulas are built with cw_coefficients");
}

namespace detail {

struct BlockStats {
    double A = std::numeric_limits<double>::infinity();  // sum |C|
    double B = std::numeric_limits<double>::infinity();  // sum |C b|
};

inline BlockStats block_stats(int chi, int R, const std::vector<double>& b, const std::vector<double>& nu) {
    for (std::size_t i = 0; i < b.size(); ++i) {
        for (std::size_t j = 0; j < i; ++j) {
            if (b[i] == b[j]) return {};
        }
    }
    try {
        LBlock blk = make_block(chi, R, b, nu);
        return {blk.one_norm, blk.weighted_norm()};
    } catch (const Error&) {
        return {};
    }
}

// Xi and zeta from per-block stats; stats[0] is the shift block for closed-form.
inline std::pair<double, double> combine_stats(MpfKind kind, const std::vector<BlockStats>& s) {
    if (kind == MpfKind::Matching) {
        double xi = 1.0, zeta = 0.0;
        for (const BlockStats& b : s) xi *= b.A;
        for (std::size_t r = 0; r < s.size(); ++r) {
            double term = s[r].B;
            for (std::size_t q = 0; q < s.size(); ++q) {
                if (q != r) term *= s[q].A;
            }
            zeta += term;
        }
        return {xi, zeta};
    }
    const double A0 = s[0].A, B0 = s[0].B;
    double xi = 0.0, zeta = 0.0;
    for (std::size_t i = 1; i < s.size(); ++i) {
        const int r = static_cast<int>(i);
        xi += std::pow(A0, r - 1) * s[i].A;
        zeta += std::pow(A0, r - 1) * s[i].B;
        if (r >= 2) zeta += (r - 1) * std::pow(A0, r - 2) * B0 * s[i].A;
    }
    return {xi, zeta};
}

inline double loss_from(double xi, double zeta, int chi, int R, const OptimizerConfig& cfg) {
    if (!std::isfinite(xi) || !std::isfinite(zeta)) return std::numeric_limits<double>::infinity();
    double v = std::pow(xi, cfg.p);
    if (cfg.loss == LossKind::BoundTimesXiPow) v *= new_bound(chi, R, zeta, 1.0, cfg.tau_ref);
    return v;
}

inline std::vector<std::vector<double>> block_nus(MpfKind kind, int chi, int R) {
    if (kind == MpfKind::Matching) return matching_nu(chi, R);
    std::vector<std::vector<double>> nus;
    for (int n = 0; n <= R; ++n) nus.push_back(closedform_nu(chi, R, n));
    return nus;
}

}  // namespace detail

/// bound(tau_ref) * Xi^p or Xi^p, with Lambda = 1. +infinity when a block has
/// repeated nodes or its Vandermonde system is rejected.
inline double mpf_loss(const std::vector<std::vector<double>>& b_list, MpfKind kind, int chi, int R,
                       const OptimizerConfig& cfg) {
    std::vector<std::vector<double>> nus = detail::block_nus(kind, chi, R);
    if (b_list.size() != nus.size()) throw DimensionError("mpf_loss: wrong number of b vectors");
    std::vector<detail::BlockStats> stats;
    for (std::size_t r = 0; r < b_list.size(); ++r) {
        stats.push_back(detail::block_stats(chi, R, b_list[r], nus[r]));
    }
    auto [xi, zeta] = detail::combine_stats(kind, stats);
    return detail::loss_from(xi, zeta, chi, R, cfg);
}

struct OptimResult {
    MpfKind kind = MpfKind::Matching;
    int chi = 1;
    int R = 1;
    std::vector<std::vector<double>> b_list;
    double Xi = 0.0;
    double zeta = 0.0;
    double bound_at_tau_ref = 0.0;
    double loss_value = 0.0;
    std::vector<double> history;  // best-ever loss after each hop
};

/// Basin hopping on log(loss) over all b entries. The local search cycles
/// through the blocks, running Nelder-Mead on one block's b vector with the
/// others held fixed, until a full pass no longer improves.
inline OptimResult optimize_mpf(MpfKind kind, int chi, int R, const OptimizerConfig& cfg,
                                std::vector<std::vector<double>> b_init = {}) {
    if (kind == MpfKind::ChildsWiebe) throw InvalidArgument("optimize_mpf: nothing to optimize for Childs-Wiebe");
    const std::vector<std::vector<double>> nus = detail::block_nus(kind, chi, R);
    if (b_init.empty()) b_init = default_initial_b(chi, R, kind);
    const std::size_t blocks = nus.size();
    const std::size_t m = static_cast<std::size_t>(2 * chi * R + 1);
    const double box = cfg.b_max > 0 ? cfg.b_max : chi * R + 1.0;

    auto unpack = [&](const Point& x) {
        std::vector<std::vector<double>> b(blocks);
        for (std::size_t r = 0; r < blocks; ++r) b[r].assign(x.begin() + r * m, x.begin() + (r + 1) * m);
        return b;
    };
    auto log_loss_of_stats = [&](const std::vector<detail::BlockStats>& s) {
        auto [xi, zeta] = detail::combine_stats(kind, s);
        double l = detail::loss_from(xi, zeta, chi, R, cfg);
        return std::isfinite(l) && l > 0 ? std::log(l) : std::numeric_limits<double>::infinity();
    };
    Objective log_loss = [&](const Point& x) {
        std::vector<std::vector<double>> b = unpack(x);
        std::vector<detail::BlockStats> s;
        for (std::size_t r = 0; r < blocks; ++r) s.push_back(detail::block_stats(chi, R, b[r], nus[r]));
        return log_loss_of_stats(s);
    };

    NelderMeadOptions nm{cfg.simplex_tol, cfg.max_local_iters, box, 0.05};
    LocalSearch block_cyclic = [&](const Objective&, const Point& x0) {
        LocalResult cur;
        cur.x = x0;
        std::vector<std::vector<double>> b = unpack(x0);
        std::vector<detail::BlockStats> s;
        for (std::size_t r = 0; r < blocks; ++r) s.push_back(detail::block_stats(chi, R, b[r], nus[r]));
        cur.f = log_loss_of_stats(s);
        for (int sweep = 0; sweep < cfg.max_sweeps; ++sweep) {
            const double before = cur.f;
            for (std::size_t r = 0; r < blocks; ++r) {
                Objective partial = [&](const Point& br) {
                    std::vector<detail::BlockStats> trial = s;
                    trial[r] = detail::block_stats(chi, R, br, nus[r]);
                    return log_loss_of_stats(trial);
                };
                LocalResult lr = nelder_mead(partial, b[r], nm);
                cur.evaluations += lr.evaluations;
                cur.iterations += lr.iterations;
                if (lr.f < cur.f) {
                    b[r] = lr.x;
                    s[r] = detail::block_stats(chi, R, b[r], nus[r]);
                    cur.f = lr.f;
                }
            }
            if (!(before - cur.f > cfg.simplex_tol)) break;
        }
        cur.x.clear();
        for (const auto& v : b) cur.x.insert(cur.x.end(), v.begin(), v.end());
        return cur;
    };

    Point x0;
    for (const auto& v : b_init) {
        if (v.size() != m) throw DimensionError("optimize_mpf: initial b vector of wrong length");
        x0.insert(x0.end(), v.begin(), v.end());
    }
    if (b_init.size() != blocks) throw DimensionError("optimize_mpf: wrong number of initial b vectors");

    BasinHopOptions bh{cfg.hops, cfg.step_scale, cfg.accept_temperature, box, cfg.seed};
    BasinHopResult best = basin_hop(log_loss, x0, bh, block_cyclic);
    if (!std::isfinite(best.f)) throw NumericError("optimize_mpf: no finite loss found");

    OptimResult out;
    out.kind = kind;
    out.chi = chi;
    out.R = R;
    out.b_list = unpack(best.x);
    MPFSpec spec = build_mpf(kind, chi, R, out.b_list);
    out.Xi = spec.resolution;
    out.zeta = zeta(spec);
    out.bound_at_tau_ref = new_bound(chi, R, out.zeta, 1.0, cfg.tau_ref);
    out.loss_value = detail::loss_from(out.Xi, out.zeta, chi, R, cfg);
    for (double h : best.history) out.history.push_back(std::exp(h));
    return out;
}

}  // namespace randmpf
