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
#include <memory>
#include <vector>

#include "randmpf/mpf.hpp"
#include "randmpf/product_formulas.hpp"

namespace randmpf {

inline constexpr double kPruneWeight = 1e-14;

/// One sampled unitary: the schedule evaluated at time_scale * t.
struct EnsembleEntry {
    double probability = 0.0;
    int sign = 1;
    ExponentSchedule schedule;
    double time_scale = 1.0;
};

struct EnsembleLayer {
    std::vector<EnsembleEntry> entries;
};

/// One summand of the ensemble: a product of independent draws from the listed
/// layers. layers[0] is the leftmost factor.
struct EnsembleBranch {
    double probability = 1.0;
    std::vector<std::size_t> layers;
};

/// E[V] over branches and entries equals the target operator divided by Xi.
struct SamplingEnsemble {
    std::vector<EnsembleLayer> layers;
    std::vector<EnsembleBranch> branches;
    double resolution = 1.0;
    std::size_t L = 0;
};

namespace detail {

// Entries whose weight is below kPruneWeight of the layer's 1-norm are dropped.
// They are Vandermonde roundoff in blocks that are trivially a single S.
inline EnsembleLayer weighted_layer(const std::vector<double>& weights,
                                    const std::vector<ExponentSchedule>& schedules,
                                    const std::vector<double>& scales) {
    double norm = 0.0;
    for (double w : weights) norm += std::abs(w);
    double kept = 0.0;
    for (double w : weights) {
        if (std::abs(w) > kPruneWeight * norm) kept += std::abs(w);
    }
    EnsembleLayer layer;
    for (std::size_t q = 0; q < weights.size(); ++q) {
        if (!(std::abs(weights[q]) > kPruneWeight * norm)) continue;
        layer.entries.push_back(
            {std::abs(weights[q]) / kept, weights[q] < 0 ? -1 : 1, schedules[q], scales[q]});
    }
    return layer;
}

inline EnsembleLayer block_layer(const LBlock& block, const ExponentSchedule& s) {
    return weighted_layer(block.C, std::vector<ExponentSchedule>(block.b.size(), s), block.b);
}

}  // namespace detail

/// Uniform mixture of S1(t) and its reversed product; the mean is the
/// symmetrized second-order formula.
inline SamplingEnsemble s2_hat_ensemble(std::size_t L) {
    ExponentSchedule forward = s1_schedule(L);
    ExponentSchedule reversed{{forward.steps.rbegin(), forward.steps.rend()}, L, 0};
    SamplingEnsemble ens;
    ens.L = L;
    ens.layers.push_back({{{0.5, 1, forward, 1.0}, {0.5, 1, reversed, 1.0}}});
    ens.branches.push_back({1.0, {0}});
    return ens;
}

inline SamplingEnsemble mpf_ensemble(const MPFSpec& spec, std::size_t L) {
    ExponentSchedule S = merge_adjacent(suzuki_schedule(spec.chi, L));
    SamplingEnsemble ens;
    ens.L = L;
    ens.resolution = spec.resolution;
    switch (spec.kind()) {
        case MpfKind::ChildsWiebe: {
            const auto& cw = std::get<ChildsWiebe>(spec.data);
            std::vector<ExponentSchedule> schedules;
            for (int l : cw.ell) schedules.push_back(repeat_schedule(S, l));
            ens.layers.push_back(
                detail::weighted_layer(cw.C, schedules, std::vector<double>(cw.C.size(), 1.0)));
            ens.branches.push_back({1.0, {0}});
            break;
        }
        case MpfKind::Matching: {
            EnsembleBranch all{1.0, {}};
            for (const LBlock& b : std::get<Matching>(spec.data).blocks) {
                all.layers.push_back(ens.layers.size());
                ens.layers.push_back(detail::block_layer(b, S));
            }
            ens.branches.push_back(std::move(all));
            break;
        }
        case MpfKind::ClosedForm: {
            const auto& cf = std::get<ClosedForm>(spec.data);
            ens.layers.push_back(detail::block_layer(cf.block0, S));
            std::vector<double> weights;
            double a0_power = 1.0;
            for (std::size_t r = 0; r < cf.blocks.size(); ++r) {
                ens.layers.push_back(detail::block_layer(cf.blocks[r], S));
                weights.push_back(a0_power * cf.blocks[r].one_norm);
                a0_power *= cf.block0.one_norm;
            }
            double total = 0.0;
            for (double w : weights) total += w;
            for (std::size_t r = 0; r < weights.size(); ++r) {
                EnsembleBranch br{weights[r] / total, std::vector<std::size_t>(r, 0)};
                br.layers.push_back(r + 1);
                ens.branches.push_back(std::move(br));
            }
            break;
        }
    }
    return ens;
}

/// Every entry's unitary at one fixed t. Holds its own copy of the ensemble.
struct CompiledEnsemble {
    std::shared_ptr<const SamplingEnsemble> ensemble;
    std::vector<std::vector<Matrix>> unitaries;  // [layer][entry]
};

inline CompiledEnsemble compile(const SamplingEnsemble& ens, const HamiltonianSpec& H, double t) {
    if (ens.L != H.L()) throw DimensionError("compile: ensemble and Hamiltonian term counts differ");
    CompiledEnsemble out{std::make_shared<const SamplingEnsemble>(ens), {}};
    for (const EnsembleLayer& layer : ens.layers) {
        std::vector<Matrix> mats;
        for (const EnsembleEntry& e : layer.entries) {
            mats.push_back(schedule_matrix(e.schedule, H, e.time_scale * t));
        }
        out.unitaries.push_back(std::move(mats));
    }
    return out;
}

/// sum over branches and entries of p * sign * (factor product).
inline Matrix mean_operator(const CompiledEnsemble& c) {
    const SamplingEnsemble& ens = *c.ensemble;
    const Eigen::Index d = c.unitaries.at(0).at(0).rows();
    std::vector<Matrix> layer_mean;
    for (std::size_t l = 0; l < ens.layers.size(); ++l) {
        Matrix m = Matrix::Zero(d, d);
        for (std::size_t q = 0; q < ens.layers[l].entries.size(); ++q) {
            const EnsembleEntry& e = ens.layers[l].entries[q];
            m += (e.probability * e.sign) * c.unitaries[l][q];
        }
        layer_mean.push_back(std::move(m));
    }
    Matrix total = Matrix::Zero(d, d);
    for (const EnsembleBranch& br : ens.branches) {
        Matrix prod = Matrix::Identity(d, d);
        for (std::size_t l : br.layers) {
            Matrix next = prod * layer_mean[l];
            prod = std::move(next);
        }
        total += br.probability * prod;
    }
    return total;
}

}  // namespace randmpf
