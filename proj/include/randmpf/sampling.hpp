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
#include <vector>

#include "randmpf/bounds.hpp"
#include "randmpf/ensemble.hpp"
#include "randmpf/operator_core.hpp"
#include "randmpf/parallel.hpp"
#include "randmpf/rng.hpp"

namespace randmpf {

inline constexpr Eigen::Index kDensityPathMaxDim = 256;
inline constexpr std::size_t kEnumerationCap = std::size_t{1} << 20;

/// 1/2 tr(O (Vo rho Vb^dagger + Vb rho Vo^dagger)), in units of the original observable.
inline double hadamard_test_expectation(const Matrix& Vo, const Matrix& Vb, const QuantumState& rho,
                                        const Observable& O) {
    if (Vo.rows() != O.dim() || Vb.rows() != O.dim() || rho.dim() != O.dim()) {
        throw DimensionError("hadamard_test_expectation: dimension mismatch");
    }
    cplx value;
    if (rho.is_pure()) {
        Vector a = Vo * rho.vector();
        Vector b = Vb * rho.vector();
        value = 0.5 * (a.dot(O.matrix() * b) + b.dot(O.matrix() * a));
    } else {
        Matrix r = rho.density();
        value = 0.5 * (O.matrix() * (Vo * r * Vb.adjoint() + Vb * r * Vo.adjoint())).trace();
    }
    return O.scale() * value.real();
}

struct ShotRecord {
    double outcome = 0.0;  // eigenvalue of X (x) O, in units of the rescaled observable
    int sign = 1;          // product of the signs drawn in both arms
    std::size_t branch_o = 0, branch_b = 0;
    std::vector<std::size_t> entries_o, entries_b;
};

namespace detail {

inline std::size_t draw_index(double u, const std::vector<double>& cumulative) {
    for (std::size_t i = 0; i + 1 < cumulative.size(); ++i) {
        if (u < cumulative[i]) return i;
    }
    return cumulative.size() - 1;
}

}  // namespace detail

/// Shot sampler over a compiled ensemble with cumulative tables prepared once.
class ShotSampler {
   public:
    ShotSampler(const CompiledEnsemble& c, const QuantumState& rho, const Observable& O)
        : c_(c), rho_(rho), O_(O) {
        const SamplingEnsemble& ens = *c.ensemble;
        if (rho.dim() != O.dim() || c.unitaries.at(0).at(0).rows() != O.dim()) {
            throw DimensionError("ShotSampler: dimension mismatch");
        }
        if (!rho.is_pure() && rho.dim() > kDensityPathMaxDim) {
            throw DimensionError("ShotSampler: density-matrix path limited to dimension 256");
        }
        double acc = 0.0;
        for (const EnsembleBranch& br : ens.branches) branch_cdf_.push_back(acc += br.probability);
        for (const EnsembleLayer& layer : ens.layers) {
            std::vector<double> cdf;
            acc = 0.0;
            for (const EnsembleEntry& e : layer.entries) cdf.push_back(acc += e.probability);
            layer_cdf_.push_back(std::move(cdf));
        }
        if (!rho.is_pure()) density_ = rho.density();
    }

    ShotRecord shot(Stream& rng) const {
        ShotRecord rec;
        std::vector<const Matrix*> Uo = draw(rng, rec.branch_o, rec.entries_o, rec.sign);
        std::vector<const Matrix*> Ub = draw(rng, rec.branch_b, rec.entries_b, rec.sign);
        const std::vector<double>& w = O_.values();
        std::vector<double> probs;  // (+, j) then (-, j)
        probs.reserve(2 * w.size());
        const Matrix& W = O_.eigenvectors();
        if (rho_.is_pure()) {
            Vector a = apply(Uo, rho_.vector());
            Vector b = apply(Ub, rho_.vector());
            Vector plus = W.adjoint() * (a + b) * 0.5;
            Vector minus = W.adjoint() * (a - b) * 0.5;
            for (int s = 0; s < 2; ++s) {
                const Vector& v = s == 0 ? plus : minus;
                for (const auto& group : O_.groups()) {
                    double p = 0.0;
                    for (Eigen::Index i : group) p += std::norm(v[i]);
                    probs.push_back(p);
                }
            }
        } else {
            Matrix Vo = compose(Uo), Vb = compose(Ub);
            Matrix oo = Vo * density_ * Vo.adjoint();
            Matrix bb = Vb * density_ * Vb.adjoint();
            Matrix ob = Vo * density_ * Vb.adjoint();
            Matrix diag_plus = W.adjoint() * (oo + bb + ob + ob.adjoint()) * W * 0.25;
            Matrix diag_minus = W.adjoint() * (oo + bb - ob - ob.adjoint()) * W * 0.25;
            for (int s = 0; s < 2; ++s) {
                const Matrix& m = s == 0 ? diag_plus : diag_minus;
                for (const auto& group : O_.groups()) {
                    double p = 0.0;
                    for (Eigen::Index i : group) p += m(i, i).real();
                    probs.push_back(std::max(p, 0.0));
                }
            }
        }
        double total = 0.0;
        for (double p : probs) total += p;
        double u = rng.uniform() * total;
        std::size_t pick = probs.size() - 1;
        double acc = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) {
                pick = i;
                break;
            }
        }
        rec.outcome = pick < w.size() ? w[pick] : -w[pick - w.size()];
        return rec;
    }

   private:
    // The drawn layer unitaries, leftmost first.
    std::vector<const Matrix*> draw(Stream& rng, std::size_t& branch, std::vector<std::size_t>& entries,
                                    int& sign) const {
        const SamplingEnsemble& ens = *c_.ensemble;
        branch = detail::draw_index(rng.uniform(), branch_cdf_);
        std::vector<const Matrix*> us;
        for (std::size_t l : ens.branches[branch].layers) {
            std::size_t q = detail::draw_index(rng.uniform(), layer_cdf_[l]);
            entries.push_back(q);
            sign *= ens.layers[l].entries[q].sign;
            us.push_back(&c_.unitaries[l][q]);
        }
        return us;
    }

    static Vector apply(const std::vector<const Matrix*>& us, const Vector& psi) {
        Vector v = psi;
        for (auto it = us.rbegin(); it != us.rend(); ++it) {
            Vector next = **it * v;
            v = std::move(next);
        }
        return v;
    }

    static Matrix compose(const std::vector<const Matrix*>& us) {
        Matrix V = *us.front();
        for (std::size_t i = 1; i < us.size(); ++i) {
            Matrix next = V * *us[i];
            V = std::move(next);
        }
        return V;
    }

    const CompiledEnsemble& c_;
    const QuantumState& rho_;
    const Observable& O_;
    Matrix density_;
    std::vector<double> branch_cdf_;
    std::vector<std::vector<double>> layer_cdf_;
};

inline ShotRecord single_shot(const CompiledEnsemble& c, const QuantumState& rho, const Observable& O,
                              Stream& rng) {
    return ShotSampler(c, rho, O).shot(rng);
}

/// E[sign * o] by factorized averaging: tr(O Vbar rho Vbar^dagger) with Vbar the
/// ensemble mean, in units of the rescaled observable.
inline double expected_value(const CompiledEnsemble& c, const QuantumState& rho, const Observable& O) {
    return expectation(O, rho, mean_operator(c)) / O.scale();
}

/// Same quantity by explicit enumeration of every (branch, entry) combination
/// of both arms' mean. Used as an independent check; throws past the cap.
inline double enumerated_expected_value(const CompiledEnsemble& c, const QuantumState& rho,
                                        const Observable& O, std::size_t cap = kEnumerationCap) {
    const SamplingEnsemble& ens = *c.ensemble;
    const Eigen::Index d = O.dim();
    Matrix mean = Matrix::Zero(d, d);
    std::size_t visited = 0;
    for (const EnsembleBranch& br : ens.branches) {
        std::vector<std::size_t> idx(br.layers.size(), 0);
        for (;;) {
            if (++visited > cap) throw DimensionError("enumerated_expected_value: enumeration cap exceeded");
            double p = br.probability;
            Matrix prod = Matrix::Identity(d, d);
            for (std::size_t k = 0; k < br.layers.size(); ++k) {
                const EnsembleEntry& e = ens.layers[br.layers[k]].entries[idx[k]];
                p *= e.probability * e.sign;
                Matrix next = prod * c.unitaries[br.layers[k]][idx[k]];
                prod = std::move(next);
            }
            mean += p * prod;
            std::size_t k = 0;
            for (; k < idx.size(); ++k) {
                if (++idx[k] < ens.layers[br.layers[k]].entries.size()) break;
                idx[k] = 0;
            }
            if (k == idx.size()) break;
        }
    }
    return expectation(O, rho, mean) / O.scale();
}

struct EstimatorState {
    std::uint64_t N = 0;
    double sum = 0.0;  // sum of sign * outcome
    double Xi = 1.0;
    double scale = 1.0;  // observable rescaling factor

    double mean() const { return N ? sum / static_cast<double>(N) : 0.0; }
    double estimate() const { return Xi * Xi * scale * mean(); }
};

inline constexpr std::uint64_t kShotBlock = 4096;

/// Xi^2 / N sum_j sign_j o_j, times the observable scale. Shot j of run `run`
/// draws from Stream(seed, run, j); partial sums are taken over fixed-size
/// blocks and added in block order, so the result is independent of threading.
inline EstimatorState run_estimator(const CompiledEnsemble& c, const QuantumState& rho,
                                    const Observable& O, std::uint64_t N, std::uint64_t seed,
                                    std::uint64_t run = 0, unsigned threads = thread_count()) {
    if (N == 0) throw InvalidArgument("run_estimator: N must be positive");
    ShotSampler sampler(c, rho, O);
    const std::uint64_t blocks = (N + kShotBlock - 1) / kShotBlock;
    std::vector<double> partial(blocks, 0.0);
    parallel_for(
        blocks,
        [&](std::size_t blk) {
            double s = 0.0;
            std::uint64_t end = std::min<std::uint64_t>(N, (blk + 1) * kShotBlock);
            for (std::uint64_t j = blk * kShotBlock; j < end; ++j) {
                Stream rng(seed, run, j);
                ShotRecord r = sampler.shot(rng);
                s += r.sign * r.outcome;
            }
            partial[blk] = s;
        },
        threads);
    EstimatorState st;
    st.N = N;
    st.Xi = c.ensemble->resolution;
    st.scale = O.scale();
    for (double s : partial) st.sum += s;
    return st;
}

/// Fraction of `trials` runs, each with the Hoeffding shot count for (eps,
/// delta), whose mean(sign * o) lies within eps of the exact expectation.
inline double coverage_experiment(const CompiledEnsemble& c, const QuantumState& rho,
                                  const Observable& O, double eps, double delta, int trials,
                                  std::uint64_t seed) {
    if (trials < 1) throw InvalidArgument("coverage_experiment: trials must be positive");
    const std::uint64_t shots = hoeffding_shots(eps, delta).N;
    const double exact = expected_value(c, rho, O);
    std::vector<char> hit(static_cast<std::size_t>(trials), 0);
    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t k) {
        EstimatorState st = run_estimator(c, rho, O, shots, seed, k, 1);
        hit[k] = std::abs(st.mean() - exact) <= eps;
    });
    double count = 0.0;
    for (char h : hit) count += h;
    return count / trials;
}

}  // namespace randmpf
