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


#include <gtest/gtest.h>

#include <cmath>

#include "randmpf/models.hpp"
#include "randmpf/optimizer.hpp"
#include "randmpf/sampling.hpp"
#include "test_util.hpp"

using namespace randmpf;
using randmpf::testing::max_abs;

namespace {

std::vector<MPFSpec> small_specs() {
    return {cw_coefficients(1, 1), cw_coefficients(1, 2),
            build_mpf(MpfKind::Matching, 1, 2, default_initial_b(1, 2, MpfKind::Matching)),
            build_mpf(MpfKind::ClosedForm, 1, 2, default_initial_b(1, 2, MpfKind::ClosedForm))};
}

Matrix mixed_density() {
    Vector a = Vector::Zero(4), b = Vector::Zero(4);
    a << 0.6, cplx(0, 0.8), 0, 0;
    b << 0, 0.5, 0.5, cplx(0.5, 0.5);
    return 0.7 * a * a.adjoint() + 0.3 * b * b.adjoint();
}

// One unit-probability entry running S2.
SamplingEnsemble single_unitary(std::size_t L) {
    SamplingEnsemble ens;
    ens.L = L;
    ens.layers.push_back({{{1.0, 1, s2_schedule(L), 1.0}}});
    ens.branches.push_back({1.0, {0}});
    return ens;
}

}  // namespace

TEST(HadamardTest, ListedValues) {
    Matrix I = Matrix::Identity(2, 2), Z = pauli_string("Z");
    QuantumState zero = QuantumState::basis(2, 0);
    Observable O(Z);
    EXPECT_NEAR(hadamard_test_expectation(I, Z, zero, O), 1.0, 1e-15);
    EXPECT_NEAR(hadamard_test_expectation(I, -I, zero, O), -expectation(O, zero, I), 1e-15);
    Matrix V = HermitianTerm(pauli_string("X") + 0.3 * Z).expm(0.8);
    EXPECT_NEAR(hadamard_test_expectation(V, V, zero, O), expectation(O, zero, V), 1e-15);
    QuantumState mixed = QuantumState::mixed(0.25 * I + 0.5 * zero.density());
    EXPECT_NEAR(hadamard_test_expectation(V, V, mixed, O), expectation(O, mixed, V), 1e-15);
}

TEST(Ensemble, ChildsWiebeEntries) {
    SamplingEnsemble ens = mpf_ensemble(cw_coefficients(1, 1), 2);
    ASSERT_EQ(ens.layers.size(), 1u);
    const auto& e = ens.layers[0].entries;
    ASSERT_EQ(e.size(), 2u);
    EXPECT_NEAR(e[0].probability, 0.2, 1e-15);
    EXPECT_EQ(e[0].sign, -1);
    EXPECT_NEAR(e[1].probability, 0.8, 1e-15);
    EXPECT_EQ(e[1].sign, 1);
    EXPECT_EQ(e[1].schedule.size(), 2 * merge_adjacent(s2_schedule(2)).size() - 1);
    EXPECT_NEAR(ens.resolution, 5.0 / 3, 1e-15);
}

TEST(Ensemble, DistributionsAreNormalized) {
    for (const MPFSpec& spec : small_specs()) {
        SamplingEnsemble ens = mpf_ensemble(spec, 3);
        double b = 0.0;
        for (const auto& br : ens.branches) b += br.probability;
        EXPECT_NEAR(b, 1.0, 1e-12);
        for (const auto& layer : ens.layers) {
            double s = 0.0;
            for (const auto& e : layer.entries) {
                EXPECT_GE(e.probability, 0.0);
                s += e.probability;
            }
            EXPECT_NEAR(s, 1.0, 1e-12);
        }
    }
}

TEST(Ensemble, MeanTimesXiIsTheFormula) {
    HamiltonianSpec H = anticommuting(2);
    for (const MPFSpec& spec : small_specs()) {
        SamplingEnsemble ens = mpf_ensemble(spec, H.L());
        CompiledEnsemble c = compile(ens, H, 0.3);
        EXPECT_LT(max_abs(spec.resolution * mean_operator(c) - mpf_matrix(spec, H, 0.3)), 1e-11);
    }
}

TEST(Ensemble, ExactMixtureIdentity) {
    HamiltonianSpec H = anticommuting(2);
    Observable O(pauli_string("ZX"));
    std::vector<QuantumState> states{QuantumState::basis(4, 2), QuantumState::mixed(mixed_density())};
    for (const MPFSpec& spec : small_specs()) {
        SamplingEnsemble ens = mpf_ensemble(spec, H.L());
        CompiledEnsemble c = compile(ens, H, 0.45);
        Matrix M = mpf_matrix(spec, H, 0.45);
        for (const QuantumState& rho : states) {
            Matrix r = rho.density();
            double direct = (O.matrix() * M * r * M.adjoint()).trace().real();
            double xi2 = spec.resolution * spec.resolution;
            EXPECT_NEAR(xi2 * expected_value(c, rho, O), direct, 1e-10);
            EXPECT_NEAR(xi2 * enumerated_expected_value(c, rho, O), direct, 1e-10);
            Observable negO(-pauli_string("ZX"));
            EXPECT_NEAR(expected_value(c, rho, negO), -expected_value(c, rho, O), 1e-14);
        }
    }
}

TEST(Ensemble, EnumerationCap) {
    HamiltonianSpec H = anticommuting(2);
    MPFSpec spec = build_mpf(MpfKind::Matching, 1, 2, default_initial_b(1, 2, MpfKind::Matching));
    SamplingEnsemble ens = mpf_ensemble(spec, H.L());
    CompiledEnsemble c = compile(ens, H, 0.1);
    EXPECT_THROW(enumerated_expected_value(c, QuantumState::basis(4, 0), Observable(pauli_string("ZZ")), 3),
                 DimensionError);
}

TEST(Shots, OutcomesLieInTheSignedSpectrum) {
    HamiltonianSpec H = anticommuting(2);
    SamplingEnsemble ens = mpf_ensemble(cw_coefficients(1, 2), H.L());
    CompiledEnsemble c = compile(ens, H, 0.5);
    Matrix o = 0.5 * pauli_string("ZI") + 0.25 * pauli_string("XX");
    Observable O(o);
    QuantumState rho = QuantumState::basis(4, 1);
    ShotSampler sampler(c, rho, O);
    for (std::uint64_t j = 0; j < 2000; ++j) {
        Stream rng(9, 0, j);
        ShotRecord r = sampler.shot(rng);
        bool found = false;
        for (double w : O.values()) found = found || std::abs(std::abs(r.outcome) - std::abs(w)) < 1e-12;
        EXPECT_TRUE(found) << r.outcome;
        EXPECT_TRUE(r.sign == 1 || r.sign == -1);
    }
}

TEST(Shots, EmpiricalMeanMatchesMixture) {
    HamiltonianSpec H = anticommuting(2);
    Observable O(pauli_string("ZI"));
    std::vector<QuantumState> states{QuantumState::basis(4, 0), QuantumState::mixed(mixed_density())};
    for (const MPFSpec& spec : small_specs()) {
        SamplingEnsemble ens = mpf_ensemble(spec, H.L());
        CompiledEnsemble c = compile(ens, H, 0.6);
        for (const QuantumState& rho : states) {
            const std::uint64_t N = 100000;
            EstimatorState st = run_estimator(c, rho, O, N, 11);
            // sign * o is +-1 for this observable
            double mean = st.mean();
            double sigma = std::sqrt((1 - mean * mean) / N);
            EXPECT_NEAR(mean, expected_value(c, rho, O), 3 * sigma + 1e-12) << kind_name(spec.kind());
        }
    }
}

TEST(Shots, DeterministicForInvariantEigenstate) {
    // diagonal H leaves the basis state invariant; O = ZZ has it as eigenstate
    HamiltonianSpec H({HermitianTerm(pauli_string("ZI")), HermitianTerm(0.5 * pauli_string("IZ"))});
    SamplingEnsemble ens = single_unitary(H.L());
    CompiledEnsemble c = compile(ens, H, 0.7);
    Observable O(pauli_string("ZZ"));
    QuantumState rho = QuantumState::basis(4, 1);
    ShotSampler sampler(c, rho, O);
    for (std::uint64_t j = 0; j < 100; ++j) {
        Stream rng(1, 0, j);
        EXPECT_EQ(sampler.shot(rng).outcome, -1.0);
    }
    EXPECT_EQ(coverage_experiment(c, rho, O, 0.2, 0.1, 50, 3), 1.0);
}

TEST(Estimator, SeededAndThreadIndependent) {
    HamiltonianSpec H = anticommuting(2);
    SamplingEnsemble ens = mpf_ensemble(cw_coefficients(1, 1), H.L());
    CompiledEnsemble c = compile(ens, H, 0.5);
    Observable O(pauli_string("ZI"));
    QuantumState rho = QuantumState::basis(4, 0);
    EstimatorState a = run_estimator(c, rho, O, 10000, 5, 0, 1);
    EstimatorState b = run_estimator(c, rho, O, 10000, 5, 0, 3);
    EstimatorState d = run_estimator(c, rho, O, 10000, 6, 0, 1);
    EXPECT_EQ(a.sum, b.sum);
    EXPECT_NE(a.sum, d.sum);
    EXPECT_DOUBLE_EQ(a.estimate(), a.Xi * a.Xi * a.mean());
    EXPECT_THROW(run_estimator(c, rho, O, 0, 5), InvalidArgument);
}

TEST(Estimator, UnitVarianceObservable) {
    HamiltonianSpec H = anticommuting(2);
    SamplingEnsemble ens = mpf_ensemble(cw_coefficients(1, 1), H.L());
    CompiledEnsemble c = compile(ens, H, 0.5);
    Observable O(pauli_string("XZ"));
    QuantumState rho = QuantumState::basis(4, 3);
    ShotSampler sampler(c, rho, O);
    double s = 0, s2 = 0;
    const int N = 20000;
    for (int j = 0; j < N; ++j) {
        Stream rng(2, 0, static_cast<std::uint64_t>(j));
        ShotRecord r = sampler.shot(rng);
        double x = r.sign * r.outcome;
        s += x;
        s2 += x * x;
    }
    double mean = s / N, var = s2 / N - mean * mean;
    EXPECT_DOUBLE_EQ(s2, N);
    double expect = 1 - std::pow(expected_value(c, rho, O), 2);
    EXPECT_NEAR(var, expect, 4 * std::sqrt(4.0 / N));
}

TEST(Estimator, HoeffdingCoverage) {
    HamiltonianSpec H = anticommuting(2);
    SamplingEnsemble ens = mpf_ensemble(cw_coefficients(1, 1), H.L());
    CompiledEnsemble c = compile(ens, H, 0.8);
    Observable O(pauli_string("ZI"));
    double cov = coverage_experiment(c, QuantumState::basis(4, 0), O, 0.2, 0.1, 200, 13);
    EXPECT_GE(cov, 0.9 - 3 * std::sqrt(0.09 / 200));
}

TEST(Estimator, MoreShotsReduceError) {
    HamiltonianSpec H = anticommuting(2);
    SamplingEnsemble ens = mpf_ensemble(cw_coefficients(1, 2), H.L());
    CompiledEnsemble c = compile(ens, H, 0.8);
    Observable O(pauli_string("ZI"));
    QuantumState rho = QuantumState::basis(4, 0);
    const double exact = expected_value(c, rho, O);
    double err1 = 0, err2 = 0;
    for (std::uint64_t run = 0; run < 200; ++run) {
        err1 += std::abs(run_estimator(c, rho, O, 200, 21, run, 1).mean() - exact);
        err2 += std::abs(run_estimator(c, rho, O, 400, 22, run, 1).mean() - exact);
    }
    EXPECT_LT(err2, err1);
}

TEST(Estimator, RescaledObservable) {
    HamiltonianSpec H = anticommuting(2);
    SamplingEnsemble ens = mpf_ensemble(cw_coefficients(1, 1), H.L());
    CompiledEnsemble c = compile(ens, H, 0.3);
    Observable O(3.0 * pauli_string("ZI"));
    QuantumState rho = QuantumState::basis(4, 0);
    EstimatorState st = run_estimator(c, rho, O, 50000, 4);
    Matrix M = mpf_matrix(cw_coefficients(1, 1), H, 0.3);
    double target = expectation(O, rho, M);
    EXPECT_NEAR(st.estimate(), target, 3 * 3.0 * ens.resolution * ens.resolution / std::sqrt(50000.0));
}

TEST(Ensemble, S2HatMeanIsAverageOfOrders) {
    HamiltonianSpec H = anticommuting(2);
    SamplingEnsemble ens = s2_hat_ensemble(H.L());
    CompiledEnsemble c = compile(ens, H, 0.2);
    ExponentSchedule fwd = s1_schedule(H.L());
    ExponentSchedule rev{{fwd.steps.rbegin(), fwd.steps.rend()}, H.L(), 0};
    Matrix expect = 0.5 * (schedule_matrix(fwd, H, 0.2) + schedule_matrix(rev, H, 0.2));
    EXPECT_LT(max_abs(mean_operator(c) - expect), 1e-14);
    // second order: error against e^{-iHt} scales as t^3
    double d1 = spectral_distance(mean_operator(compile(ens, H, 0.02)), exact_evolution(H, 0.02));
    double d2 = spectral_distance(mean_operator(compile(ens, H, 0.01)), exact_evolution(H, 0.01));
    EXPECT_NEAR(std::log2(d1 / d2), 3.0, 0.1);
}

TEST(Ensemble, CompiledCopyOutlivesSource) {
    HamiltonianSpec H = anticommuting(2);
    MPFSpec spec = cw_coefficients(1, 1);
    CompiledEnsemble c = compile(mpf_ensemble(spec, H.L()), H, 0.3);
    Matrix M = mpf_matrix(spec, H, 0.3);
    QuantumState rho = QuantumState::basis(4, 1);
    Observable O(pauli_string("XZ"));
    double direct = (O.matrix() * M * rho.density() * M.adjoint()).trace().real();
    EXPECT_NEAR(spec.resolution * spec.resolution * expected_value(c, rho, O), direct, 1e-10);
}
