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


// Estimates <Z_0> after evolving |0000000> under the 7-qubit anticommuting
// model, sampling a second-order matching formula with two blocks.

#include <cstdio>

#include "randmpf/bounds.hpp"
#include "randmpf/ensemble.hpp"
#include "randmpf/models.hpp"
#include "randmpf/optimizer.hpp"
#include "randmpf/sampling.hpp"

int main() {
    using namespace randmpf;
    HamiltonianSpec H = anticommuting();
    const double tau = 0.5;
    const double t = tau / lambda_norm(H);

    MPFSpec spec = build_mpf(MpfKind::Matching, 1, 2, default_initial_b(1, 2, MpfKind::Matching));
    SamplingEnsemble ens = mpf_ensemble(spec, H.L());
    CompiledEnsemble compiled = compile(ens, H, t);

    Observable O(pauli_string("ZIIIIII"));
    QuantumState psi = QuantumState::basis(H.dim(), 0);
    ShotPlan plan = resolution_shots(ens.resolution, 0.1, 0.05);

    EstimatorState st = run_estimator(compiled, psi, O, plan.N, 7);
    double exact = expectation(O, psi, exact_evolution(H, t));
    std::printf("Xi        %.6f\n", ens.resolution);
    std::printf("shots     %llu\n", static_cast<unsigned long long>(plan.N));
    std::printf("estimate  %.6f\n", st.estimate());
    std::printf("exact     %.6f\n", exact);
    std::printf("|error|   %.2e (allowed %.2e)\n", std::abs(st.estimate() - exact), (1 + ens.resolution) * 0.1);
    return 0;
}
