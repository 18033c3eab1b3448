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

#include <boost/multiprecision/cpp_int.hpp>

#include <random>

#include "randmpf/models.hpp"
#include "randmpf/mpf.hpp"
#include "randmpf/optimizer.hpp"
#include "test_util.hpp"

using namespace randmpf;
using randmpf::testing::max_abs;
using Q = boost::multiprecision::cpp_rational;

namespace {

// Exact solve of the Childs-Wiebe system with ell_q = q over the rationals.
std::vector<Q> cw_exact(int chi, int K) {
    const int n = K + 1;
    std::vector<std::vector<Q>> A(n, std::vector<Q>(n + 1, Q(0)));
    for (int q = 0; q < n; ++q) {
        A[0][q] = 1;
        for (int row = 1; row < n; ++row) {
            long long p = 1;
            for (int e = 0; e < 2 * chi + 2 * (row - 1); ++e) p *= (q + 1);
            A[row][q] = Q(1) / p;
        }
    }
    A[0][n] = 1;
    for (int c = 0; c < n; ++c) {
        int p = c;
        while (A[p][c] == 0) ++p;
        std::swap(A[c], A[p]);
        for (int r = 0; r < n; ++r) {
            if (r == c || A[r][c] == 0) continue;
            Q f = A[r][c] / A[c][c];
            for (int k = c; k <= n; ++k) A[r][k] -= f * A[c][k];
        }
    }
    std::vector<Q> x(n);
    for (int i = 0; i < n; ++i) x[i] = A[i][n] / A[i][i];
    return x;
}

double to_double(const Q& q) { return static_cast<double>(q); }

double inv_factorial(int k) { return 1.0 / std::tgamma(k + 1.0); }

std::vector<std::vector<double>> random_b(int chi, int R, int blocks, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<std::vector<double>> out(static_cast<std::size_t>(blocks));
    for (auto& b : out) {
        for (int i = 0; i < 2 * chi * R + 1; ++i) b.push_back(u(gen));
    }
    return out;
}

}  // namespace

TEST(ChildsWiebe, MatchesRationalSolve) {
    for (auto [chi, K] : {std::pair{1, 1}, {1, 2}, {2, 2}, {1, 3}}) {
        std::vector<Q> exact = cw_exact(chi, K);
        MPFSpec spec = cw_coefficients(chi, K);
        const auto& C = std::get<ChildsWiebe>(spec.data).C;
        double xi = 0.0;
        for (std::size_t q = 0; q < exact.size(); ++q) {
            EXPECT_NEAR(C[q], to_double(exact[q]), 1e-14 * std::max(1.0, std::abs(to_double(exact[q]))));
            xi += std::abs(to_double(exact[q]));
        }
        EXPECT_NEAR(spec.resolution, xi, 1e-13);
    }
    EXPECT_EQ(cw_exact(1, 2)[0], Q(1) / 24);
    EXPECT_EQ(cw_exact(1, 2)[1], Q(-16) / 15);
    EXPECT_EQ(cw_exact(1, 2)[2], Q(81) / 40);
}

TEST(ChildsWiebe, ListedValues) {
    MPFSpec a = cw_coefficients(1, 1);
    EXPECT_NEAR(std::get<ChildsWiebe>(a.data).C[0], -1.0 / 3, 1e-15);
    EXPECT_NEAR(a.resolution, 5.0 / 3, 1e-15);
    EXPECT_NEAR(cw_coefficients(1, 2).resolution, 47.0 / 15, 1e-14);
    MPFSpec c = cw_coefficients(2, 2);
    const auto& C = std::get<ChildsWiebe>(c.data).C;
    // exact values are 1/336, -32/105 and 729/560
    EXPECT_NEAR(C[0], 0.002976, 2e-6);
    EXPECT_NEAR(C[1], -0.304763, 2e-6);
    EXPECT_NEAR(C[2], 1.301784, 2e-6);
    EXPECT_NEAR(C[1], -32.0 / 105, 1e-15);
    EXPECT_NEAR(C[2], 729.0 / 560, 1e-15);
    EXPECT_NEAR(c.resolution, 1.6095, 5e-5);
    EXPECT_THROW(cw_coefficients(1, 1, {2, 2}), InvalidArgument);
    EXPECT_THROW(cw_coefficients(0, 1), InvalidArgument);
}

TEST(ClosedFormNu, ListedValues) {
    auto n2 = closedform_nu(1, 2, 2);
    EXPECT_NEAR(n2[1], 1.0 / 3, 1e-15);
    EXPECT_NEAR(n2[2], 1.0 / 6, 1e-15);
    EXPECT_EQ(n2[0], 0.0);
    EXPECT_EQ(n2[3], 0.0);
    EXPECT_NEAR(closedform_nu(2, 2, 2)[4], 1.0 / 70, 1e-16);
    for (int chi = 1; chi <= 3; ++chi) {
        auto n0 = closedform_nu(chi, 2, 0);
        for (std::size_t k = 0; k < n0.size(); ++k) EXPECT_EQ(n0[k], k == static_cast<std::size_t>(2 * chi) ? 1.0 : 0.0);
    }
    auto n1 = closedform_nu(2, 3, 1);
    for (std::size_t k = 0; k < n1.size(); ++k) EXPECT_EQ(n1[k], k <= 4 ? 1.0 : 0.0);
    EXPECT_THROW(closedform_nu(1, 2, 3), InvalidArgument);
}

TEST(MatchingNu, RIsOneIsTheTruncatedExponentialUnit) {
    for (int chi = 1; chi <= 3; ++chi) {
        auto nus = matching_nu(chi, 1);
        ASSERT_EQ(nus.size(), 1u);
        for (std::size_t k = 0; k < nus[0].size(); ++k) EXPECT_NEAR(nus[0][k], 1.0, 1e-14);
    }
}

TEST(MatchingNu, ProductOfBlockSeriesIsExponential) {
    // sum_k nu_k x^k / k! per block; the product must equal e^x through x^{2 chi R}
    for (auto [chi, R] : {std::pair{1, 2}, {1, 3}, {2, 2}, {2, 3}, {1, 4}}) {
        auto nus = matching_nu(chi, R);
        const int n = 2 * chi * R;
        std::vector<double> prod(n + 1, 0.0);
        prod[0] = 1.0;
        for (const auto& nu : nus) {
            EXPECT_EQ(nu[0], 1.0);
            for (std::size_t k = 2 * chi + 1; k < nu.size(); ++k) EXPECT_EQ(nu[k], 0.0);
            std::vector<double> next(n + 1, 0.0);
            for (int a = 0; a <= n; ++a) {
                for (int b = 0; a + b <= n; ++b) next[a + b] += prod[a] * nu[b] * inv_factorial(b);
            }
            prod = next;
        }
        for (int k = 0; k <= n; ++k) EXPECT_NEAR(prod[k] * std::tgamma(k + 1.0), 1.0, 1e-10) << chi << R << k;
        EXPECT_LE(composition_defect(nus, chi), 1e-10);
    }
    auto two = matching_nu(1, 2);
    EXPECT_NEAR(two[0][1] + two[1][1], 1.0, 1e-12);
}

TEST(ScalarSeries, NewFormulasReproduceExponential) {
    std::uint64_t seed = 3;
    for (auto [chi, R] : {std::pair{1, 2}, {1, 3}, {2, 2}, {2, 3}}) {
        for (MpfKind kind : {MpfKind::Matching, MpfKind::ClosedForm}) {
            const int blocks = kind == MpfKind::Matching ? R : R + 1;
            std::vector<std::vector<MPFSpec>> specs;
            std::vector<std::vector<std::vector<double>>> b_sets{default_initial_b(chi, R, kind),
                                                                 random_b(chi, R, blocks, seed++)};
            for (const auto& b : b_sets) {
                MPFSpec spec = build_mpf(kind, chi, R, b);
                auto c = scalar_series(spec, 2 * chi * R + 2);
                for (int k = 0; k <= 2 * chi * R; ++k) {
                    EXPECT_NEAR(c[k], inv_factorial(k), 1e-9) << kind_name(kind) << chi << R << k;
                }
                EXPECT_GE(spec.resolution, 1.0 - 1e-12);
            }
        }
    }
}

TEST(ScalarSeries, ChildsWiebeLowOrders) {
    auto c = scalar_series(cw_coefficients(1, 1), 6);
    for (int k = 0; k <= 4; ++k) EXPECT_NEAR(c[k], inv_factorial(k), 1e-15);
    // -1/3 e^x + 4/3 e^x is e^x at every order
    for (int k = 5; k <= 6; ++k) EXPECT_NEAR(c[k], inv_factorial(k), 1e-15);
}

TEST(ScalarSeries, BlockWithUnitNuIsConstant) {
    LBlock block = make_block(1, 1, {1.0, -1.0, 2.0}, {1.0, 0.0, 0.0});
    Formula f = block_formula(block);
    auto c = formula_series(f, 2);
    EXPECT_NEAR(c[0], 1.0, 1e-15);
    EXPECT_NEAR(c[1], 0.0, 1e-15);
    EXPECT_NEAR(c[2], 0.0, 1e-15);
}

TEST(Blocks, Invariants) {
    auto nus = matching_nu(2, 2);
    LBlock blk = make_block(2, 2, default_initial_b(2, 2, MpfKind::Matching)[0], nus[0]);
    double s = 0.0;
    for (double c : blk.C) s += c;
    EXPECT_NEAR(s, 1.0, 1e-10);
    EXPECT_THROW(make_block(1, 2, {1.0, 2.0}, {1.0, 0.0}), DimensionError);
    EXPECT_THROW(build_matching(1, 2, {{1, -1, 2, -2, 3}}), DimensionError);
    EXPECT_THROW(build_closedform(1, 2, default_initial_b(1, 2, MpfKind::Matching)), DimensionError);
}

TEST(Resolution, ClosedFormFormula) {
    EXPECT_DOUBLE_EQ(closedform_resolution(2.0, {1.0, 3.0, 5.0}), 1.0 + 2.0 * 3.0 + 4.0 * 5.0);
    MPFSpec cf = build_mpf(MpfKind::ClosedForm, 1, 2, default_initial_b(1, 2, MpfKind::ClosedForm));
    const auto& d = std::get<ClosedForm>(cf.data);
    EXPECT_NEAR(cf.resolution, d.blocks[0].one_norm + d.block0.one_norm * d.blocks[1].one_norm, 1e-14);
    MPFSpec m = build_mpf(MpfKind::Matching, 1, 2, default_initial_b(1, 2, MpfKind::Matching));
    const auto& mb = std::get<Matching>(m.data).blocks;
    EXPECT_NEAR(m.resolution, mb[0].one_norm * mb[1].one_norm, 1e-14);
}

TEST(MpfMatrix, IdentityAtTimeZero) {
    HamiltonianSpec H = anticommuting(2);
    Matrix I = Matrix::Identity(H.dim(), H.dim());
    std::vector<MPFSpec> specs{cw_coefficients(1, 2),
                               build_mpf(MpfKind::Matching, 1, 2, default_initial_b(1, 2, MpfKind::Matching)),
                               build_mpf(MpfKind::ClosedForm, 1, 2, default_initial_b(1, 2, MpfKind::ClosedForm))};
    for (const MPFSpec& s : specs) EXPECT_LT(max_abs(mpf_matrix(s, H, 0.0) - I), 1e-12);
}

TEST(MpfMatrix, ChildsWiebeByHand) {
    HamiltonianSpec H = anticommuting(2);
    const double t = 0.3;
    ExponentSchedule s2 = s2_schedule(H.L());
    Matrix half = schedule_matrix(s2, H, t / 2);
    Matrix expected = -1.0 / 3 * schedule_matrix(s2, H, t) + 4.0 / 3 * half * half;
    EXPECT_LT(max_abs(mpf_matrix(cw_coefficients(1, 1), H, t) - expected), 1e-14);
}

TEST(MpfMatrix, SingleTermHamiltonianMatchesScalarSeries) {
    // one term: S(bt) = e^{-i b h t} exactly, so the MPF is a scalar function of each eigenvalue
    HamiltonianSpec H({HermitianTerm(0.7 * pauli_string("Z"))});
    const double t = 0.4;
    for (MpfKind kind : {MpfKind::Matching, MpfKind::ClosedForm}) {
        MPFSpec spec = build_mpf(kind, 1, 2, random_b(1, 2, kind == MpfKind::Matching ? 2 : 3, 99));
        auto c = scalar_series(spec, 40);
        Matrix M = mpf_matrix(spec, H, t);
        for (double lam : {0.7, -0.7}) {
            cplx x(0, -lam * t), acc = 0, p = 1;
            for (double ck : c) {
                acc += ck * p;
                p *= x;
            }
            Eigen::Index i = lam > 0 ? 0 : 1;
            EXPECT_LT(std::abs(M(i, i) - acc), 1e-12);
        }
    }
}

TEST(MpfMatrix, DepthAndOrder) {
    EXPECT_EQ(cw_coefficients(1, 2).order(), 7);
    EXPECT_EQ(cw_coefficients(1, 2).depth_blocks(), 3);
    MPFSpec m = build_mpf(MpfKind::Matching, 2, 3, default_initial_b(2, 3, MpfKind::Matching));
    EXPECT_EQ(m.order(), 13);
    EXPECT_EQ(block_depth(approximation(m).root), 3);
    MPFSpec cf = build_mpf(MpfKind::ClosedForm, 2, 3, default_initial_b(2, 3, MpfKind::ClosedForm));
    EXPECT_EQ(block_depth(approximation(cf).root), 3);
}

TEST(MatchingNu, RootPairingFallback) {
    // Newton from the default start stalls here; the restart from the grouped
    // roots of the truncated exponential has to succeed.
    for (auto [chi, R] : {std::pair{1, 4}, {1, 5}, {2, 4}, {3, 3}}) {
        auto nus = matching_nu(chi, R);
        EXPECT_LE(composition_defect(nus, chi), 1e-10) << chi << R;
    }
}
