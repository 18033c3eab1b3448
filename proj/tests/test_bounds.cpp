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

#include <random>

#include "randmpf/bounds.hpp"
#include "randmpf/models.hpp"
#include "randmpf/optimizer.hpp"
#include "test_util.hpp"

using namespace randmpf;

namespace {

// Nested sum over every index tuple of every product, weight times the node sum.
double brute_zeta(const MPFSpec& spec) {
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
    double total = 0.0;
    for (const auto& f : products) {
        std::vector<std::size_t> idx(f.size(), 0);
        for (;;) {
            double w = 1.0, s = 0.0;
            for (std::size_t k = 0; k < f.size(); ++k) {
                w *= std::abs(f[k]->C[idx[k]]);
                s += std::abs(f[k]->b[idx[k]]);
            }
            total += w * s;
            std::size_t k = 0;
            for (; k < idx.size(); ++k) {
                if (++idx[k] < f[k]->b.size()) break;
                idx[k] = 0;
            }
            if (k == idx.size()) break;
        }
    }
    return total;
}

std::vector<std::vector<double>> random_b(int chi, int R, int blocks, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(-2.5, 2.5);
    std::vector<std::vector<double>> out(static_cast<std::size_t>(blocks));
    for (auto& b : out) {
        for (int i = 0; i < 2 * chi * R + 1; ++i) b.push_back(u(gen));
    }
    return out;
}

}  // namespace

TEST(Bounds, GrowthFactor) {
    EXPECT_DOUBLE_EQ(g_factor(1), 0.8);
    EXPECT_NEAR(g_factor(2), 8.0 / 3, 1e-15);
    EXPECT_NEAR(g_factor(3), 20.0 / 3, 1e-14);
    EXPECT_THROW(g_factor(0), InvalidArgument);
}

TEST(Bounds, ListedValues) {
    EXPECT_EQ(ts_bound(1, 1, 1.0, 0.0), 0.0);
    EXPECT_NEAR(ts_bound(1, 1, 1.0, 1.0), 2 * std::pow(0.8, 3) / 6, 1e-16);
    EXPECT_NEAR(ts_bound(1, 1, 1.0, 1.0), 0.170667, 5e-7);
    EXPECT_NEAR(ts_bound(2, 1, 1.0, 0.3) / ts_bound(2, 2, 1.0, 0.3), std::pow(2.0, 5), 1e-10);
    EXPECT_NEAR(ts_bound(2, 3, 1.0, 1.0), 2 * std::pow(8.0 / 9, 5) / 120, 1e-17);
    EXPECT_NEAR(ts_bound(2, 3, 1.0, 1.0), 9.29e-3, 5e-5);

    double cw = cw_bound(1, 1, 5.0 / 3, 1.0, 0.1);
    EXPECT_NEAR(cw, (1 + std::pow(0.8, 5) * 5.0 / 3) * 1e-5 / 120, 1e-20);
    EXPECT_NEAR(cw, 1.288e-7, 5e-10);
    EXPECT_EQ(cw_bound(1, 1, 5.0 / 3, 1.0, 0.0), 0.0);

    double nb = new_bound(1, 2, 2.0, 1.0, 0.5);
    EXPECT_NEAR(nb, (1 + 2 * std::pow(0.8, 5)) * std::pow(0.5, 5) / 120, 1e-18);
    EXPECT_NEAR(nb, 4.31e-4, 5e-7);
    EXPECT_NEAR(new_bound(1, 2, 0.0, 1.0, 0.5), std::pow(0.5, 5) / 120, 1e-18);
    EXPECT_THROW(new_bound(1, 2, 1.0, 1.0, -0.1), InvalidArgument);
}

TEST(Bounds, MonotoneInTimeAndLambda) {
    MPFSpec spec = build_mpf(MpfKind::Matching, 1, 2, default_initial_b(1, 2, MpfKind::Matching));
    double prev = 0.0;
    for (double t = 0.01; t < 10; t *= 1.7) {
        double b = mpf_bound(spec, 1.0, t);
        EXPECT_GE(b, prev);
        EXPECT_GE(mpf_bound(spec, 2.0, t), b);
        EXPECT_GE(cw_bound(2, 2, 1.6, 1.0, t * 1.7), cw_bound(2, 2, 1.6, 1.0, t));
        EXPECT_GE(ts_bound(2, 3, 1.0, t * 1.7), ts_bound(2, 3, 1.0, t));
        prev = b;
    }
}

TEST(Zeta, HandExamples) {
    MPFSpec two;
    two.chi = 1;
    two.R = 2;
    LBlock half{1, 2, {1.0, -1.0}, {1.0, 0.0}, {0.5, 0.5}, 1.0, 1.0};
    two.data = Matching{{half, half}};
    EXPECT_DOUBLE_EQ(zeta_matching(two), 2.0);
    EXPECT_DOUBLE_EQ(brute_zeta(two), 2.0);

    MPFSpec one;
    one.R = 1;
    one.data = Matching{{LBlock{1, 1, {1.0}, {1.0}, {1.0}, 1.0, 1.0}}};
    EXPECT_DOUBLE_EQ(zeta(one), 1.0);
}

TEST(Zeta, RegroupedEqualsBruteForce) {
    std::uint64_t seed = 1;
    for (auto [chi, R] : {std::pair{1, 2}, {1, 3}, {2, 2}}) {
        for (MpfKind kind : {MpfKind::Matching, MpfKind::ClosedForm}) {
            for (int trial = 0; trial < 3; ++trial) {
                const int blocks = kind == MpfKind::Matching ? R : R + 1;
                MPFSpec spec = build_mpf(kind, chi, R, random_b(chi, R, blocks, seed++));
                double z = zeta(spec);
                EXPECT_NEAR(z, brute_zeta(spec), 1e-12 * z) << kind_name(kind) << chi << R;
                EXPECT_NEAR(full_power_zeta(spec, 1), z, 1e-12 * z);
            }
        }
    }
}

TEST(Zeta, FullPowerDominatesAtLargeNodes) {
    // nodes above 1 in magnitude make (sum |b|)^p exceed sum |b|
    MPFSpec spec = build_mpf(MpfKind::Matching, 1, 2, default_initial_b(1, 2, MpfKind::Matching));
    EXPECT_GT(full_power_zeta(spec, 5), zeta(spec));
    EXPECT_GE(full_power_bound(spec, 1.0, 0.5), mpf_bound(spec, 1.0, 0.5));
    EXPECT_THROW(full_power_zeta(cw_coefficients(1, 1), 1), InvalidArgument);
}

TEST(ShotPlans, ListedValues) {
    EXPECT_EQ(hoeffding_shots(0.1, 0.05).N, 738u);
    EXPECT_EQ(resolution_shots(2.0, 0.1, 0.05).N, 11805u);
    EXPECT_EQ(resolution_shots(1.36, 0.1, 0.05).N, 5459u);
    EXPECT_EQ(resolution_shots(5.0 / 3, 0.1, 0.05).N, 8198u);  // 8 ln40 (50/3)^2 = 8197.51
    EXPECT_THROW(hoeffding_shots(1.0, 0.05), InvalidArgument);
    EXPECT_THROW(resolution_shots(0.9, 0.1, 0.05), InvalidArgument);
    // halving epsilon quadruples the count before rounding
    EXPECT_NEAR(static_cast<double>(hoeffding_shots(0.05, 0.05).N), 4 * 2 * std::log(40.0) / 0.01, 1.0);
    // Xi = 1 is four times the Hoeffding count before rounding
    EXPECT_NEAR(static_cast<double>(resolution_shots(1.0, 0.1, 0.05).N), 4 * 200 * std::log(40.0), 1.0);
}

TEST(OracleCalls, ListedValues) {
    EXPECT_EQ(ts_oracle_calls(1, 1, 1.0, 1.0), 50u);
    double expect = 2 * 2 * 625 * std::pow(2.0, 1.25) * std::pow(100.0, 0.25);
    EXPECT_EQ(ts_oracle_calls(2, 2, 1.0, 0.01), static_cast<std::uint64_t>(std::ceil(expect)));
    EXPECT_GT(ts_oracle_calls(1, 3, 1.0, 0.01), ts_oracle_calls(1, 3, 1.0, 0.1));
}

TEST(Reports, DepthParityAtThirtyCalls) {
    // 2 chi = 4, r = R = K + 1 = 3: three S_4 blocks of 10 exponentials each
    MPFSpec m = build_mpf(MpfKind::Matching, 2, 3, default_initial_b(2, 3, MpfKind::Matching));
    EXPECT_EQ(ts_report(2, 3, 1.0, 0.1, 8).depth_blocks, 30u);
    EXPECT_EQ(mpf_report(m, 1.0, 0.1, 8).depth_blocks, 30u);
    EXPECT_EQ(mpf_report(cw_coefficients(2, 2), 1.0, 0.1, 8).depth_blocks, 30u);
    EXPECT_EQ(ts_report(1, 1, 1.0, 0.1, 4).depth_merged, merged_oracle_count(1, 4));
}

TEST(Closeness, ScaledCopyAndPerturbation) {
    HamiltonianSpec H = anticommuting(2);
    Matrix U = exact_evolution(H, 0.4);
    Observable O(pauli_string("ZI"));
    QuantumState rho = QuantumState::basis(4, 1);
    ClosenessCheck exact = lemma_closeness_check(U, U / 1.5, 1.5, O, rho);
    EXPECT_NEAR(exact.lhs, 0.0, 1e-14);
    EXPECT_TRUE(exact.holds);

    Matrix E = randmpf::testing::random_hermitian(4, 5);
    E *= 0.01 / spectral_norm(E);
    ClosenessCheck c = lemma_closeness_check(U, (U + E) / 1.5, 1.5, O, rho);
    EXPECT_NEAR(c.rhs, 0.03, 1e-12);
    EXPECT_TRUE(c.holds);
    EXPECT_LE(c.lhs, c.sharp + 1e-15);
    EXPECT_THROW(lemma_closeness_check(U, U, 1.0, Observable(2.0 * pauli_string("ZI")), rho), InvalidArgument);
}
