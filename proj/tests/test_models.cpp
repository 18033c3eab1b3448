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

#include <algorithm>
#include <cmath>

#include "randmpf/models.hpp"
#include "test_util.hpp"

using namespace randmpf;
using randmpf::testing::max_abs;

namespace {

Matrix anticommutator(const Matrix& a, const Matrix& b) { return a * b + b * a; }
Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

std::vector<double> sorted_eigenvalues(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> s(m, Eigen::EigenvaluesOnly);
    std::vector<double> v(s.eigenvalues().data(), s.eigenvalues().data() + s.eigenvalues().size());
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

TEST(Heisenberg, TermsAndNorms) {
    HamiltonianSpec two = heisenberg(2);
    EXPECT_EQ(two.L(), 2u);
    HamiltonianSpec three = heisenberg(3);
    EXPECT_EQ(three.L(), 4u);
    EXPECT_NEAR(lambda_norm(three), 15.0, 1e-12);
    EXPECT_NEAR(three.term(0).norm(), 3.0, 1e-12);
    HamiltonianSpec six = heisenberg(6);
    EXPECT_EQ(six.L(), 7u);
    EXPECT_EQ(six.dim(), 64);
    for (const auto& t : six.terms()) EXPECT_LT(max_abs(t.matrix() - t.matrix().adjoint()), 1e-12);
    HamiltonianSpec split = heisenberg(2, true);
    EXPECT_EQ(split.L(), 5u);
    EXPECT_NEAR(lambda_norm(split), 7.0, 1e-12);
    EXPECT_LT(max_abs(split.matrix() - two.matrix()), 1e-13);
    EXPECT_THROW(heisenberg(1), InvalidArgument);
}

TEST(Anticommuting, PairwiseAnticommute) {
    HamiltonianSpec H = anticommuting();
    ASSERT_EQ(H.L(), 8u);
    EXPECT_EQ(H.dim(), 128);
    for (std::size_t j = 0; j < H.L(); ++j) {
        for (std::size_t k = j + 1; k < H.L(); ++k) {
            EXPECT_LE(max_abs(anticommutator(H.term(j).matrix(), H.term(k).matrix())), 1e-12);
        }
    }
    EXPECT_NEAR(lambda_norm(H), 7 * std::sqrt(2.0) + 1, 1e-12);
}

TEST(JordanWigner, CliffordAndCanonicalRelations) {
    for (int nq : {2, 3, 4}) {  // N = 4, 6, 8 Majoranas
        const int N = 2 * nq;
        const Matrix I = Matrix::Identity(Eigen::Index{1} << nq, Eigen::Index{1} << nq);
        for (int p = 0; p < N; ++p) {
            Matrix gp = jw_majorana(p, nq);
            EXPECT_LT(max_abs(gp - gp.adjoint()), 1e-15);
            for (int q = 0; q < N; ++q) {
                Matrix expect = p == q ? Matrix(2.0 * I) : Matrix(Matrix::Zero(I.rows(), I.cols()));
                EXPECT_LT(max_abs(anticommutator(gp, jw_majorana(q, nq)) - expect), 1e-14);
            }
        }
        for (int i = 0; i < nq; ++i) {
            Matrix ai = jw_annihilation(i, nq);
            for (int j = 0; j < nq; ++j) {
                Matrix aj = jw_annihilation(j, nq);
                Matrix expect = i == j ? I : Matrix(Matrix::Zero(I.rows(), I.cols()));
                EXPECT_LT(max_abs(anticommutator(ai, aj.adjoint()) - expect), 1e-14);
                EXPECT_LT(max_abs(anticommutator(ai, aj)), 1e-14);
            }
        }
    }
    EXPECT_LT(max_abs(jw_majorana(0, 3) - pauli_string("XII")), 1e-15);
    EXPECT_THROW(jw_majorana(6, 3), InvalidArgument);
}

TEST(Syk, StructureAndDeterminism) {
    HamiltonianSpec H = syk(10, 7);
    EXPECT_EQ(H.L(), 210u);
    EXPECT_EQ(H.dim(), 32);
    double norm = spectral_norm(H.matrix());
    EXPECT_LT(max_abs(H.matrix() - H.matrix().adjoint()), 1e-12);
    EXPECT_LT(std::abs(H.matrix().trace()), 1e-10 * norm);
    HamiltonianSpec again = syk(10, 7);
    EXPECT_EQ(max_abs(again.matrix() - H.matrix()), 0.0);
    HamiltonianSpec other = syk(10, 8);
    EXPECT_GT(max_abs(other.matrix() - H.matrix()), 0.0);
    EXPECT_EQ(syk(14, 1).dim(), 128);
    EXPECT_THROW(syk(9, 1), InvalidArgument);
}

TEST(Syk, CouplingVariance) {
    // each term is (J/4) times a Pauli string, so its norm is |J|/4
    HamiltonianSpec H = syk(14, 3);
    double s2 = 0;
    for (const auto& t : H.terms()) s2 += std::pow(4 * t.norm(), 2);
    double var = s2 / static_cast<double>(H.L());
    EXPECT_NEAR(var, 6.0 / (14.0 * 14 * 14), 0.15 * 6.0 / (14.0 * 14 * 14));
}

TEST(Hubbard, Symmetries) {
    HamiltonianSpec H = hubbard();
    EXPECT_EQ(H.dim(), 256);
    EXPECT_LT(max_abs(H.matrix() - H.matrix().adjoint()), 1e-12);
    EXPECT_LE(max_abs(commutator(H.matrix(), number_operator(8))), 1e-10);
    for (const auto& t : H.terms()) {
        if (t.label() != "U0") continue;
        std::vector<double> ev = sorted_eigenvalues(t.matrix());
        for (double v : ev) EXPECT_TRUE(std::abs(v) < 1e-12 || std::abs(v - 2.0) < 1e-12) << v;
        EXPECT_NEAR(ev.back(), 2.0, 1e-12);
    }
    // 2x2: four bonds, two spins, four U terms, mu and h
    EXPECT_EQ(H.L(), 8u + 4u + 2u);
}

TEST(Hubbard, SpectrumDoesNotDependOnOrbitalOrder) {
    HubbardParams hp;
    hp.lx = 2;
    hp.ly = 1;
    HamiltonianSpec H = hubbard(hp);
    // same model with spin-major ordering: mode = spin * sites + site
    const int sites = 2, nq = 4;
    auto mode = [&](int site, int spin) { return spin * sites + site; };
    std::vector<Matrix> a;
    for (int p = 0; p < nq; ++p) a.push_back(jw_annihilation(p, nq));
    Matrix K = Matrix::Zero(16, 16);
    for (int s = 0; s < 2; ++s) {
        Matrix hop = a[mode(0, s)].adjoint() * a[mode(1, s)];
        K -= hp.t * (hop + hop.adjoint());
    }
    for (int i = 0; i < sites; ++i) {
        Matrix up = a[mode(i, 0)].adjoint() * a[mode(i, 0)];
        Matrix dn = a[mode(i, 1)].adjoint() * a[mode(i, 1)];
        K += hp.U * up * dn - hp.mu * (up + dn) - hp.h * (up - dn);
    }
    std::vector<double> e1 = sorted_eigenvalues(H.matrix()), e2 = sorted_eigenvalues(K);
    for (std::size_t i = 0; i < e1.size(); ++i) EXPECT_NEAR(e1[i], e2[i], 1e-12);
    EXPECT_GT(max_abs(H.matrix() - K), 0.1);  // the orderings do differ as matrices
}

TEST(FreeFermion, RingHopping) {
    Matrix h = free_fermion_hopping(200);
    for (Eigen::Index i = 0; i < 200; ++i) EXPECT_EQ(h.row(i).sum(), cplx(2.0));
    std::vector<double> ev = sorted_eigenvalues(h);
    EXPECT_NEAR(ev.front(), -2.0, 1e-10);
    EXPECT_NEAR(ev.back(), 2.0, 1e-10);
    for (int n : {200, 7}) {
        HamiltonianSpec H = free_fermion(n);
        EXPECT_EQ(H.L(), n % 2 == 0 ? 2u : 3u);
        EXPECT_EQ(max_abs(H.matrix() - free_fermion_hopping(n)), 0.0);
        for (const auto& t : H.terms()) {
            // each group is a matching: one neighbour per site at most
            EXPECT_NEAR(t.norm(), 1.0, 1e-12);
        }
    }
    // circulant spectrum 2 cos(2 pi k / n)
    std::vector<double> expect;
    for (int k = 0; k < 200; ++k) expect.push_back(2 * std::cos(2 * M_PI * k / 200));
    std::sort(expect.begin(), expect.end());
    for (std::size_t i = 0; i < ev.size(); ++i) EXPECT_NEAR(ev[i], expect[i], 1e-10);
    EXPECT_THROW(free_fermion(2), InvalidArgument);
}

TEST(BuildModel, Names) {
    ModelConfig mc;
    mc.model = "toy";
    EXPECT_EQ(build_model(mc).L(), 3u);
    mc.model = "heisenberg";
    mc.n = 3;
    EXPECT_EQ(build_model(mc).L(), 4u);
    mc.model = "nope";
    EXPECT_THROW(build_model(mc), ConfigError);
}
