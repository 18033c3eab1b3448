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

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "randmpf/error.hpp"
#include "randmpf/operator_core.hpp"

namespace randmpf {

namespace detail {

inline std::string single_site(int n, int site, char p) {
    std::string s(static_cast<std::size_t>(n), 'I');
    s[static_cast<std::size_t>(site)] = p;
    return s;
}

inline std::string two_site(int n, int i, int j, char p) {
    std::string s(static_cast<std::size_t>(n), 'I');
    s[static_cast<std::size_t>(i)] = p;
    s[static_cast<std::size_t>(j)] = p;
    return s;
}

}  // namespace detail

/// -sum_<ij> (XX + YY + ZZ) + 2 sum_i X_i on a ring of n spins. By default one
/// term per bond and one field term (L = n + 1, or 2 for n = 2 where the ring
/// has a single bond). With per_pauli every Pauli product and every site field
/// is its own term.
inline HamiltonianSpec heisenberg(int n, bool per_pauli = false) {
    if (n < 2) throw InvalidArgument("heisenberg: need n >= 2");
    std::vector<HermitianTerm> terms;
    const int bonds = n == 2 ? 1 : n;
    for (int b = 0; b < bonds; ++b) {
        int i = b, j = (b + 1) % n;
        std::string label = "bond(" + std::to_string(i) + "," + std::to_string(j) + ")";
        if (per_pauli) {
            for (char p : {'X', 'Y', 'Z'}) {
                terms.emplace_back(-pauli_string(detail::two_site(n, i, j, p)), label + p + p);
            }
        } else {
            Matrix m = pauli_string(detail::two_site(n, i, j, 'X')) +
                       pauli_string(detail::two_site(n, i, j, 'Y')) +
                       pauli_string(detail::two_site(n, i, j, 'Z'));
            terms.emplace_back(-m, label);
        }
    }
    if (per_pauli) {
        for (int i = 0; i < n; ++i) {
            terms.emplace_back(2.0 * pauli_string(detail::single_site(n, i, 'X')),
                               "field" + std::to_string(i));
        }
    } else {
        Matrix field = Matrix::Zero(Eigen::Index{1} << n, Eigen::Index{1} << n);
        for (int i = 0; i < n; ++i) field += pauli_string(detail::single_site(n, i, 'X'));
        terms.emplace_back(2.0 * field, "field");
    }
    return HamiltonianSpec(std::move(terms));
}

/// sum_{i<n} Z^{(x) i} (x) (X+Y) (x) I... + Z^{(x) n}; all terms pairwise anticommute.
inline HamiltonianSpec anticommuting(int n = 7) {
    if (n < 1) throw InvalidArgument("anticommuting: need n >= 1");
    std::vector<HermitianTerm> terms;
    for (int i = 0; i < n; ++i) {
        std::string prefix(static_cast<std::size_t>(i), 'Z');
        std::string tail(static_cast<std::size_t>(n - i - 1), 'I');
        Matrix m = pauli_string(prefix + 'X' + tail) + pauli_string(prefix + 'Y' + tail);
        terms.emplace_back(std::move(m), "anti" + std::to_string(i));
    }
    terms.emplace_back(pauli_string(std::string(static_cast<std::size_t>(n), 'Z')), "Zall");
    return HamiltonianSpec(std::move(terms));
}

/// Two single-qubit terms X and Y.
inline HamiltonianSpec xy_toy() {
    return HamiltonianSpec({HermitianTerm(pauli_string("X"), "X"), HermitianTerm(pauli_string("Y"), "Y")});
}

/// Jordan-Wigner Majorana on n_qubits qubits: gamma_{2j} = Z_0..Z_{j-1} X_j,
/// gamma_{2j+1} = Z_0..Z_{j-1} Y_j. Qubit 0 is the leftmost tensor factor.
inline Matrix jw_majorana(int p, int n_qubits) {
    if (n_qubits < 1 || p < 0 || p >= 2 * n_qubits) {
        throw InvalidArgument("jw_majorana: index out of range");
    }
    const int j = p / 2;
    std::string s(static_cast<std::size_t>(n_qubits), 'I');
    for (int k = 0; k < j; ++k) s[static_cast<std::size_t>(k)] = 'Z';
    s[static_cast<std::size_t>(j)] = p % 2 == 0 ? 'X' : 'Y';
    return pauli_string(s);
}

/// a_j = (gamma_{2j} + i gamma_{2j+1}) / 2.
inline Matrix jw_annihilation(int j, int n_qubits) {
    return 0.5 * (jw_majorana(2 * j, n_qubits) + cplx(0, 1) * jw_majorana(2 * j + 1, n_qubits));
}

/// (1 / (4 4!)) sum_{pqrs} J_{pqrs} gamma_p gamma_q gamma_r gamma_s with J totally
/// antisymmetric and J_{p<q<r<s} ~ N(0, 3!/N^3). The 4! orderings of each tuple
/// contribute equally, so H = (1/4) sum_{p<q<r<s} J gamma gamma gamma gamma, one
/// term per tuple.
inline HamiltonianSpec syk(int N, std::uint64_t seed) {
    if (N < 4 || N % 2 != 0) throw InvalidArgument("syk: N must be even and >= 4");
    if (N > 16) throw DimensionError("syk: N > 16 exceeds the dense path");
    const int nq = N / 2;
    std::vector<Matrix> gamma;
    for (int p = 0; p < N; ++p) gamma.push_back(jw_majorana(p, nq));
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> normal(0.0, std::sqrt(6.0 / (static_cast<double>(N) * N * N)));
    std::vector<HermitianTerm> terms;
    for (int p = 0; p < N; ++p) {
        for (int q = p + 1; q < N; ++q) {
            Matrix pq = gamma[p] * gamma[q];
            for (int r = q + 1; r < N; ++r) {
                Matrix pqr = pq * gamma[r];
                for (int s = r + 1; s < N; ++s) {
                    double J = normal(gen);
                    Matrix m = (0.25 * J) * (pqr * gamma[s]);
                    // gamma_p gamma_q gamma_r gamma_s is exactly Hermitian; remove roundoff.
                    Matrix herm = 0.5 * (m + m.adjoint());
                    terms.emplace_back(std::move(herm), "J" + std::to_string(p) + "_" + std::to_string(q) +
                                                            "_" + std::to_string(r) + "_" + std::to_string(s));
                }
            }
        }
    }
    return HamiltonianSpec(std::move(terms));
}

struct HubbardParams {
    int lx = 2;
    int ly = 2;
    double t = 2.0;
    double U = 2.0;
    double mu = 0.25;
    double h = 0.5;
};

/// Spin-orbital index of (site, spin): site-major, spin-minor.
inline int hubbard_mode(int site, int spin) { return 2 * site + spin; }

/// Nearest-neighbour bonds of an lx x ly lattice. A direction wraps around only
/// when it has more than two sites, so no bond appears twice.
inline std::vector<std::pair<int, int>> hubbard_bonds(int lx, int ly) {
    std::vector<std::pair<int, int>> bonds;
    for (int y = 0; y < ly; ++y) {
        for (int x = 0; x < lx; ++x) {
            int s = x + lx * y;
            if (x + 1 < lx) bonds.emplace_back(s, x + 1 + lx * y);
            else if (lx > 2) bonds.emplace_back(s, lx * y);
            if (y + 1 < ly) bonds.emplace_back(s, x + lx * (y + 1));
            else if (ly > 2) bonds.emplace_back(s, x);
        }
    }
    return bonds;
}

/// -t sum_<ij>,s (a+_is a_js + h.c.) + U sum_i n_iu n_id - mu sum n - h sum (n_u - n_d).
/// Terms: one per (bond, spin), one per site for U, one for mu, one for h.
inline HamiltonianSpec hubbard(const HubbardParams& hp = {}) {
    if (hp.lx < 1 || hp.ly < 1 || hp.lx * hp.ly < 2) throw InvalidArgument("hubbard: need at least two sites");
    const int sites = hp.lx * hp.ly;
    const int nq = 2 * sites;
    if (nq > 10) throw DimensionError("hubbard: more than 10 spin-orbitals exceeds the dense cap");
    std::vector<Matrix> a, n;
    for (int p = 0; p < nq; ++p) {
        a.push_back(jw_annihilation(p, nq));
        n.push_back(a.back().adjoint() * a.back());
    }
    std::vector<HermitianTerm> terms;
    for (auto [i, j] : hubbard_bonds(hp.lx, hp.ly)) {
        for (int s = 0; s < 2; ++s) {
            int pi = hubbard_mode(i, s), pj = hubbard_mode(j, s);
            Matrix hop = a[pi].adjoint() * a[pj];
            terms.emplace_back(-hp.t * (hop + hop.adjoint()), "hop" + std::to_string(i) + "_" +
                                                                   std::to_string(j) + (s ? "d" : "u"));
        }
    }
    const Eigen::Index dim = Eigen::Index{1} << nq;
    Matrix number = Matrix::Zero(dim, dim), spin = Matrix::Zero(dim, dim);
    for (int i = 0; i < sites; ++i) {
        const Matrix& up = n[hubbard_mode(i, 0)];
        const Matrix& dn = n[hubbard_mode(i, 1)];
        terms.emplace_back(hp.U * (up * dn), "U" + std::to_string(i));
        number += up + dn;
        spin += up - dn;
    }
    terms.emplace_back(-hp.mu * number, "mu");
    terms.emplace_back(-hp.h * spin, "h");
    return HamiltonianSpec(std::move(terms));
}

/// Total particle number sum_p a+_p a_p on nq modes.
inline Matrix number_operator(int nq) {
    const Eigen::Index dim = Eigen::Index{1} << nq;
    Matrix N = Matrix::Zero(dim, dim);
    for (int p = 0; p < nq; ++p) {
        Matrix a = jw_annihilation(p, nq);
        N += a.adjoint() * a;
    }
    return N;
}

/// Ring hopping matrix h_ij = 1 for nearest neighbours.
inline Matrix free_fermion_hopping(int n_sites) {
    if (n_sites < 3) throw InvalidArgument("free_fermion: need n_sites >= 3");
    Matrix h = Matrix::Zero(n_sites, n_sites);
    for (int i = 0; i < n_sites; ++i) {
        int j = (i + 1) % n_sites;
        h(i, j) = h(j, i) = 1.0;
    }
    return h;
}

/// Single-particle hopping matrix split into even bonds (i, i+1), i even, and
/// odd bonds. For odd n the wrap-around bond touches site 0 twice and gets a
/// third group. exact_evolution of the result is the propagator e^{-i h t}.
inline HamiltonianSpec free_fermion(int n_sites = 200) {
    Matrix h = free_fermion_hopping(n_sites);
    const int groups = n_sites % 2 == 0 ? 2 : 3;
    std::vector<Matrix> parts(static_cast<std::size_t>(groups), Matrix::Zero(n_sites, n_sites));
    for (int i = 0; i < n_sites; ++i) {
        int j = (i + 1) % n_sites;
        int g = (n_sites % 2 == 1 && i == n_sites - 1) ? 2 : i % 2;
        parts[g](i, j) = parts[g](j, i) = 1.0;
    }
    std::vector<HermitianTerm> terms;
    const char* names[] = {"even", "odd", "wrap"};
    for (int g = 0; g < groups; ++g) terms.emplace_back(std::move(parts[g]), names[g]);
    return HamiltonianSpec(std::move(terms));
}

struct ModelConfig {
    std::string model = "anticommuting";
    int n = 0;  // qubits (heisenberg, anticommuting), Majoranas (syk) or sites (free fermion); 0 = default
    std::uint64_t seed = 1;
    bool per_pauli = false;
    HubbardParams hubbard;
};

inline HamiltonianSpec build_model(const ModelConfig& mc) {
    const std::string& m = mc.model;
    if (m == "heisenberg") return heisenberg(mc.n ? mc.n : 6, mc.per_pauli);
    if (m == "anticommuting") return anticommuting(mc.n ? mc.n : 7);
    if (m == "toy" || m == "anticommuting2") return anticommuting(2);
    if (m == "xy") return xy_toy();
    if (m == "syk") return syk(mc.n ? mc.n : 10, mc.seed);
    if (m == "hubbard") return hubbard(mc.hubbard);
    if (m == "freefermion" || m == "free_fermion") return free_fermion(mc.n ? mc.n : 200);
    throw ConfigError("unknown model '" + m + "'");
}

}  // namespace randmpf
