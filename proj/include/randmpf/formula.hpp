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
#include <map>
#include <vector>

#include "randmpf/operator_core.hpp"
#include "randmpf/product_formulas.hpp"

namespace randmpf {

/// Expression over Suzuki blocks S_{2 chi}(c t): weighted sums and ordered
/// products. Every approximation in the library (plain Trotter-Suzuki and all
/// multi-product families) is one of these trees.
struct Formula {
    enum class Node { Block, Sum, Product };

    Node node = Node::Block;
    double scale = 1.0;           // Block: S(scale * t)
    std::vector<double> weights;  // Sum: one weight per child
    // Sum of blocks only: the exact moments sum_i w_i c_i^k that the weights
    // were solved for, k = 0..size-1. Empty when not applicable.
    std::vector<double> moments;
    std::vector<Formula> children;

    static Formula block(double scale) {
        Formula f;
        f.node = Node::Block;
        f.scale = scale;
        return f;
    }

    static Formula sum(std::vector<double> weights, std::vector<Formula> children) {
        if (weights.size() != children.size() || children.empty()) {
            throw InvalidArgument("Formula::sum: weights and children must match and be nonempty");
        }
        Formula f;
        f.node = Node::Sum;
        f.weights = std::move(weights);
        f.children = std::move(children);
        return f;
    }

    /// children[0] is the leftmost factor.
    static Formula product(std::vector<Formula> children) {
        if (children.empty()) throw InvalidArgument("Formula::product: no factors");
        if (children.size() == 1) return std::move(children[0]);
        Formula f;
        f.node = Node::Product;
        f.children = std::move(children);
        return f;
    }

    /// S(t/r)^r
    static Formula power(int r) {
        return product(std::vector<Formula>(static_cast<std::size_t>(r), block(1.0 / r)));
    }
};

/// A formula tree together with the Suzuki order of its blocks.
struct Approximation {
    int chi = 1;
    Formula root;
};

inline Approximation ts_approximation(int chi, int r) {
    if (chi < 1 || r < 1) throw InvalidArgument("ts_approximation: chi and r must be >= 1");
    return {chi, Formula::power(r)};
}

/// Materializes the tree. Block matrices are cached per distinct scale.
inline Matrix evaluate(const Approximation& a, const HamiltonianSpec& H, double t) {
    ExponentSchedule S = merge_adjacent(suzuki_schedule(a.chi, H.L()));
    std::map<double, Matrix> cache;
    auto rec = [&](auto&& self, const Formula& f) -> Matrix {
        switch (f.node) {
            case Formula::Node::Block: {
                auto it = cache.find(f.scale);
                if (it == cache.end()) {
                    it = cache.emplace(f.scale, schedule_matrix(S, H, f.scale * t)).first;
                }
                return it->second;
            }
            case Formula::Node::Sum: {
                Matrix acc = Matrix::Zero(H.dim(), H.dim());
                for (std::size_t i = 0; i < f.children.size(); ++i) {
                    if (f.weights[i] != 0.0) acc += f.weights[i] * self(self, f.children[i]);
                }
                return acc;
            }
            case Formula::Node::Product: {
                Matrix acc = self(self, f.children[0]);
                for (std::size_t i = 1; i < f.children.size(); ++i) {
                    Matrix next = acc * self(self, f.children[i]);
                    acc = std::move(next);
                }
                return acc;
            }
        }
        return {};
    };
    return rec(rec, a.root);
}

/// Truncated power series in x of the tree with every S(c t) replaced by e^{c x}.
inline std::vector<double> formula_series(const Formula& f, int order) {
    const std::size_t n = static_cast<std::size_t>(order) + 1;
    switch (f.node) {
        case Formula::Node::Block: {
            std::vector<double> c(n);
            double term = 1.0;
            for (std::size_t k = 0; k < n; ++k) {
                c[k] = term;
                term *= f.scale / static_cast<double>(k + 1);
            }
            return c;
        }
        case Formula::Node::Sum: {
            std::vector<double> c(n, 0.0);
            for (std::size_t i = 0; i < f.children.size(); ++i) {
                std::vector<double> child = formula_series(f.children[i], order);
                for (std::size_t k = 0; k < n; ++k) c[k] += f.weights[i] * child[k];
            }
            return c;
        }
        case Formula::Node::Product: {
            std::vector<double> c = formula_series(f.children[0], order);
            for (std::size_t i = 1; i < f.children.size(); ++i) {
                std::vector<double> child = formula_series(f.children[i], order);
                std::vector<double> next(n, 0.0);
                for (std::size_t a = 0; a < n; ++a) {
                    for (std::size_t b = 0; a + b < n; ++b) next[a + b] += c[a] * child[b];
                }
                c = std::move(next);
            }
            return c;
        }
    }
    return {};
}

/// Number of S blocks along the deepest product of the tree.
inline int block_depth(const Formula& f) {
    switch (f.node) {
        case Formula::Node::Block:
            return 1;
        case Formula::Node::Sum: {
            int d = 0;
            for (const Formula& c : f.children) d = std::max(d, block_depth(c));
            return d;
        }
        case Formula::Node::Product: {
            int d = 0;
            for (const Formula& c : f.children) d += block_depth(c);
            return d;
        }
    }
    return 0;
}

}  // namespace randmpf
