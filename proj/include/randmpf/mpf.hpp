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

#include <Eigen/Dense>
#include <unsupported/Eigen/Polynomials>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "randmpf/error.hpp"
#include "randmpf/formula.hpp"
#include "randmpf/vandermonde.hpp"

namespace randmpf {

/// sum_q C_q S_{2 chi}(b_q t) with moments sum_q C_q b_q^k = nu_k, k = 0..2 chi R.
struct LBlock {
    int chi = 1;
    int R = 1;
    std::vector<double> b;
    std::vector<double> nu;
    std::vector<double> C;
    double one_norm = 0.0;
    double condition = 0.0;

    /// sum_q |C_q b_q|
    double weighted_norm() const {
        double s = 0.0;
        for (std::size_t q = 0; q < C.size(); ++q) s += std::abs(C[q] * b[q]);
        return s;
    }
};

inline LBlock make_block(int chi, int R, std::vector<double> b, std::vector<double> nu) {
    const std::size_t n = static_cast<std::size_t>(2 * chi * R + 1);
    if (b.size() != n || nu.size() != n) {
        std::ostringstream msg;
        msg << "make_block: expected vectors of length " << n << ", got b=" << b.size()
            << " nu=" << nu.size();
        throw DimensionError(msg.str());
    }
    VandermondeSolution sol = solve_vandermonde(b, nu);
    LBlock block{chi, R, std::move(b), std::move(nu), std::move(sol.C), 0.0, sol.condition};
    for (double c : block.C) block.one_norm += std::abs(c);
    return block;
}

struct ChildsWiebe {
    std::vector<int> ell;
    std::vector<double> C;
};

struct Matching {
    std::vector<LBlock> blocks;
};

struct ClosedForm {
    LBlock block0;
    std::vector<LBlock> blocks;
};

enum class MpfKind { ChildsWiebe, Matching, ClosedForm };

inline std::string kind_name(MpfKind k) {
    switch (k) {
        case MpfKind::ChildsWiebe:
            return "cw";
        case MpfKind::Matching:
            return "matching";
        case MpfKind::ClosedForm:
            return "closedform";
    }
    return "?";
}

inline MpfKind parse_kind(const std::string& s) {
    if (s == "cw" || s == "childswiebe") return MpfKind::ChildsWiebe;
    if (s == "matching" || s == "m") return MpfKind::Matching;
    if (s == "closedform" || s == "closed-form" || s == "cf") return MpfKind::ClosedForm;
    throw ConfigError("unknown MPF kind '" + s + "'");
}

struct MPFSpec {
    int chi = 1;
    int K = 0;  // Childs-Wiebe only
    int R = 0;  // matching and closed-form only
    std::variant<ChildsWiebe, Matching, ClosedForm> data;
    double resolution = 1.0;

    MpfKind kind() const { return static_cast<MpfKind>(data.index()); }

    /// Leading power of t in the error.
    int order() const {
        return kind() == MpfKind::ChildsWiebe ? 2 * (chi + K) + 1 : 2 * chi * R + 1;
    }

    /// Suzuki blocks along the deepest product.
    int depth_blocks() const {
        if (kind() == MpfKind::ChildsWiebe) {
            const auto& cw = std::get<ChildsWiebe>(data);
            return *std::max_element(cw.ell.begin(), cw.ell.end());
        }
        return R;
    }

    double max_condition() const {
        double worst = 0.0;
        if (const auto* m = std::get_if<Matching>(&data)) {
            for (const LBlock& b : m->blocks) worst = std::max(worst, b.condition);
        } else if (const auto* cf = std::get_if<ClosedForm>(&data)) {
            worst = cf->block0.condition;
            for (const LBlock& b : cf->blocks) worst = std::max(worst, b.condition);
        }
        return worst;
    }
};

/// Rows (1...), (ell^{-2 chi}), (ell^{-2 chi - 2}), ... with right-hand side e_0.
inline MPFSpec cw_coefficients(int chi, int K, std::vector<int> ell = {}) {
    if (chi < 1 || K < 0) throw InvalidArgument("cw_coefficients: need chi >= 1, K >= 0");
    if (ell.empty()) {
        for (int q = 1; q <= K + 1; ++q) ell.push_back(q);
    }
    const Eigen::Index n = K + 1;
    if (static_cast<Eigen::Index>(ell.size()) != n) {
        throw DimensionError("cw_coefficients: need K+1 node values");
    }
    for (std::size_t i = 0; i < ell.size(); ++i) {
        if (ell[i] < 1) throw InvalidArgument("cw_coefficients: ell must be positive");
        for (std::size_t j = 0; j < i; ++j) {
            if (ell[i] == ell[j]) throw InvalidArgument("cw_coefficients: repeated ell");
        }
    }
    LongMatrix A(n, n);
    for (Eigen::Index q = 0; q < n; ++q) {
        long double l = ell[static_cast<std::size_t>(q)];
        A(0, q) = 1;
        for (Eigen::Index row = 1; row < n; ++row) {
            A(row, q) = std::pow(l, -static_cast<long double>(2 * chi + 2 * (row - 1)));
        }
    }
    std::vector<long double> rhs(static_cast<std::size_t>(n), 0);
    rhs[0] = 1;
    LinearSolution sol = refined_solve(A, rhs, 1e300);
    MPFSpec spec;
    spec.chi = chi;
    spec.K = K;
    spec.data = ChildsWiebe{std::move(ell), sol.x};
    spec.resolution = 0.0;
    for (double c : sol.x) spec.resolution += std::abs(c);
    return spec;
}

struct NewtonOptions {
    int max_iterations = 200;
    double tolerance = 1e-12;
    double perturbation = 0.1;
};

namespace detail {

using LongPoly = std::vector<long double>;

inline LongPoly poly_mul(const LongPoly& a, const LongPoly& b, std::size_t n) {
    LongPoly c(n + 1, 0);
    for (std::size_t i = 0; i < a.size() && i <= n; ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size() && i + j <= n; ++j) c[i + j] += a[i] * b[j];
    }
    return c;
}

inline long double factorial(int k) {
    long double f = 1;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

// Block polynomials a_r(x) = 1 + sum_{k=1}^{m} nu_k^{(r)} x^k / k!.
inline std::vector<LongPoly> block_polys(const std::vector<long double>& x, int R, int m) {
    std::vector<LongPoly> polys(static_cast<std::size_t>(R), LongPoly(static_cast<std::size_t>(m) + 1, 0));
    for (int r = 0; r < R; ++r) {
        polys[r][0] = 1;
        for (int k = 1; k <= m; ++k) polys[r][k] = x[r * m + k - 1] / factorial(k);
    }
    return polys;
}

// F_k = k! [x^k] prod_r a_r(x) - 1, k = 1..n.
inline std::vector<long double> composition_residual(const std::vector<long double>& x, int R, int m) {
    const std::size_t n = static_cast<std::size_t>(R * m);
    std::vector<LongPoly> polys = block_polys(x, R, m);
    LongPoly prod{1};
    for (const LongPoly& p : polys) prod = poly_mul(prod, p, n);
    std::vector<long double> F(n);
    for (std::size_t k = 1; k <= n; ++k) F[k - 1] = factorial(static_cast<int>(k)) * prod[k] - 1;
    return F;
}

inline long double max_abs(const std::vector<long double>& v) {
    long double m = 0;
    for (long double x : v) m = std::max(m, std::fabs(x));
    return m;
}

}  // namespace detail

/// Largest |k! mu_k - 1| over k = 1..2 chi R for a set of matching nu vectors.
inline double composition_defect(const std::vector<std::vector<double>>& nus, int chi) {
    const int R = static_cast<int>(nus.size());
    const int m = 2 * chi;
    std::vector<long double> x(static_cast<std::size_t>(R * m));
    for (int r = 0; r < R; ++r) {
        for (int k = 1; k <= m; ++k) x[r * m + k - 1] = nus[r][k];
    }
    return static_cast<double>(detail::max_abs(detail::composition_residual(x, R, m)));
}

namespace detail {

struct NewtonOutcome {
    std::vector<long double> x;
    std::vector<long double> F;
    long double err = 0;
    int iterations = 0;
};

// Damped Newton on the composition residual from the starting point x.
inline NewtonOutcome composition_newton(std::vector<long double> x, int R, int m, const NewtonOptions& opt) {
    const int n = m * R;
    NewtonOutcome out;
    out.F = composition_residual(x, R, m);
    out.err = max_abs(out.F);
    int iter = 0;
    for (; iter < opt.max_iterations && out.err > opt.tolerance; ++iter) {
        std::vector<LongPoly> polys = block_polys(x, R, m);
        Eigen::MatrixXd J(n, n);
        for (int r = 0; r < R; ++r) {
            LongPoly others{1};
            for (int s = 0; s < R; ++s) {
                if (s != r) others = poly_mul(others, polys[s], static_cast<std::size_t>(n));
            }
            others.resize(static_cast<std::size_t>(n) + 1, 0);
            for (int j = 1; j <= m; ++j) {
                for (int k = 1; k <= n; ++k) {
                    long double v = k >= j ? factorial(k) / factorial(j) * others[k - j] : 0;
                    J(k - 1, r * m + j - 1) = static_cast<double>(v);
                }
            }
        }
        Eigen::VectorXd rhs(n);
        for (int i = 0; i < n; ++i) rhs[i] = -static_cast<double>(out.F[i]);
        Eigen::VectorXd dx = J.colPivHouseholderQr().solve(rhs);
        if (!dx.allFinite()) break;

        long double lambda = 1;
        bool improved = false;
        while (lambda >= 1.0L / 4096) {
            std::vector<long double> trial(x);
            for (int i = 0; i < n; ++i) trial[i] += lambda * dx[i];
            std::vector<long double> Ft = composition_residual(trial, R, m);
            long double et = max_abs(Ft);
            if (et < out.err) {
                x = std::move(trial);
                out.F = std::move(Ft);
                out.err = et;
                improved = true;
                break;
            }
            lambda /= 2;
        }
        if (!improved) break;
    }
    out.x = std::move(x);
    out.iterations = iter;
    return out;
}

// Starting point from the roots of sum_{k<=n} x^k/k!. For even n there are no
// real roots; the upper-half-plane roots, sorted by argument, are dealt out in
// consecutive runs of m/2 to the R blocks, each block taking the conjugate pairs.
inline std::vector<long double> root_pairing_start(int R, int m) {
    const int n = m * R;
    Eigen::VectorXd coeffs(n + 1);
    for (int k = 0; k <= n; ++k) coeffs[k] = static_cast<double>(1.0L / factorial(k));
    Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(coeffs);
    std::vector<std::complex<double>> upper;
    for (Eigen::Index i = 0; i < solver.roots().size(); ++i) {
        if (solver.roots()[i].imag() > 0) upper.push_back(solver.roots()[i]);
    }
    if (static_cast<int>(upper.size()) * 2 != n) return {};
    std::sort(upper.begin(), upper.end(),
              [](const auto& a, const auto& b) { return std::arg(a) < std::arg(b); });
    const int pairs = m / 2;
    std::vector<long double> x(static_cast<std::size_t>(n));
    for (int r = 0; r < R; ++r) {
        LongPoly poly{1};
        for (int p = 0; p < pairs; ++p) {
            const std::complex<double> z = upper[static_cast<std::size_t>(r * pairs + p)];
            long double inv = 1.0L / std::norm(z);
            poly = poly_mul(poly, {1, -2 * z.real() * inv, inv}, static_cast<std::size_t>(m));
        }
        for (int k = 1; k <= m; ++k) x[r * m + k - 1] = factorial(k) * poly[k];
    }
    return x;
}

}  // namespace detail

/// Real factorization of the degree-2 chi R truncated exponential into R
/// degree-2 chi factors with unit constant term, by damped Newton. The first
/// start is nu_k = R^{-k}; if Newton stalls from there it is restarted from a
/// grouping of the polynomial's complex roots.
inline std::vector<std::vector<double>> matching_nu(int chi, int R, NewtonOptions opt = {}) {
    if (chi < 1 || R < 1) throw InvalidArgument("matching_nu: need chi >= 1, R >= 1");
    const int m = 2 * chi;
    const int n = m * R;
    const std::size_t len = static_cast<std::size_t>(n + 1);

    // Identical starting blocks make the Jacobian singular (its block columns
    // coincide), so each block is tilted by a different amount.
    std::vector<long double> x0(static_cast<std::size_t>(n));
    for (int r = 0; r < R; ++r) {
        long double tilt = opt.perturbation * (r + 1 - 0.5L * (R + 1));
        for (int k = 1; k <= m; ++k) {
            x0[r * m + k - 1] = std::pow(static_cast<long double>(R), -k) * (1 + tilt * k);
        }
    }
    detail::NewtonOutcome sol = detail::composition_newton(std::move(x0), R, m, opt);
    if (!(sol.err <= 1e-10)) {
        std::vector<long double> start = detail::root_pairing_start(R, m);
        if (!start.empty()) {
            detail::NewtonOutcome retry = detail::composition_newton(std::move(start), R, m, opt);
            if (retry.err < sol.err) sol = std::move(retry);
        }
    }
    if (!(sol.err <= 1e-10)) {
        int worst = 0;
        for (int i = 1; i < n; ++i) {
            if (std::fabs(sol.F[i]) > std::fabs(sol.F[worst])) worst = i;
        }
        std::ostringstream msg;
        msg << "matching_nu(chi=" << chi << ", R=" << R << "): Newton stalled after " << sol.iterations
            << " iterations; composition constraint k=" << worst + 1 << " has residual "
            << static_cast<double>(std::fabs(sol.F[worst])) << " (closed-form is the fallback)";
        throw NoRealSolutionError(msg.str());
    }
    std::vector<std::vector<double>> nus(static_cast<std::size_t>(R), std::vector<double>(len, 0.0));
    for (int r = 0; r < R; ++r) {
        nus[r][0] = 1.0;
        for (int k = 1; k <= m; ++k) nus[r][k] = static_cast<double>(sol.x[r * m + k - 1]);
    }
    return nus;
}

/// nu^{(0)} = e_{2 chi}; nu^{(1)} = 1 for k <= 2 chi; otherwise
/// nu_k = k! ((2 chi)!)^{n-1} / (2 chi (n-1) + k)! for 0 < k <= 2 chi.
inline std::vector<double> closedform_nu(int chi, int R, int n) {
    if (chi < 1 || R < 1 || n < 0 || n > R) {
        throw InvalidArgument("closedform_nu: need chi >= 1 and 0 <= n <= R");
    }
    const int m = 2 * chi;
    std::vector<double> nu(static_cast<std::size_t>(m * R + 1), 0.0);
    if (n == 0) {
        nu[m] = 1.0;
    } else if (n == 1) {
        for (int k = 0; k <= m; ++k) nu[k] = 1.0;
    } else {
        for (int k = 1; k <= m; ++k) {
            long double log_v = std::lgamma(k + 1.0L) + (n - 1) * std::lgamma(m + 1.0L) -
                                std::lgamma(m * (n - 1) + k + 1.0L);
            nu[k] = static_cast<double>(std::exp(log_v));
        }
    }
    return nu;
}

inline MPFSpec build_matching(int chi, int R, const std::vector<std::vector<double>>& b_list,
                              const std::vector<std::vector<double>>& nus) {
    if (static_cast<int>(b_list.size()) != R || static_cast<int>(nus.size()) != R) {
        throw DimensionError("build_matching: need one b vector and one nu vector per block");
    }
    Matching m;
    double xi = 1.0;
    for (int r = 0; r < R; ++r) {
        m.blocks.push_back(make_block(chi, R, b_list[r], nus[r]));
        xi *= m.blocks.back().one_norm;
    }
    MPFSpec spec;
    spec.chi = chi;
    spec.R = R;
    spec.data = std::move(m);
    spec.resolution = xi;
    return spec;
}

inline MPFSpec build_matching(int chi, int R, const std::vector<std::vector<double>>& b_list) {
    return build_matching(chi, R, b_list, matching_nu(chi, R));
}

/// Xi^{(cf)} = sum_{r=1}^R ||C^{(0)}||^{r-1} ||C^{(r)}||
inline double closedform_resolution(double a0, const std::vector<double>& a) {
    double xi = 0.0;
    double power = 1.0;
    for (double ar : a) {
        xi += power * ar;
        power *= a0;
    }
    return xi;
}

/// b_list[0] is the shift block; b_list[1..R] the correction blocks.
inline MPFSpec build_closedform(int chi, int R, const std::vector<std::vector<double>>& b_list) {
    if (static_cast<int>(b_list.size()) != R + 1) {
        throw DimensionError("build_closedform: need R+1 b vectors (block0 first)");
    }
    ClosedForm cf{make_block(chi, R, b_list[0], closedform_nu(chi, R, 0)), {}};
    std::vector<double> norms;
    for (int r = 1; r <= R; ++r) {
        cf.blocks.push_back(make_block(chi, R, b_list[r], closedform_nu(chi, R, r)));
        norms.push_back(cf.blocks.back().one_norm);
    }
    MPFSpec spec;
    spec.chi = chi;
    spec.R = R;
    spec.resolution = closedform_resolution(cf.block0.one_norm, norms);
    spec.data = std::move(cf);
    return spec;
}

inline Formula block_formula(const LBlock& block) {
    std::vector<Formula> children;
    for (double bq : block.b) children.push_back(Formula::block(bq));
    Formula f = Formula::sum(block.C, std::move(children));
    f.moments = block.nu;
    return f;
}

inline Approximation approximation(const MPFSpec& spec) {
    Approximation a{spec.chi, {}};
    switch (spec.kind()) {
        case MpfKind::ChildsWiebe: {
            const auto& cw = std::get<ChildsWiebe>(spec.data);
            std::vector<Formula> children;
            for (int l : cw.ell) children.push_back(Formula::power(l));
            a.root = Formula::sum(cw.C, std::move(children));
            break;
        }
        case MpfKind::Matching: {
            std::vector<Formula> factors;
            for (const LBlock& b : std::get<Matching>(spec.data).blocks) factors.push_back(block_formula(b));
            a.root = Formula::product(std::move(factors));
            break;
        }
        case MpfKind::ClosedForm: {
            const auto& cf = std::get<ClosedForm>(spec.data);
            Formula shift = block_formula(cf.block0);
            std::vector<Formula> terms;
            for (std::size_t r = 0; r < cf.blocks.size(); ++r) {
                std::vector<Formula> factors(r, shift);
                factors.push_back(block_formula(cf.blocks[r]));
                terms.push_back(Formula::product(std::move(factors)));
            }
            std::vector<double> ones(terms.size(), 1.0);
            a.root = Formula::sum(std::move(ones), std::move(terms));
            break;
        }
    }
    return a;
}

inline Matrix mpf_matrix(const MPFSpec& spec, const HamiltonianSpec& H, double t) {
    return evaluate(approximation(spec), H, t);
}

/// Power series of the MPF with each S(b t) replaced by e^{b x}, truncated at `order`.
inline std::vector<double> scalar_series(const MPFSpec& spec, int order) {
    if (order < 0) throw InvalidArgument("scalar_series: order must be nonnegative");
    return formula_series(approximation(spec).root, order);
}

}  // namespace randmpf
