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
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "randmpf/formula.hpp"
#include "randmpf/operator_core.hpp"
#include "randmpf/product_formulas.hpp"

namespace randmpf {

/// Truncated operator power series sum_k coeff[k] t^k. scale[k] bounds the
/// magnitude of the terms that were added to form coeff[k], so roundoff in
/// coeff[k] is a small multiple of eps * scale[k].
struct Jet {
    std::vector<Matrix> coeff;
    std::vector<double> scale;

    int degree() const { return static_cast<int>(coeff.size()) - 1; }
};

namespace detail {

inline bool apply_sparse(const HermitianTerm& h) { return h.sparse().nonZeros() * 4 <= h.matrix().size(); }

inline Jet zero_jet(Eigen::Index d, int D) {
    return {std::vector<Matrix>(static_cast<std::size_t>(D) + 1, Matrix::Zero(d, d)),
            std::vector<double>(static_cast<std::size_t>(D) + 1, 0.0)};
}

}  // namespace detail

inline Jet identity_jet(Eigen::Index d, int D) {
    Jet j = detail::zero_jet(d, D);
    j.coeff[0] = Matrix::Identity(d, d);
    j.scale[0] = 1.0;
    return j;
}

namespace detail {

/// Newton form over the distinct eigenvalues mu_0..mu_m (m <= 2):
/// e^{-i alpha h t} = sum_j g_j(t) W_j with W_0 = 1, W_j = (h - mu_{j-1}) W_{j-1}.
/// The t^k coefficient of g_j is (-i alpha)^k / k! times the complete
/// homogeneous polynomial of degree k - j in mu_0..mu_j, so each output
/// coefficient is a scalar convolution of the W_j X series.
inline std::vector<Matrix> newton_left_multiply(const Jet& x, const HermitianTerm& h, double alpha) {
    const int D = x.degree();
    const std::vector<double>& mu = h.distinct_eigenvalues();
    const std::size_t m = mu.size();
    const std::size_t n = x.coeff.size();

    // hk[j][k]: complete homogeneous polynomial of degree k in mu_0..mu_j
    std::vector<std::vector<double>> hk(m, std::vector<double>(n, 0.0));
    for (std::size_t k = 0; k < n; ++k) hk[0][k] = k == 0 ? 1.0 : hk[0][k - 1] * mu[0];
    for (std::size_t j = 1; j < m; ++j) {
        for (std::size_t k = 0; k < n; ++k) hk[j][k] = hk[j - 1][k] + (k ? mu[j] * hk[j][k - 1] : 0.0);
    }
    std::vector<cplx> pref(n);  // (-i alpha)^k / k!
    pref[0] = 1.0;
    for (std::size_t k = 1; k < n; ++k) pref[k] = pref[k - 1] * cplx(0.0, -alpha) / static_cast<double>(k);

    std::vector<std::vector<Matrix>> W(m);
    W[0] = x.coeff;
    for (std::size_t j = 1; j < m; ++j) {
        W[j].resize(n);
        for (std::size_t q = 0; q < n; ++q) {
            W[j][q].noalias() = h.sparse() * W[j - 1][q];
            W[j][q] -= mu[j - 1] * W[j - 1][q];
        }
    }
    std::vector<Matrix> out(n, Matrix::Zero(x.coeff[0].rows(), x.coeff[0].cols()));
    for (int k = 0; k <= D; ++k) {
        Matrix& acc = out[static_cast<std::size_t>(k)];
        for (std::size_t j = 0; j < m; ++j) {
            for (int i = static_cast<int>(j); i <= k; ++i) {
                const cplx g = pref[static_cast<std::size_t>(i)] * hk[j][static_cast<std::size_t>(i) - j];
                if (g != cplx(0.0)) acc += g * W[j][static_cast<std::size_t>(k - i)];
            }
        }
    }
    return out;
}

}  // namespace detail

/// X(t) <- e^{-i alpha h t} X(t). Coefficient k of the product is
/// sum_i (-i alpha h)^i / i! X_{k-i}: by the Newton form when the term has at
/// most three distinct eigenvalues, else by Horner's rule.
inline void left_multiply_exp(Jet& x, const HermitianTerm& h, double alpha) {
    const int D = x.degree();
    const bool sparse = detail::apply_sparse(h);
    const double a = std::abs(alpha) * h.norm();
    std::vector<Matrix> out;
    std::vector<double> out_scale(x.coeff.size(), 0.0);
    if (h.polynomial_expm()) {
        out = detail::newton_left_multiply(x, h, alpha);
        for (int k = 0; k <= D; ++k) {
            double s = 0.0, term = 1.0;
            for (int i = 0; i <= k; ++i) {
                s += term * x.scale[k - i];
                term *= a / (i + 1);
            }
            out_scale[k] = s;
        }
        x.coeff = std::move(out);
        x.scale = std::move(out_scale);
        return;
    }
    out.resize(x.coeff.size());
    Matrix w, hw;
    for (int k = D; k >= 0; --k) {
        w = x.coeff[0];
        for (int i = 1; i <= k; ++i) {
            if (sparse) hw.noalias() = h.sparse() * w;
            else hw.noalias() = h.matrix() * w;
            const cplx c(0.0, -alpha / (k - i + 1));
            w = x.coeff[i] + c * hw;
        }
        out[k] = std::move(w);
        double s = 0.0, term = 1.0;
        for (int i = 0; i <= k; ++i) {
            s += term * x.scale[k - i];
            term *= a / (i + 1);
        }
        out_scale[k] = s;
    }
    x.coeff = std::move(out);
    x.scale = std::move(out_scale);
}

/// Series of the schedule's matrix as a function of t.
inline Jet schedule_jet(const ExponentSchedule& s, const HamiltonianSpec& H, int D) {
    if (s.L != H.L()) throw DimensionError("schedule_jet: schedule and Hamiltonian term counts differ");
    Jet x = identity_jet(H.dim(), D);
    for (const Step& st : s.steps) left_multiply_exp(x, H.term(st.term), st.alpha);
    return x;
}

/// Series of e^{-iHt}: U_k = (-iH) U_{k-1} / k.
inline Jet exact_jet(const HamiltonianSpec& H, int D) {
    const double lambda = lambda_norm(H);
    Jet u = identity_jet(H.dim(), D);
    for (int k = 1; k <= D; ++k) {
        u.coeff[k].noalias() = H.matrix() * u.coeff[k - 1];
        u.coeff[k] *= cplx(0.0, -1.0 / k);
        u.scale[k] = u.scale[k - 1] * lambda / k;
    }
    return u;
}

/// Coefficient k times c^k: the series of X(c t).
inline Jet rescale(const Jet& x, double c) {
    Jet y = x;
    double p = 1.0;
    for (std::size_t k = 0; k < y.coeff.size(); ++k) {
        y.coeff[k] *= p;
        y.scale[k] *= std::abs(p);
        p *= c;
    }
    return y;
}

/// Cauchy product, truncated at the common degree.
inline Jet convolve(const Jet& a, const Jet& b) {
    const int D = std::min(a.degree(), b.degree());
    Jet c = detail::zero_jet(a.coeff[0].rows(), D);
    for (int k = 0; k <= D; ++k) {
        for (int i = 0; i <= k; ++i) {
            if (a.scale[i] == 0.0 || b.scale[k - i] == 0.0) continue;
            c.coeff[k].noalias() += a.coeff[i] * b.coeff[k - i];
            c.scale[k] += a.scale[i] * b.scale[k - i];
        }
    }
    return c;
}

namespace detail {

inline std::string formula_key(const Formula& f) {
    std::ostringstream os;
    os.precision(17);
    switch (f.node) {
        case Formula::Node::Block:
            os << "B" << f.scale;
            break;
        case Formula::Node::Sum:
            os << "S(";
            for (double m : f.moments) os << m << ";";
            for (std::size_t i = 0; i < f.children.size(); ++i) {
                os << f.weights[i] << ":" << formula_key(f.children[i]) << ",";
            }
            os << ")";
            break;
        case Formula::Node::Product:
            os << "P(";
            for (const Formula& c : f.children) os << formula_key(c) << ",";
            os << ")";
            break;
    }
    return os.str();
}

inline bool all_blocks(const Formula& f) {
    for (const Formula& c : f.children) {
        if (c.node != Formula::Node::Block) return false;
    }
    return true;
}

}  // namespace detail

/// Series of a formula tree given the series of its Suzuki block S(t).
/// A weighted sum of blocks sum_i w_i S(c_i t) has coefficient
/// (sum_i w_i c_i^k) S_k. Where the node records the moments its weights were
/// solved for, those exact values are used, so the series describes the formula
/// with exact weights rather than their double rounding. Other moments are
/// accumulated in long double.
inline Jet formula_jet(const Formula& f, const Jet& S, std::map<std::string, Jet>& memo) {
    std::string key = detail::formula_key(f);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    Jet out;
    switch (f.node) {
        case Formula::Node::Block:
            out = rescale(S, f.scale);
            break;
        case Formula::Node::Sum:
            if (detail::all_blocks(f)) {
                out = S;
                for (std::size_t k = 0; k < S.coeff.size(); ++k) {
                    long double mu = 0, mag = 0;
                    for (std::size_t i = 0; i < f.children.size(); ++i) {
                        long double p = std::pow(static_cast<long double>(f.children[i].scale),
                                                 static_cast<int>(k));
                        mu += f.weights[i] * p;
                        mag += std::fabs(f.weights[i] * p);
                    }
                    if (k < f.moments.size()) mu = f.moments[k];
                    out.coeff[k] *= static_cast<double>(mu);
                    // Rounding of mu itself is at the long double level; the
                    // remaining error is that of S_k.
                    out.scale[k] *= std::max(static_cast<double>(std::fabs(mu)),
                                             static_cast<double>(mag) * 1e-18);
                }
            } else {
                out = detail::zero_jet(S.coeff[0].rows(), S.degree());
                for (std::size_t i = 0; i < f.children.size(); ++i) {
                    Jet c = formula_jet(f.children[i], S, memo);
                    for (std::size_t k = 0; k < out.coeff.size(); ++k) {
                        out.coeff[k] += f.weights[i] * c.coeff[k];
                        out.scale[k] += std::abs(f.weights[i]) * c.scale[k];
                    }
                }
            }
            break;
        case Formula::Node::Product: {
            out = formula_jet(f.children[0], S, memo);
            for (std::size_t i = 1; i < f.children.size(); ++i) {
                out = convolve(out, formula_jet(f.children[i], S, memo));
            }
            break;
        }
    }
    memo.emplace(key, out);
    return out;
}

inline constexpr double kSeriesZeroTol = 1e-10;

/// E(t) = U(t) - M(t) as a power series. Coefficients below the formula's
/// order must vanish identically; each is checked to be at roundoff level
/// (||E_k|| <= kSeriesZeroTol * scale_k) and then set to zero.
struct ErrorSeries {
    Jet E;
    int order = 0;    // expected leading power
    int leading = 0;  // lowest power whose coefficient is above roundoff
};

/// Series of the merged S_{2 chi} block and of e^{-iHt} for one Hamiltonian
/// and degree. Each is computed on first request and then shared by every
/// formula evaluated on that Hamiltonian. Safe to use from several threads.
class JetCache {
   public:
    JetCache(const HamiltonianSpec& H, int D) : H_(H), D_(D) {}

    const HamiltonianSpec& hamiltonian() const { return H_; }
    int degree() const { return D_; }

    const Jet& block(int chi) {
        std::lock_guard<std::mutex> lock(mu_);
        auto& slot = blocks_[chi];
        if (!slot) slot = std::make_unique<Jet>(schedule_jet(merge_adjacent(suzuki_schedule(chi, H_.L())), H_, D_));
        return *slot;
    }

    const Jet& exact() {
        std::lock_guard<std::mutex> lock(mu_);
        if (!exact_) exact_ = std::make_unique<Jet>(exact_jet(H_, D_));
        return *exact_;
    }

   private:
    const HamiltonianSpec& H_;
    int D_;
    std::mutex mu_;
    std::map<int, std::unique_ptr<Jet>> blocks_;
    std::unique_ptr<Jet> exact_;
};

inline ErrorSeries error_series(const Approximation& a, JetCache& cache, int order) {
    const int D = cache.degree();
    if (D < order) throw InvalidArgument("error_series: degree below the formula order");
    std::map<std::string, Jet> memo;
    Jet M = formula_jet(a.root, cache.block(a.chi), memo);
    memo.clear();
    ErrorSeries es{cache.exact(), order, D + 1};
    for (int k = 0; k <= D; ++k) {
        es.E.coeff[k] -= M.coeff[k];
        es.E.scale[k] += M.scale[k];
        double mag = es.E.coeff[k].norm();
        bool roundoff = mag <= kSeriesZeroTol * es.E.scale[k];
        if (k < order) {
            if (!roundoff) {
                std::ostringstream msg;
                msg << "error_series: coefficient of t^" << k << " is " << mag << " (scale "
                    << es.E.scale[k] << "), but the formula should cancel it";
                throw NumericError(msg.str());
            }
            es.E.coeff[k].setZero();
        } else if (!roundoff && es.leading > D) {
            es.leading = k;
        }
    }
    return es;
}

inline ErrorSeries error_series(const Approximation& a, const HamiltonianSpec& H, int order, int D) {
    if (D < order) throw InvalidArgument("error_series: degree below the formula order");
    JetCache cache(H, D);
    return error_series(a, cache, order);
}

struct SeriesValue {
    Matrix value;
    double tail = 0.0;  // Frobenius size of the last two terms relative to the sum
};

inline SeriesValue evaluate_series(const Jet& x, double t) {
    const int D = x.degree();
    Matrix acc = x.coeff[D];
    for (int k = D - 1; k >= 0; --k) {
        acc *= t;
        acc += x.coeff[k];
    }
    double last = x.coeff[D].norm() * std::pow(t, D) + x.coeff[D - 1].norm() * std::pow(t, D - 1);
    double total = acc.norm();
    return {std::move(acc), total > 0 ? last / total : (last > 0 ? INFINITY : 0.0)};
}

struct DistanceSample {
    double value = 0.0;
    bool from_series = false;
    double direct = 0.0;  // direct double evaluation, always computed
    double tail = 0.0;    // series truncation indicator when from_series
};

/// ||U(t) - M(t)||. The direct double value is used when it is at least
/// kFloorMargin times the method's roundoff floor (the direct value at a time
/// so small that the true distance is far below roundoff); otherwise the value
/// comes from the error series.
class DistanceEvaluator {
   public:
    static constexpr double kFloorMargin = 1e3;
    static constexpr double kMaxTail = 1e-8;

    /// `shared` lets evaluators on the same Hamiltonian reuse block and exact
    /// series; it must have the same Hamiltonian and degree.
    DistanceEvaluator(Approximation a, const HamiltonianSpec& H, int order, int degree = 64,
                      std::shared_ptr<JetCache> shared = nullptr)
        : a_(std::move(a)), H_(H), order_(order), degree_(degree), cache_(std::move(shared)) {
        if (cache_ && (&cache_->hamiltonian() != &H_ || cache_->degree() != degree_)) {
            throw InvalidArgument("DistanceEvaluator: shared series cache is for another Hamiltonian or degree");
        }
        double lambda = lambda_norm(H_);
        floor_ = 0.0;
        for (double tau : {1e-6, 1e-5, 1e-4}) floor_ = std::max(floor_, direct(tau / lambda));
    }

    double floor() const { return floor_; }

    double direct(double t) const {
        return spectral_distance(exact_evolution(H_, t), evaluate(a_, H_, t));
    }

    const ErrorSeries& series() const {
        if (!series_) {
            if (!cache_) cache_ = std::make_shared<JetCache>(H_, degree_);
            series_ = std::make_unique<ErrorSeries>(error_series(a_, *cache_, order_));
        }
        return *series_;
    }

    DistanceSample distance(double t) const {
        DistanceSample s;
        s.direct = direct(t);
        if (s.direct >= kFloorMargin * floor_) {
            s.value = s.direct;
            return s;
        }
        SeriesValue v = evaluate_series(series().E, t);
        if (!(v.tail <= kMaxTail)) {
            std::ostringstream msg;
            msg << "distance: error series of degree " << degree_ << " not converged at t=" << t
                << " (tail ratio " << v.tail << ") and the direct value " << s.direct
                << " is within the roundoff floor " << floor_;
            throw NumericError(msg.str());
        }
        s.value = spectral_norm(v.value);
        s.from_series = true;
        s.tail = v.tail;
        return s;
    }

   private:
    Approximation a_;
    const HamiltonianSpec& H_;
    int order_;
    int degree_;
    double floor_ = 0.0;
    mutable std::shared_ptr<JetCache> cache_;
    mutable std::unique_ptr<ErrorSeries> series_;
};

}  // namespace randmpf
