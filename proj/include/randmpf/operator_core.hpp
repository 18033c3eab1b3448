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
#include <Eigen/Sparse>
#include <unsupported/Eigen/KroneckerProduct>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "randmpf/error.hpp"

namespace randmpf {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<cplx>;

inline constexpr Eigen::Index kDefaultMaxDim = Eigen::Index{1} << 10;
inline constexpr double kHermiticityTol = 1e-12;

/// Kronecker product of single-qubit Paulis; the first label acts on the most
/// significant qubit.
inline Matrix pauli_string(std::string_view labels) {
    if (labels.empty()) {
        throw InvalidArgument("pauli_string: empty label list");
    }
    Matrix result = Matrix::Identity(1, 1);
    for (char c : labels) {
        Matrix p(2, 2);
        switch (c) {
            case 'I':
                p << 1, 0, 0, 1;
                break;
            case 'X':
                p << 0, 1, 1, 0;
                break;
            case 'Y':
                p << 0, cplx(0, -1), cplx(0, 1), 0;
                break;
            case 'Z':
                p << 1, 0, 0, -1;
                break;
            default:
                throw InvalidArgument(std::string("pauli_string: bad label '") + c + "'");
        }
        Matrix next = Eigen::kroneckerProduct(result, p);
        result = std::move(next);
    }
    return result;
}

namespace detail {

inline double frobenius(const Matrix& m) { return m.norm(); }

inline bool is_hermitian(const Matrix& m, double rel_tol) {
    if (m.rows() != m.cols()) return false;
    double scale = frobenius(m);
    double defect = (m - m.adjoint()).norm();
    return defect <= rel_tol * std::max(scale, 1e-300) || defect == 0.0;
}

inline bool is_diagonal(const Matrix& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            if (i != j && m(i, j) != cplx(0)) return false;
        }
    }
    return true;
}

// e^{-i theta (a+b)/2} * (e^{-i theta (b-a)/2} - e^{i theta (b-a)/2}) / (b - a),
// the first divided difference of e^{-i theta x}, without cancellation at small theta.
inline cplx exp_divided_difference(double theta, double a, double b) {
    double half = 0.5 * (b - a);
    cplx phase = std::exp(cplx(0, -theta * 0.5 * (a + b)));
    return phase * cplx(0, -std::sin(theta * half)) / half;
}

}  // namespace detail

/// One summand h_k of H, with its spectral data computed on first use.
class HermitianTerm {
   public:
    explicit HermitianTerm(Matrix matrix, std::string label = {})
        : matrix_(std::move(matrix)), label_(std::move(label)), lazy_(std::make_shared<Lazy>()) {
        if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols()) {
            throw DimensionError("HermitianTerm: matrix must be square and nonempty");
        }
        if (!matrix_.allFinite()) {
            throw InvalidArgument("HermitianTerm: non-finite entries");
        }
        if (!detail::is_hermitian(matrix_, kHermiticityTol)) {
            throw InvalidArgument("HermitianTerm '" + label_ + "': matrix is not Hermitian");
        }
    }

    const Matrix& matrix() const { return matrix_; }
    const std::string& label() const { return label_; }
    Eigen::Index dim() const { return matrix_.rows(); }

    double norm() const { return spectrum().norm; }
    const Eigen::VectorXd& eigenvalues() const { return spectrum().values; }
    const Matrix& eigenvectors() const { return spectrum().vectors; }
    const SparseMatrix& sparse() const { return spectrum().sparse; }
    /// Distinct eigenvalues, ascending, merged within 1e-9 of the norm.
    const std::vector<double>& distinct_eigenvalues() const { return spectrum().distinct; }
    /// True when apply_expm uses the Newton form over at most three eigenvalues.
    bool polynomial_expm() const { return spectrum().polynomial; }

    /// e^{-i theta h} from the cached eigendecomposition.
    Matrix expm(double theta) const {
        const Spectrum& s = spectrum();
        Eigen::VectorXcd phases(s.values.size());
        for (Eigen::Index i = 0; i < s.values.size(); ++i) {
            phases[i] = std::exp(cplx(0, -theta * s.values[i]));
        }
        return s.vectors * phases.asDiagonal() * s.vectors.adjoint();
    }

    /// x <- e^{-i theta h} x. Uses the diagonal or low-degree polynomial form of
    /// the exponential when the term admits one, else the dense exponential.
    template <typename Derived>
    void apply_expm(double theta, Eigen::MatrixBase<Derived>& x) const {
        const Spectrum& s = spectrum();
        if (s.diagonal) {
            for (Eigen::Index i = 0; i < x.rows(); ++i) {
                x.row(i) *= std::exp(cplx(0, -theta * matrix_(i, i).real()));
            }
            return;
        }
        if (!s.polynomial) {
            Matrix y = expm(theta) * x;
            x = y;
            return;
        }
        const std::vector<double>& mu = s.distinct;
        cplx f0 = std::exp(cplx(0, -theta * mu[0]));
        if (mu.size() == 1) {
            x *= f0;
            return;
        }
        cplx d01 = detail::exp_divided_difference(theta, mu[0], mu[1]);
        Matrix w1 = s.sparse * x - mu[0] * x;
        if (mu.size() == 2) {
            x = f0 * x + d01 * w1;
            return;
        }
        cplx d12 = detail::exp_divided_difference(theta, mu[1], mu[2]);
        cplx d012 = (d12 - d01) / (mu[2] - mu[0]);
        Matrix w2 = s.sparse * w1 - mu[1] * w1;
        x = f0 * x + d01 * w1 + d012 * w2;
    }

   private:
    struct Spectrum {
        Eigen::VectorXd values;
        Matrix vectors;
        double norm = 0.0;
        SparseMatrix sparse;
        std::vector<double> distinct;
        bool diagonal = false;
        bool polynomial = false;
    };
    struct Lazy {
        std::once_flag once;
        std::unique_ptr<Spectrum> value;
    };

    const Spectrum& spectrum() const {
        std::call_once(lazy_->once, [this] { lazy_->value = compute(); });
        return *lazy_->value;
    }

    std::unique_ptr<Spectrum> compute() const {
        auto s = std::make_unique<Spectrum>();
        Eigen::SelfAdjointEigenSolver<Matrix> solver(matrix_);
        if (solver.info() != Eigen::Success) {
            throw NumericError("HermitianTerm '" + label_ + "': eigendecomposition failed");
        }
        s->values = solver.eigenvalues();
        s->vectors = solver.eigenvectors();
        s->norm = s->values.cwiseAbs().maxCoeff();
        s->sparse = matrix_.sparseView(cplx(0), 0.0);
        s->diagonal = detail::is_diagonal(matrix_);

        double scale = std::max(s->norm, 1e-300);
        for (Eigen::Index i = 0; i < s->values.size(); ++i) {
            if (s->distinct.empty() || s->values[i] - s->distinct.back() > 1e-9 * scale) {
                s->distinct.push_back(s->values[i]);
            }
        }
        double min_gap = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < s->distinct.size(); ++i) {
            min_gap = std::min(min_gap, s->distinct[i] - s->distinct[i - 1]);
        }
        bool sparse_enough = s->sparse.nonZeros() * 4 <= matrix_.size();
        s->polynomial = s->distinct.size() <= 3 && sparse_enough &&
                        (s->distinct.size() == 1 || min_gap >= 1e-3 * scale);
        return s;
    }

    Matrix matrix_;
    std::string label_;
    std::shared_ptr<Lazy> lazy_;
};

inline Matrix herm_expm(const HermitianTerm& h, double theta) { return h.expm(theta); }

/// H = sum_k h_k as an ordered list of terms of one dimension.
class HamiltonianSpec {
   public:
    explicit HamiltonianSpec(std::vector<HermitianTerm> terms) : terms_(std::move(terms)) {
        if (terms_.empty()) {
            throw InvalidArgument("HamiltonianSpec: at least one term required");
        }
        Matrix sum = Matrix::Zero(terms_[0].dim(), terms_[0].dim());
        for (const HermitianTerm& t : terms_) {
            if (t.dim() != sum.rows()) {
                throw DimensionError("HamiltonianSpec: terms of unequal dimension");
            }
            sum += t.matrix();
        }
        total_ = std::make_shared<HermitianTerm>(std::move(sum), "H");
    }

    const std::vector<HermitianTerm>& terms() const { return terms_; }
    const HermitianTerm& term(std::size_t k) const { return terms_.at(k); }
    std::size_t L() const { return terms_.size(); }
    Eigen::Index dim() const { return terms_[0].dim(); }
    const HermitianTerm& total() const { return *total_; }
    const Matrix& matrix() const { return total_->matrix(); }

   private:
    std::vector<HermitianTerm> terms_;
    std::shared_ptr<HermitianTerm> total_;
};

/// Lambda = sum_k ||h_k||.
inline double lambda_norm(const HamiltonianSpec& H) {
    double sum = 0.0;
    for (const HermitianTerm& t : H.terms()) sum += t.norm();
    return sum;
}

inline Matrix exact_evolution(const HamiltonianSpec& H, double t,
                              Eigen::Index max_dim = kDefaultMaxDim) {
    if (H.dim() > max_dim) {
        throw DimensionError("exact_evolution: dimension " + std::to_string(H.dim()) +
                             " exceeds cap " + std::to_string(max_dim));
    }
    return H.total().expm(t);
}

/// Largest singular value of A - B.
inline double spectral_distance(const Matrix& A, const Matrix& B) {
    if (A.rows() != B.rows() || A.cols() != B.cols()) {
        throw DimensionError("spectral_distance: dimension mismatch");
    }
    Matrix D = A - B;
    double s = D.cwiseAbs().maxCoeff();
    if (s == 0.0) return 0.0;
    D /= s;
    Matrix gram = D.adjoint() * D;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(gram, Eigen::EigenvaluesOnly);
    return s * std::sqrt(std::max(solver.eigenvalues().maxCoeff(), 0.0));
}

/// Spectral norm of a single matrix.
inline double spectral_norm(const Matrix& A) {
    return spectral_distance(A, Matrix::Zero(A.rows(), A.cols()));
}

/// Hermitian observable with ||O|| <= 1. Larger inputs are rescaled and the
/// factor kept in scale(); the original operator is scale() * matrix().
class Observable {
   public:
    explicit Observable(Matrix m) : matrix_(std::move(m)) {
        if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols()) {
            throw DimensionError("Observable: matrix must be square and nonempty");
        }
        if (!detail::is_hermitian(matrix_, kHermiticityTol)) {
            throw InvalidArgument("Observable: matrix is not Hermitian");
        }
        Eigen::SelfAdjointEigenSolver<Matrix> solver(matrix_);
        if (solver.info() != Eigen::Success) {
            throw NumericError("Observable: eigendecomposition failed");
        }
        Eigen::VectorXd w = solver.eigenvalues();
        vectors_ = solver.eigenvectors();
        double norm = w.cwiseAbs().maxCoeff();
        if (norm > 1.0 + 1e-12) {
            scale_ = norm;
            matrix_ /= norm;
            w /= norm;
        }
        double tol = 1e-9 * std::max(1.0, w.cwiseAbs().maxCoeff());
        for (Eigen::Index i = 0; i < w.size(); ++i) {
            if (values_.empty() || w[i] - values_.back() > tol) {
                values_.push_back(w[i]);
                groups_.emplace_back();
            }
            groups_.back().push_back(i);
        }
        // Represent each cluster by its mean so that O = sum_j w_j P_j exactly up to
        // the clustering tolerance.
        for (std::size_t j = 0; j < values_.size(); ++j) {
            double mean = 0.0;
            for (Eigen::Index i : groups_[j]) mean += w[i];
            values_[j] = mean / static_cast<double>(groups_[j].size());
        }
    }

    const Matrix& matrix() const { return matrix_; }
    double scale() const { return scale_; }
    bool rescaled() const { return scale_ != 1.0; }
    Eigen::Index dim() const { return matrix_.rows(); }
    const std::vector<double>& values() const { return values_; }
    const Matrix& eigenvectors() const { return vectors_; }
    const std::vector<std::vector<Eigen::Index>>& groups() const { return groups_; }

    Matrix projector(std::size_t j) const {
        Matrix P = Matrix::Zero(dim(), dim());
        for (Eigen::Index i : groups_.at(j)) {
            P += vectors_.col(i) * vectors_.col(i).adjoint();
        }
        return P;
    }

   private:
    Matrix matrix_;
    Matrix vectors_;
    double scale_ = 1.0;
    std::vector<double> values_;
    std::vector<std::vector<Eigen::Index>> groups_;
};

/// Pure vector or density matrix.
class QuantumState {
   public:
    static QuantumState pure(Vector psi) {
        if (psi.size() == 0) throw DimensionError("QuantumState: empty vector");
        if (std::abs(psi.norm() - 1.0) > 1e-10) {
            throw InvalidArgument("QuantumState: vector is not normalized");
        }
        QuantumState s;
        s.vector_ = std::move(psi);
        s.pure_ = true;
        return s;
    }

    static QuantumState mixed(Matrix rho) {
        if (rho.rows() == 0 || rho.rows() != rho.cols()) {
            throw DimensionError("QuantumState: density matrix must be square");
        }
        if (!detail::is_hermitian(rho, 1e-10)) {
            throw InvalidArgument("QuantumState: density matrix is not Hermitian");
        }
        if (std::abs(rho.trace() - cplx(1.0)) > 1e-10) {
            throw InvalidArgument("QuantumState: density matrix trace is not 1");
        }
        Eigen::SelfAdjointEigenSolver<Matrix> solver(rho, Eigen::EigenvaluesOnly);
        if (solver.eigenvalues().minCoeff() < -1e-10) {
            throw InvalidArgument("QuantumState: density matrix is not positive semidefinite");
        }
        QuantumState s;
        s.density_ = std::move(rho);
        s.pure_ = false;
        return s;
    }

    static QuantumState basis(Eigen::Index dim, Eigen::Index index) {
        if (index < 0 || index >= dim) throw DimensionError("QuantumState: basis index out of range");
        Vector v = Vector::Zero(dim);
        v[index] = 1.0;
        return pure(std::move(v));
    }

    bool is_pure() const { return pure_; }
    Eigen::Index dim() const { return pure_ ? vector_.size() : density_.rows(); }

    const Vector& vector() const {
        if (!pure_) throw InvalidArgument("QuantumState: state is mixed");
        return vector_;
    }

    Matrix density() const {
        if (pure_) return vector_ * vector_.adjoint();
        return density_;
    }

   private:
    QuantumState() = default;
    Vector vector_;
    Matrix density_;
    bool pure_ = true;
};

/// Re tr(O V rho V^dagger), in units of the original (unscaled) observable.
inline double expectation(const Observable& O, const QuantumState& rho, const Matrix& V) {
    if (O.dim() != rho.dim() || V.rows() != O.dim() || V.cols() != O.dim()) {
        throw DimensionError("expectation: dimension mismatch");
    }
    cplx value;
    if (rho.is_pure()) {
        Vector phi = V * rho.vector();
        value = phi.dot(O.matrix() * phi);
    } else {
        Matrix evolved = V * rho.density() * V.adjoint();
        value = (O.matrix() * evolved).trace();
    }
    if (std::abs(value.imag()) > 1e-10 * std::max(1.0, std::abs(value))) {
        throw NumericError("expectation: imaginary part exceeds tolerance");
    }
    return O.scale() * value.real();
}

}  // namespace randmpf
