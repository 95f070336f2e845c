// SPDX-License-Identifier: Apache-2.0
//
// cellfree: multi-CPU cell-free massive MIMO downlink simulator
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef CELLFREE_TYPES_HPP
#define CELLFREE_TYPES_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace cellfree {

inline constexpr const char *kVersion = "0.3.1";

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;

// Index sets are kept sorted ascending unless stated otherwise.
using IndexSet = std::vector<std::size_t>;

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point &, const Point &) = default;
};

// Invalid user input (config files, parameters out of range). Maps to exit code 1.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical breakdown (non-PSD matrices, non-positive SINR denominators). Maps to exit code 2.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A serving link with positive data power but zero expected estimate energy;
// MR normalization is undefined for it.
class DegenerateLinkError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

// Hermitian/symmetric PSD square root with bounded roundoff repair: negative
// eigenvalues are clipped to zero when |lambda_min| <= 1e-10 * trace / n,
// anything more negative is reported as a numerical error.
template <typename Derived>
auto psd_sqrt(const Eigen::MatrixBase<Derived> &matrix, const std::string &what)
    -> Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> {
    using Matrix = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const Matrix sym = (matrix + matrix.adjoint()) / 2.0;
    const auto n = sym.rows();
    if (n == 0) {
        return Matrix(0, 0);
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw NumericalError(what + ": eigendecomposition failed");
    }
    auto eig = solver.eigenvalues().eval();
    const double scale = std::abs(std::real(sym.trace())) / static_cast<double>(n);
    const double lambda_min = eig.minCoeff();
    if (lambda_min < 0.0 && -lambda_min > 1e-10 * scale) {
        throw NumericalError(what + ": matrix is not positive semidefinite (lambda_min = " +
                             std::to_string(lambda_min) + ")");
    }
    // Eigenvalues at roundoff level are treated as exact zeros so that rank-deficient
    // inputs (co-located points, point scatterers) keep their exact degeneracy.
    for (Eigen::Index i = 0; i < eig.size(); ++i) {
        eig(i) = eig(i) > 1e-13 * scale ? std::sqrt(eig(i)) : 0.0;
    }
    const Matrix &vecs = solver.eigenvectors();
    return vecs * eig.asDiagonal() * vecs.adjoint();
}

} // namespace cellfree

#endif // CELLFREE_TYPES_HPP
