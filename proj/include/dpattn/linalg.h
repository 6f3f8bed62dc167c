// Copyright 2026 The dpattn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef DPATTN_LINALG_H_
#define DPATTN_LINALG_H_

// Dense symmetric / PSD matrix primitives: spectral decomposition, matrix
// square roots, norms and Loewner-order comparisons.
//
// All operations are pure. Matrices are small (n up to a few hundred), so
// every spectral quantity goes through a full symmetric eigendecomposition.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "dpattn/errors.h"
#include "dpattn/status_macros.h"

namespace dpattn {

// A dense real symmetric matrix. Construction stores (M + M^T) / 2, which is
// exactly symmetric in floating point.
class SymMatrix {
 public:
  // Rejects non-square or empty input; asymmetric input is symmetrized.
  static absl::StatusOr<SymMatrix> Create(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) {
      return InvalidMatrixError("matrix is " + std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()) + ", not square");
    }
    if (m.rows() < 1) return InvalidMatrixError("matrix is empty");
    return SymMatrix(m);
  }

  static SymMatrix Identity(int n) {
    return SymMatrix(Eigen::MatrixXd::Identity(n, n));
  }
  static SymMatrix Zero(int n) {
    return SymMatrix(Eigen::MatrixXd::Zero(n, n));
  }
  static SymMatrix Diagonal(const Eigen::VectorXd& diag) {
    return SymMatrix(Eigen::MatrixXd(diag.asDiagonal()));
  }

  // Precondition: m is square and non-empty (use Create for untrusted input).
  explicit SymMatrix(const Eigen::MatrixXd& m)
      : m_((m + m.transpose()) * 0.5) {}

  int dim() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXd& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }
  bool IsFinite() const { return m_.allFinite(); }

  SymMatrix Scaled(double c) const { return SymMatrix(m_ * c); }

  friend bool operator==(const SymMatrix& a, const SymMatrix& b) {
    return a.m_.rows() == b.m_.rows() && a.m_ == b.m_;
  }

 private:
  Eigen::MatrixXd m_;
};

// Eigenvalues sorted descending; column j of `eigenvectors` pairs with
// eigenvalues(j). Each eigenvector's first non-negligible component is
// positive.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;

  // V diag(f(lambda)) V^T.
  template <typename F>
  SymMatrix Apply(F&& f) const {
    Eigen::VectorXd mapped = eigenvalues.unaryExpr(std::forward<F>(f));
    return SymMatrix(eigenvectors * mapped.asDiagonal() *
                     eigenvectors.transpose());
  }

  double min_eigenvalue() const { return eigenvalues(eigenvalues.size() - 1); }
  double max_eigenvalue() const { return eigenvalues(0); }
};

inline absl::StatusOr<SpectralDecomposition> SymEigendecompose(
    const SymMatrix& m) {
  if (!m.IsFinite()) return InvalidMatrixError("non-finite entries");
  const int n = m.dim();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.matrix());
  if (solver.info() != Eigen::Success) {
    return InvalidMatrixError("eigensolver did not converge");
  }
  SpectralDecomposition out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  for (int j = 0; j < n; ++j) {
    auto column = out.eigenvectors.col(j);
    for (int i = 0; i < n; ++i) {
      if (std::abs(column(i)) > 1e-12) {
        if (column(i) < 0) column = -column;
        break;
      }
    }
  }
  return out;
}

// 1e-9 * max(1, spectral norm).
inline double DefaultPsdTolerance(const SpectralDecomposition& spectrum) {
  const double spectral = std::max(std::abs(spectrum.max_eigenvalue()),
                                   std::abs(spectrum.min_eigenvalue()));
  return 1e-9 * std::max(1.0, spectral);
}

inline absl::StatusOr<double> DefaultPsdTolerance(const SymMatrix& m) {
  DPATTN_ASSIGN_OR_RETURN(const SpectralDecomposition spectrum,
                          SymEigendecompose(m));
  return DefaultPsdTolerance(spectrum);
}

inline absl::StatusOr<bool> IsPsd(const SymMatrix& m, double tol) {
  if (!(tol >= 0)) return ParamRangeError("tolerance must be >= 0");
  DPATTN_ASSIGN_OR_RETURN(const SpectralDecomposition spectrum,
                          SymEigendecompose(m));
  return spectrum.min_eigenvalue() >= -tol;
}

// Principal square root. Eigenvalues in [-tol, 0) are clipped to zero.
inline absl::StatusOr<SymMatrix> PsdSqrt(const SymMatrix& m, double tol) {
  if (!(tol >= 0)) return ParamRangeError("tolerance must be >= 0");
  DPATTN_ASSIGN_OR_RETURN(const SpectralDecomposition spectrum,
                          SymEigendecompose(m));
  if (spectrum.min_eigenvalue() < -tol) {
    return NotPsdError("min eigenvalue " +
                       std::to_string(spectrum.min_eigenvalue()));
  }
  return spectrum.Apply([](double x) { return std::sqrt(std::max(x, 0.0)); });
}

inline absl::StatusOr<SymMatrix> PsdInvSqrt(const SymMatrix& m,
                                            double rank_tol) {
  DPATTN_ASSIGN_OR_RETURN(const SpectralDecomposition spectrum,
                          SymEigendecompose(m));
  if (spectrum.min_eigenvalue() <= rank_tol) {
    return SingularMatrixError("min eigenvalue " +
                               std::to_string(spectrum.min_eigenvalue()) +
                               " <= " + std::to_string(rank_tol));
  }
  return spectrum.Apply([](double x) { return 1.0 / std::sqrt(x); });
}

// Projection onto the PSD cone in Frobenius norm (negative eigenvalues set to
// zero).
inline absl::StatusOr<SymMatrix> ProjectToPsdCone(const SymMatrix& m) {
  DPATTN_ASSIGN_OR_RETURN(const SpectralDecomposition spectrum,
                          SymEigendecompose(m));
  return spectrum.Apply([](double x) { return std::max(x, 0.0); });
}

struct MatrixNorms {
  double frobenius = 0;
  double spectral = 0;
  // max |m_ij|; this is what ||.||_inf means for matrices in this library.
  double entrywise_max = 0;
};

inline absl::StatusOr<MatrixNorms> Norms(const SymMatrix& m) {
  DPATTN_ASSIGN_OR_RETURN(const SpectralDecomposition spectrum,
                          SymEigendecompose(m));
  MatrixNorms out;
  out.frobenius = m.matrix().norm();
  out.spectral = spectrum.eigenvalues.cwiseAbs().maxCoeff();
  out.entrywise_max = m.matrix().cwiseAbs().maxCoeff();
  return out;
}

inline double EntrywiseMax(const Eigen::MatrixXd& m) {
  return m.cwiseAbs().maxCoeff();
}

// r * m * r for symmetric r.
inline SymMatrix Congruence(const SymMatrix& r, const SymMatrix& m) {
  return SymMatrix(r.matrix() * m.matrix() * r.matrix());
}

// Eigenvalues (descending) of B^{-1/2} A B^{-1/2}. Requires
// min eigenvalue(B) > tol.
inline absl::StatusOr<Eigen::VectorXd> WhitenedEigenvalues(const SymMatrix& a,
                                                           const SymMatrix& b,
                                                           double tol) {
  if (a.dim() != b.dim()) {
    return DimMismatchError(std::to_string(a.dim()) + " vs " +
                            std::to_string(b.dim()));
  }
  DPATTN_ASSIGN_OR_RETURN(const SymMatrix b_inv_sqrt, PsdInvSqrt(b, tol));
  DPATTN_ASSIGN_OR_RETURN(const SpectralDecomposition whitened,
                          SymEigendecompose(Congruence(b_inv_sqrt, a)));
  return whitened.eigenvalues;
}

// True iff (1 - eps) B <= A <= (1 + eps) B in the Loewner order, decided on
// the eigenvalues mu of B^{-1/2} A B^{-1/2}: 1 - eps - tol <= mu <= 1 + eps +
// tol. B must be positive definite (min eigenvalue > tol).
inline absl::StatusOr<bool> LoewnerWithin(const SymMatrix& a,
                                          const SymMatrix& b, double eps,
                                          double tol) {
  if (!(eps >= 0)) return ParamRangeError("eps must be >= 0");
  if (!(tol >= 0)) return ParamRangeError("tolerance must be >= 0");
  DPATTN_ASSIGN_OR_RETURN(const Eigen::VectorXd mu,
                          WhitenedEigenvalues(a, b, tol));
  return mu.maxCoeff() <= 1 + eps + tol && mu.minCoeff() >= 1 - eps - tol;
}

// ||Sigma^{-1/2} SigmaHat Sigma^{-1/2} - I||_F. Sigma must be positive definite
// relative to the default tolerance.
inline absl::StatusOr<double> RelativeFrobeniusDistance(
    const SymMatrix& sigma, const SymMatrix& sigma_hat) {
  if (sigma.dim() != sigma_hat.dim()) {
    return DimMismatchError(std::to_string(sigma.dim()) + " vs " +
                            std::to_string(sigma_hat.dim()));
  }
  DPATTN_ASSIGN_OR_RETURN(const SpectralDecomposition spectrum,
                          SymEigendecompose(sigma));
  const double tol = DefaultPsdTolerance(spectrum);
  if (spectrum.min_eigenvalue() <= tol) {
    return SingularMatrixError("Sigma min eigenvalue " +
                               std::to_string(spectrum.min_eigenvalue()));
  }
  const SymMatrix inv_sqrt =
      spectrum.Apply([](double x) { return 1.0 / std::sqrt(x); });
  const SymMatrix whitened = Congruence(inv_sqrt, sigma_hat);
  return (whitened.matrix() -
          Eigen::MatrixXd::Identity(sigma.dim(), sigma.dim()))
      .norm();
}

}  // namespace dpattn

#endif  // DPATTN_LINALG_H_
