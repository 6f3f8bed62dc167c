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

#ifndef DPATTN_DATASET_H_
#define DPATTN_DATASET_H_

// Datasets X in R^{n x d} whose d columns are the data elements, the Gram map
// X -> X X^T, neighboring datasets, and the sensitivity of the Gram map under
// replacement of one column.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "dpattn/errors.h"
#include "dpattn/linalg.h"
#include "dpattn/random.h"
#include "dpattn/status_macros.h"

namespace dpattn {

inline constexpr double kGoodnessTolerance = 1e-9;

inline SymMatrix Gram(const Eigen::MatrixXd& x) {
  return SymMatrix(x * x.transpose());
}

// X is (eta, alpha)-good iff X X^T >= eta I and every column has 2-norm at
// most alpha; both comparisons allow `tol` slack.
inline bool CheckGood(const Eigen::MatrixXd& x, double eta, double alpha,
                      double tol = kGoodnessTolerance) {
  if (x.rows() < 1 || !x.allFinite()) return false;
  if (x.cols() > 0 && x.colwise().norm().maxCoeff() > alpha + tol) {
    return false;
  }
  absl::StatusOr<SpectralDecomposition> spectrum = SymEigendecompose(Gram(x));
  return spectrum.ok() && spectrum->min_eigenvalue() >= eta - tol;
}

// An (eta, alpha)-good dataset with d >= n, stored column-major.
class Dataset {
 public:
  static absl::StatusOr<Dataset> Create(Eigen::MatrixXd x, double eta,
                                        double alpha) {
    if (!(eta > 0)) return ParamRangeError("eta must be > 0");
    if (!(alpha > 0)) return ParamRangeError("alpha must be > 0");
    if (x.rows() < 1) return InvalidMatrixError("dataset has no rows");
    if (x.cols() < x.rows()) {
      return PreconditionFailedError("d >= n: d=" + std::to_string(x.cols()) +
                                     " < n=" + std::to_string(x.rows()));
    }
    if (!CheckGood(x, eta, alpha)) {
      return PreconditionFailedError(
          "dataset is not (eta=" + std::to_string(eta) +
          ", alpha=" + std::to_string(alpha) + ")-good");
    }
    return Dataset(std::move(x), eta, alpha);
  }

  int n() const { return static_cast<int>(x_.rows()); }
  int d() const { return static_cast<int>(x_.cols()); }
  double eta() const { return eta_; }
  double alpha() const { return alpha_; }
  const Eigen::MatrixXd& matrix() const { return x_; }

 private:
  Dataset(Eigen::MatrixXd x, double eta, double alpha)
      : x_(std::move(x)), eta_(eta), alpha_(alpha) {}

  Eigen::MatrixXd x_;
  double eta_;
  double alpha_;
};

// Stream ids used by the dataset generators under the caller's seed.
inline constexpr std::uint64_t kDirectionStream = 0;
inline constexpr std::uint64_t kRadiusStream = 1;
inline constexpr std::uint64_t kNeighborStream = 2;

// X = [sqrt(eta) I_n | G], where column j of G has a uniformly random
// direction and norm u_j * min(alpha, sqrt(eta)) with u_j uniform in [0, 1).
// X X^T = eta I + G G^T >= eta I by construction.
inline absl::StatusOr<Dataset> GenerateGoodDataset(int n, int d, double eta,
                                                   double alpha,
                                                   std::uint64_t seed) {
  if (n < 1) return ParamRangeError("n must be >= 1");
  if (d < n) {
    return PreconditionFailedError("d >= n: d=" + std::to_string(d) +
                                   " < n=" + std::to_string(n));
  }
  if (!(eta > 0) || !(alpha > 0)) {
    return ParamRangeError("eta and alpha must be > 0");
  }
  const double root_eta = std::sqrt(eta);
  if (alpha < root_eta) {
    return InfeasibleError("alpha=" + std::to_string(alpha) +
                           " < sqrt(eta)=" + std::to_string(root_eta));
  }
  // sqrt(eta)^2 can round to just below eta; step up to the first double
  // whose square reaches eta, unless that would leave the alpha-ball.
  double diagonal = root_eta;
  while (diagonal * diagonal < eta &&
         std::nextafter(diagonal, alpha + 1) <= alpha) {
    diagonal = std::nextafter(diagonal, alpha + 1);
  }
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, d);
  x.leftCols(n).diagonal().setConstant(diagonal);
  const RandomStream directions(seed, kDirectionStream);
  const RandomStream radii(seed, kRadiusStream);
  const double cap = std::min(alpha, root_eta);
  for (int j = n; j < d; ++j) {
    auto column = x.col(j);
    const auto offset = static_cast<std::uint64_t>(j - n) * n;
    directions.FillNormals(offset, {column.data(), static_cast<size_t>(n)});
    const double norm = column.norm();
    if (norm > 0) column *= cap * radii.Uniform(j - n) / norm;
  }
  return Dataset::Create(std::move(x), eta, alpha);
}

// A dataset and a copy that differs from it in exactly one column (or in none,
// when `index` is empty).
class NeighborPair {
 public:
  // Checks the neighbor relation: at most one column differs, and it moves
  // by at most beta (tolerance 1e-12).
  static absl::StatusOr<NeighborPair> Create(Dataset base,
                                             Eigen::MatrixXd perturbed,
                                             double beta) {
    if (!(beta >= 0)) return ParamRangeError("beta must be >= 0");
    if (perturbed.rows() != base.matrix().rows() ||
        perturbed.cols() != base.matrix().cols()) {
      return DimMismatchError("perturbed dataset shape differs from base");
    }
    std::optional<int> index;
    for (int j = 0; j < base.d(); ++j) {
      if (perturbed.col(j) != base.matrix().col(j)) {
        if (index.has_value()) {
          return PreconditionFailedError("neighbor: columns " +
                                         std::to_string(*index) + " and " +
                                         std::to_string(j) + " both differ");
        }
        index = j;
      }
    }
    if (index.has_value()) {
      const double moved =
          (perturbed.col(*index) - base.matrix().col(*index)).norm();
      if (moved > beta + 1e-12) {
        return PreconditionFailedError(
            "neighbor: column " + std::to_string(*index) + " moved by " +
            std::to_string(moved) + " > beta=" + std::to_string(beta));
      }
    }
    return NeighborPair(std::move(base), std::move(perturbed), beta, index);
  }

  const Dataset& base() const { return base_; }
  const Eigen::MatrixXd& perturbed() const { return perturbed_; }
  double beta() const { return beta_; }
  std::optional<int> index() const { return index_; }

 private:
  NeighborPair(Dataset base, Eigen::MatrixXd perturbed, double beta,
               std::optional<int> index)
      : base_(std::move(base)),
        perturbed_(std::move(perturbed)),
        beta_(beta),
        index_(index) {}

  Dataset base_;
  Eigen::MatrixXd perturbed_;
  double beta_;
  std::optional<int> index_;
};

// Moves column `index` by beta in a random direction. If that leaves the
// alpha-ball the column is projected back onto it; projection onto a convex
// set containing the original column cannot lengthen the move, so the
// distance is beta when no projection happens and at most beta otherwise.
inline absl::StatusOr<NeighborPair> MakeNeighbor(const Dataset& x, double beta,
                                                 int index,
                                                 std::uint64_t seed) {
  if (!(beta >= 0)) return ParamRangeError("beta must be >= 0");
  if (index < 0 || index >= x.d()) {
    return ParamRangeError("column index " + std::to_string(index) +
                           " outside [0, " + std::to_string(x.d()) + ")");
  }
  Eigen::MatrixXd perturbed = x.matrix();
  Eigen::VectorXd direction(x.n());
  RandomStream(seed, kNeighborStream)
      .FillNormals(0, {direction.data(), static_cast<size_t>(x.n())});
  direction.normalize();
  Eigen::VectorXd moved = x.matrix().col(index) + beta * direction;
  if (const double norm = moved.norm(); norm > x.alpha()) {
    moved *= x.alpha() / norm;
  }
  perturbed.col(index) = moved;
  return NeighborPair::Create(x, std::move(perturbed), beta);
}

struct SensitivityValues {
  double spectral = 0;
  double frobenius = 0;
};

// Spectral and Frobenius norms of (X X^T)^{-1/2} X~ X~^T (X X^T)^{-1/2} - I.
inline absl::StatusOr<SensitivityValues> SensitivityMeasured(
    const NeighborPair& pair) {
  const SymMatrix base_gram = Gram(pair.base().matrix());
  DPATTN_ASSIGN_OR_RETURN(const double tol, DefaultPsdTolerance(base_gram));
  DPATTN_ASSIGN_OR_RETURN(const SymMatrix inv_sqrt, PsdInvSqrt(base_gram, tol));
  const int n = pair.base().n();
  const SymMatrix deviation(
      Congruence(inv_sqrt, Gram(pair.perturbed())).matrix() -
      Eigen::MatrixXd::Identity(n, n));
  DPATTN_ASSIGN_OR_RETURN(const MatrixNorms norms, Norms(deviation));
  return SensitivityValues{norms.spectral, norms.frobenius};
}

// (2 alpha beta / eta, 2 sqrt(n) alpha beta / eta).
inline absl::StatusOr<SensitivityValues> SensitivityBound(double eta,
                                                          double alpha,
                                                          double beta, int n) {
  if (!(eta > 0)) return ParamRangeError("eta must be > 0");
  if (n < 1) return ParamRangeError("n must be >= 1");
  const double spectral = 2 * alpha * beta / eta;
  return SensitivityValues{spectral,
                           std::sqrt(static_cast<double>(n)) * spectral};
}

}  // namespace dpattn

#endif  // DPATTN_DATASET_H_
