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

#ifndef DPATTN_EXPERIMENTS_H_
#define DPATTN_EXPERIMENTS_H_

// Seeded experiment helpers shared by the CLI and the test suites.

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "dpattn/errors.h"
#include "dpattn/linalg.h"
#include "dpattn/mechanism.h"
#include "dpattn/random.h"
#include "dpattn/status_macros.h"

namespace dpattn {

// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the sign
// of R's diagonal folded into Q.
inline Eigen::MatrixXd RandomOrthogonal(int n, std::uint64_t seed,
                                        std::uint64_t stream) {
  Eigen::MatrixXd g(n, n);
  RandomStream(seed, stream)
      .FillNormals(0, {g.data(), static_cast<size_t>(n) * n});
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j) {
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  }
  return q;
}

// Q diag(lambda) Q^T with lambda log-spaced from 1 to `condition_number`.
inline SymMatrix RandomSpdMatrix(int n, double condition_number,
                                 std::uint64_t seed, std::uint64_t stream) {
  const Eigen::MatrixXd q = RandomOrthogonal(n, seed, stream);
  Eigen::VectorXd lambda(n);
  for (int j = 0; j < n; ++j) {
    const double t = n == 1 ? 0.0 : static_cast<double>(j) / (n - 1);
    lambda(j) = std::pow(condition_number, t);
  }
  return SymMatrix(q * lambda.asDiagonal() * q.transpose());
}

inline constexpr std::uint64_t kBenchSigmaStream = 0xFFFFFFFFFFFFFFFFull;

struct UtilitySample {
  int n = 0;
  std::int64_t k = 0;
  std::int64_t trial = 0;
  double rel_frob_error = 0;
};

// For each k and trial, runs the mechanism on `sigma` with stream `trial` and
// records ||Sigma^{-1/2} SigmaHat Sigma^{-1/2} - I||_F.
inline absl::StatusOr<std::vector<UtilitySample>> BenchUtility(
    const SymMatrix& sigma, const std::vector<std::int64_t>& ks,
    std::int64_t trials, std::uint64_t seed) {
  if (trials < 0) return ParamRangeError("trials must be >= 0");
  std::vector<UtilitySample> out;
  for (const std::int64_t k : ks) {
    for (std::int64_t t = 0; t < trials; ++t) {
      DPATTN_ASSIGN_OR_RETURN(
          const MechanismOutput released,
          GaussianSamplingMechanism(sigma, k, seed,
                                    static_cast<std::uint64_t>(t)));
      if (!released.rel_frob_error.has_value()) {
        return SingularMatrixError("Sigma is singular");
      }
      out.push_back({sigma.dim(), k, t, *released.rel_frob_error});
    }
  }
  return out;
}

// Median (mean of the middle two for even counts).
inline double Median(std::vector<double> values) {
  if (values.empty()) return 0;
  std::sort(values.begin(), values.end());
  const std::size_t mid = values.size() / 2;
  return values.size() % 2 == 1 ? values[mid]
                                : 0.5 * (values[mid - 1] + values[mid]);
}

}  // namespace dpattn

#endif  // DPATTN_EXPERIMENTS_H_
