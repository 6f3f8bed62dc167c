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

#ifndef DPATTN_MECHANISM_H_
#define DPATTN_MECHANISM_H_

// The Gaussian sampling mechanism: release the empirical covariance of k
// i.i.d. draws from N(0, Sigma), plus the utility radius rho that bounds
// ||Sigma^{-1/2} SigmaHat Sigma^{-1/2} - I||_F with probability 1 - gamma.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "dpattn/errors.h"
#include "dpattn/linalg.h"
#include "dpattn/parallel.h"
#include "dpattn/random.h"
#include "dpattn/status_macros.h"

namespace dpattn {

// Samples are accumulated in fixed-size chunks, reduced in chunk order, so the
// estimate is bit-identical for any worker count.
inline constexpr std::int64_t kSampleChunk = 8192;

// L = V diag(sqrt(max(lambda, 0))) with L L^T = Sigma. Eigenvalues below
// -DefaultPsdTolerance are rejected.
inline absl::StatusOr<Eigen::MatrixXd> SamplingFactor(const SymMatrix& sigma) {
  DPATTN_ASSIGN_OR_RETURN(const SpectralDecomposition spectrum,
                          SymEigendecompose(sigma));
  if (spectrum.min_eigenvalue() < -DefaultPsdTolerance(spectrum)) {
    return NotPsdError("Sigma min eigenvalue " +
                       std::to_string(spectrum.min_eigenvalue()));
  }
  const Eigen::VectorXd roots = spectrum.eigenvalues.cwiseMax(0.0).cwiseSqrt();
  return Eigen::MatrixXd(spectrum.eigenvectors * roots.asDiagonal());
}

// g_i = L z_i where z_i is normals [i n, (i + 1) n) of stream (seed, stream).
inline absl::StatusOr<std::vector<Eigen::VectorXd>> SampleGaussian(
    const SymMatrix& sigma, std::int64_t k, std::uint64_t seed,
    std::uint64_t stream = 0) {
  if (k < 0) return ParamRangeError("k must be >= 0");
  DPATTN_ASSIGN_OR_RETURN(const Eigen::MatrixXd factor, SamplingFactor(sigma));
  const int n = sigma.dim();
  const RandomStream normals(seed, stream);
  std::vector<Eigen::VectorXd> samples;
  samples.reserve(static_cast<size_t>(k));
  Eigen::VectorXd z(n);
  for (std::int64_t i = 0; i < k; ++i) {
    normals.FillNormals(static_cast<std::uint64_t>(i) * n,
                        {z.data(), static_cast<size_t>(n)});
    samples.push_back(factor * z);
  }
  return samples;
}

struct MechanismOutput {
  SymMatrix sigma_hat;
  std::int64_t k = 0;
  std::uint64_t seed = 0;
  // ||Sigma^{-1/2} SigmaHat Sigma^{-1/2} - I||_F; empty when Sigma is singular.
  std::optional<double> rel_frob_error;
  // Set when k < n or SigmaHat is numerically singular. The estimate is still
  // usable entrywise, but Loewner-order utility is not certified.
  bool singular_estimate = false;
};

// SigmaHat = (1/k) sum_i g_i g_i^T with g_i ~ N(0, Sigma).
inline absl::StatusOr<MechanismOutput> GaussianSamplingMechanism(
    const SymMatrix& sigma, std::int64_t k, std::uint64_t seed,
    std::uint64_t stream = 0) {
  if (k < 1) return ParamRangeError("k must be >= 1");
  DPATTN_ASSIGN_OR_RETURN(const Eigen::MatrixXd factor, SamplingFactor(sigma));
  const int n = sigma.dim();
  const RandomStream normals(seed, stream);
  const auto chunks =
      static_cast<size_t>((k + kSampleChunk - 1) / kSampleChunk);
  std::vector<Eigen::MatrixXd> partial(chunks);
  ParallelFor(chunks, [&](size_t chunk) {
    const std::int64_t first = static_cast<std::int64_t>(chunk) * kSampleChunk;
    const std::int64_t count = std::min(kSampleChunk, k - first);
    Eigen::MatrixXd z(n, count);
    normals.FillNormals(static_cast<std::uint64_t>(first) * n,
                        {z.data(), static_cast<size_t>(n * count)});
    const Eigen::MatrixXd g = factor * z;
    partial[chunk] = g * g.transpose();
  });
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
  for (const Eigen::MatrixXd& p : partial) sum += p;

  MechanismOutput out{.sigma_hat = SymMatrix(sum / static_cast<double>(k)),
                      .k = k,
                      .seed = seed};
  if (absl::StatusOr<double> err =
          RelativeFrobeniusDistance(sigma, out.sigma_hat);
      err.ok()) {
    out.rel_frob_error = *err;
  }
  DPATTN_ASSIGN_OR_RETURN(const SpectralDecomposition estimate,
                          SymEigendecompose(out.sigma_hat));
  out.singular_estimate =
      k < n || estimate.min_eigenvalue() <= DefaultPsdTolerance(estimate);
  return out;
}

// C_rho (sqrt(q / k) + q / k) with q = n^2 + ln(1 / gamma).
inline absl::StatusOr<double> UtilityRho(int n, double gamma, double k,
                                         double c_rho) {
  if (n < 1) return ParamRangeError("n must be >= 1");
  if (!(gamma > 0 && gamma < 1)) {
    return ParamRangeError("gamma=" + std::to_string(gamma) +
                           " outside (0, 1)");
  }
  if (!(k >= 1)) return ParamRangeError("k must be >= 1");
  if (!(c_rho > 0)) return ParamRangeError("C_rho must be > 0");
  const double q = static_cast<double>(n) * n + std::log(1 / gamma);
  return c_rho * (std::sqrt(q / k) + q / k);
}

// Smallest k with UtilityRho(n, gamma, k, c_rho) <= rho_target.
inline absl::StatusOr<std::int64_t> RequiredK(int n, double gamma,
                                              double rho_target, double c_rho) {
  if (!(rho_target > 0)) return ParamRangeError("rho_target must be > 0");
  auto fits = [&](std::int64_t k) -> absl::StatusOr<bool> {
    DPATTN_ASSIGN_OR_RETURN(
        const double rho, UtilityRho(n, gamma, static_cast<double>(k), c_rho));
    return rho <= rho_target;
  };
  DPATTN_ASSIGN_OR_RETURN(const bool one_fits, fits(1));
  if (one_fits) return std::int64_t{1};
  constexpr std::int64_t kMaxK = std::int64_t{1} << 62;
  std::int64_t lo = 1;  // does not fit
  std::int64_t hi = 2;
  while (true) {
    DPATTN_ASSIGN_OR_RETURN(const bool hi_fits, fits(hi));
    if (hi_fits) break;
    if (hi >= kMaxK) {
      return ParamRangeError("rho_target=" + std::to_string(rho_target) +
                             " needs k beyond 2^62");
    }
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    DPATTN_ASSIGN_OR_RETURN(const bool mid_fits, fits(mid));
    (mid_fits ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace dpattn

#endif  // DPATTN_MECHANISM_H_
