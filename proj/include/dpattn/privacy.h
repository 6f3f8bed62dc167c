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

#ifndef DPATTN_PRIVACY_H_
#define DPATTN_PRIVACY_H_

// Privacy accounting for the Gaussian sampling mechanism.
//
// For neighboring inputs Sigma1, Sigma2 let A = Sigma1^{1/2} Sigma2^{-1}
// Sigma1^{1/2} with eigenvalues lambda_j. The privacy-loss random variable of
// releasing k samples from N(0, Sigma1) is
//
//   Z = 1/2 sum_i sum_j ((lambda_j - 1) h_ij^2 - ln lambda_j),
//
// with h_ij i.i.d. N(0, 1). Z is sub-exponential with nu = sqrt(k) ||A - I||_F
// and alpha = 2 ||A - I||_F, and E[Z] = k/2 sum_j (lambda_j - 1 - ln lambda_j).
// The mechanism is (eps, delta)-DP when Pr[Z > eps] <= delta; DpCertificate
// checks the sufficient conditions ||A - I||_F <= Delta, E[Z] <= eps / 2 and
// tail(eps / 2) <= delta, and McPrivacyVerify estimates Pr[Z > eps] directly.
//
// All logarithms are natural.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "dpattn/errors.h"
#include "dpattn/linalg.h"
#include "dpattn/parallel.h"
#include "dpattn/random.h"
#include "dpattn/status_macros.h"

namespace dpattn {

// Two-sided 99% normal quantile, used for the Wilson upper bound.
inline constexpr double kWilsonZ99 = 2.5758293035489004;

struct DeltaBudget {
  // min{eps / sqrt(8 k ln(1/delta)), eps / (8 ln(1/delta))}
  double definition_delta = 0;
  // 0.1 min{eps / sqrt(k ln(1/delta)), eps / ln(1/delta)}
  double theorem_delta = 0;

  double min() const { return std::min(definition_delta, theorem_delta); }
};

inline absl::Status CheckPrivacyRange(double eps, double delta_dp) {
  if (!(eps > 0 && eps < 1)) {
    return ParamRangeError("eps=" + std::to_string(eps) + " outside (0, 1)");
  }
  if (!(delta_dp > 0 && delta_dp < 1)) {
    return ParamRangeError("delta=" + std::to_string(delta_dp) +
                           " outside (0, 1)");
  }
  return absl::OkStatus();
}

inline absl::StatusOr<DeltaBudget> ComputeDeltaBudget(double eps,
                                                      double delta_dp,
                                                      double k) {
  DPATTN_RETURN_IF_ERROR(CheckPrivacyRange(eps, delta_dp));
  if (!(k >= 1)) return ParamRangeError("k must be >= 1");
  const double log_inv_delta = std::log(1 / delta_dp);
  DeltaBudget budget;
  budget.definition_delta = std::min(eps / std::sqrt(8 * k * log_inv_delta),
                                     eps / (8 * log_inv_delta));
  budget.theorem_delta =
      0.1 * std::min(eps / std::sqrt(k * log_inv_delta), eps / log_inv_delta);
  return budget;
}

struct PrivacySpectrum {
  // Eigenvalues of A = Sigma1^{1/2} Sigma2^{-1} Sigma1^{1/2}, descending.
  Eigen::VectorXd lambdas;
  // ||A - I||_F and ||I - A^{-1}||_F.
  double frob_a_minus_i = 0;
  double frob_i_minus_a_inv = 0;
  // Largest |lambda_j - 1 / mu_j| where mu are the eigenvalues of
  // Sigma2^{1/2} Sigma1^{-1} Sigma2^{1/2} (which is similar to A^{-1}).
  // Zero when the spectrum was given directly.
  double reciprocal_route_max_diff = 0;

  // Spectrum of a diagonal A; the Frobenius fields follow from the
  // eigenvalues.
  static absl::StatusOr<PrivacySpectrum> FromEigenvalues(
      const Eigen::VectorXd& lambdas) {
    if (lambdas.size() < 1 || !lambdas.allFinite() ||
        !(lambdas.minCoeff() > 0)) {
      return InvalidMatrixError("eigenvalues must be finite and positive");
    }
    PrivacySpectrum out;
    out.lambdas = lambdas;
    std::sort(out.lambdas.begin(), out.lambdas.end(), std::greater<>());
    out.frob_a_minus_i = (out.lambdas.array() - 1).matrix().norm();
    out.frob_i_minus_a_inv =
        (1 - out.lambdas.array().inverse()).matrix().norm();
    return out;
  }

  int dim() const { return static_cast<int>(lambdas.size()); }
};

// Both inputs must be positive definite.
inline absl::StatusOr<PrivacySpectrum> ComputePrivacySpectrum(
    const SymMatrix& sigma1, const SymMatrix& sigma2) {
  if (sigma1.dim() != sigma2.dim()) {
    return DimMismatchError(std::to_string(sigma1.dim()) + " vs " +
                            std::to_string(sigma2.dim()));
  }
  const int n = sigma1.dim();
  DPATTN_ASSIGN_OR_RETURN(const SpectralDecomposition s1,
                          SymEigendecompose(sigma1));
  DPATTN_ASSIGN_OR_RETURN(const SpectralDecomposition s2,
                          SymEigendecompose(sigma2));
  for (const SpectralDecomposition* s : {&s1, &s2}) {
    if (s->min_eigenvalue() <= DefaultPsdTolerance(*s)) {
      return SingularMatrixError(std::string(s == &s1 ? "Sigma1" : "Sigma2") +
                                 " min eigenvalue " +
                                 std::to_string(s->min_eigenvalue()));
    }
  }
  if (sigma1 == sigma2) {
    // A = I exactly.
    return PrivacySpectrum::FromEigenvalues(Eigen::VectorXd::Ones(n));
  }
  auto sqrt_fn = [](double x) { return std::sqrt(x); };
  auto inv_sqrt_fn = [](double x) { return 1 / std::sqrt(x); };
  const SymMatrix s1_sqrt = s1.Apply(sqrt_fn);
  const SymMatrix s1_inv_sqrt = s1.Apply(inv_sqrt_fn);
  const SymMatrix s2_sqrt = s2.Apply(sqrt_fn);
  const SymMatrix s2_inv = s2.Apply([](double x) { return 1 / x; });
  const SymMatrix s1_inv = s1.Apply([](double x) { return 1 / x; });

  const SymMatrix a = Congruence(s1_sqrt, s2_inv);
  const SymMatrix a_inv = Congruence(s1_inv_sqrt, sigma2);
  const SymMatrix ctc = Congruence(s2_sqrt, s1_inv);
  DPATTN_ASSIGN_OR_RETURN(const SpectralDecomposition a_spec,
                          SymEigendecompose(a));
  DPATTN_ASSIGN_OR_RETURN(const SpectralDecomposition ctc_spec,
                          SymEigendecompose(ctc));
  if (!(a_spec.min_eigenvalue() > 0)) {
    return SingularMatrixError("A has a non-positive eigenvalue");
  }
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);
  PrivacySpectrum out;
  out.lambdas = a_spec.eigenvalues;
  out.frob_a_minus_i = (a.matrix() - identity).norm();
  out.frob_i_minus_a_inv = (identity - a_inv.matrix()).norm();
  // ctc eigenvalues descending -> reciprocals ascending.
  const Eigen::VectorXd reciprocal =
      ctc_spec.eigenvalues.reverse().cwiseInverse();
  out.reciprocal_route_max_diff =
      (out.lambdas - reciprocal).cwiseAbs().maxCoeff();
  return out;
}

// x - ln(1 + x), accurate near x = 0.
inline double LogGap(double x) {
  if (std::abs(x) < 1e-4) {
    return x * x * (0.5 - x * (1.0 / 3 - x * (0.25 - x / 5)));
  }
  return x - std::log1p(x);
}

// E[Z] = k/2 sum_j (lambda_j - 1 - ln lambda_j); every summand is >= 0.
inline double ExpectedPrivacyLoss(const PrivacySpectrum& spectrum, double k) {
  double sum = 0;
  for (double lambda : spectrum.lambdas) sum += LogGap(lambda - 1);
  return 0.5 * k * sum;
}

// One draw of Z. h_ij is normal number i * n + j of stream (seed, stream).
inline double PrivacyLossSample(const PrivacySpectrum& spectrum, std::int64_t k,
                                std::uint64_t seed, std::uint64_t stream = 0) {
  if (k <= 0) return 0;
  // Every summand vanishes when A = I.
  if ((spectrum.lambdas.array() == 1).all()) return 0;
  const int n = spectrum.dim();
  std::vector<double> h(static_cast<size_t>(k) * n);
  RandomStream(seed, stream).FillNormals(0, h);
  std::vector<double> squares(n, 0.0);
  for (std::int64_t i = 0; i < k; ++i) {
    for (int j = 0; j < n; ++j) {
      const double x = h[static_cast<size_t>(i) * n + j];
      squares[j] += x * x;
    }
  }
  double z = 0;
  for (int j = 0; j < n; ++j) {
    const double lambda = spectrum.lambdas(j);
    z += (lambda - 1) * squares[j] - static_cast<double>(k) * std::log(lambda);
  }
  return 0.5 * z;
}

inline absl::StatusOr<double> PrivacyLossSample(const SymMatrix& sigma1,
                                                const SymMatrix& sigma2,
                                                std::int64_t k,
                                                std::uint64_t seed) {
  DPATTN_ASSIGN_OR_RETURN(const PrivacySpectrum spectrum,
                          ComputePrivacySpectrum(sigma1, sigma2));
  return PrivacyLossSample(spectrum, k, seed);
}

struct SubExpParams {
  double nu = 0;
  double alpha_se = 0;
  double mean = 0;
};

inline SubExpParams ComputeSubExpParams(const PrivacySpectrum& spectrum,
                                        double k) {
  return {std::sqrt(k) * spectrum.frob_a_minus_i, 2 * spectrum.frob_a_minus_i,
          ExpectedPrivacyLoss(spectrum, k)};
}

// Bernstein-type tail of a sub-exponential variable:
// Pr[X - mean >= t] <= max{exp(-t^2 / (2 nu^2)), exp(-t / (2 alpha))}.
// Degenerate parameters describe a point mass, whose tail is 0 for t > 0.
inline absl::StatusOr<double> TailBound(const SubExpParams& params, double t) {
  if (!(t > 0)) return ParamRangeError("t must be > 0");
  if (params.nu <= 0 || params.alpha_se <= 0) return 0.0;
  return std::max(std::exp(-t * t / (2 * params.nu * params.nu)),
                  std::exp(-t / (2 * params.alpha_se)));
}

inline double WilsonUpper(std::int64_t successes, std::int64_t trials,
                          double z = kWilsonZ99) {
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double center = p + z2 / (2 * n);
  const double spread = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n));
  return std::min(1.0, (center + spread) / (1 + z2 / n));
}

struct MonteCarloResult {
  std::int64_t trials = 0;
  std::int64_t exceedances = 0;
  double empirical_rate = 0;
  double wilson_upper = 0;
  // Z for every trial, in trial order.
  std::vector<double> samples;
};

inline constexpr std::int64_t kMinPrivacyTrials = 1000;

// Trial t draws Z from stream (seed, t); exceedance means Z > eps.
inline absl::StatusOr<MonteCarloResult> McPrivacyVerify(
    const PrivacySpectrum& spectrum, std::int64_t k, double eps,
    std::int64_t trials, std::uint64_t seed) {
  if (trials < kMinPrivacyTrials) {
    return ParamRangeError("trials=" + std::to_string(trials) + " < " +
                           std::to_string(kMinPrivacyTrials));
  }
  if (k < 0) return ParamRangeError("k must be >= 0");
  MonteCarloResult out;
  out.trials = trials;
  out.samples.resize(static_cast<size_t>(trials));
  constexpr std::int64_t kChunk = 512;
  const auto chunks = static_cast<size_t>((trials + kChunk - 1) / kChunk);
  ParallelFor(chunks, [&](size_t chunk) {
    const std::int64_t first = static_cast<std::int64_t>(chunk) * kChunk;
    const std::int64_t last = std::min(trials, first + kChunk);
    for (std::int64_t t = first; t < last; ++t) {
      out.samples[static_cast<size_t>(t)] =
          PrivacyLossSample(spectrum, k, seed, static_cast<std::uint64_t>(t));
    }
  });
  out.exceedances = std::count_if(out.samples.begin(), out.samples.end(),
                                  [eps](double z) { return z > eps; });
  out.empirical_rate = static_cast<double>(out.exceedances) / trials;
  out.wilson_upper = WilsonUpper(out.exceedances, trials);
  return out;
}

inline absl::StatusOr<MonteCarloResult> McPrivacyVerify(
    const SymMatrix& sigma1, const SymMatrix& sigma2, std::int64_t k,
    double eps, std::int64_t trials, std::uint64_t seed) {
  DPATTN_ASSIGN_OR_RETURN(const PrivacySpectrum spectrum,
                          ComputePrivacySpectrum(sigma1, sigma2));
  return McPrivacyVerify(spectrum, k, eps, trials, seed);
}

enum class CertificateReason {
  kGranted,
  kSensitivityExceeded,
  kExpectationExceeded,
  kTailExceeded,
};

inline std::string_view CertificateReasonName(CertificateReason reason) {
  switch (reason) {
    case CertificateReason::kGranted:
      return "Granted";
    case CertificateReason::kSensitivityExceeded:
      return "SensitivityExceeded";
    case CertificateReason::kExpectationExceeded:
      return "ExpectationExceeded";
    case CertificateReason::kTailExceeded:
      return "TailExceeded";
  }
  return "Unknown";
}

struct CertificateReport {
  double eps = 0;
  double delta_dp = 0;
  std::int64_t k = 0;
  // ||Sigma1^{1/2} Sigma2^{-1} Sigma1^{1/2} - I||_F.
  double m_sens = 0;
  DeltaBudget budget;
  bool within_definition_delta = false;
  bool within_theorem_delta = false;
  double expected_loss = 0;
  bool expectation_ok = false;
  SubExpParams params;
  // TailBound(params, eps / 2).
  double tail = 0;
  bool tail_ok = false;
  bool granted = false;
  CertificateReason reason = CertificateReason::kSensitivityExceeded;
  // Filled in by callers that also run the Monte-Carlo check.
  std::optional<MonteCarloResult> monte_carlo;
};

// Granted iff m_sens <= min(Delta variants), E[Z] <= eps / 2 and
// tail(eps / 2) <= delta. The first failing condition names the reason.
inline absl::StatusOr<CertificateReport> DpCertificate(
    const PrivacySpectrum& spectrum, double eps, double delta_dp,
    std::int64_t k) {
  CertificateReport report{.eps = eps, .delta_dp = delta_dp, .k = k};
  DPATTN_ASSIGN_OR_RETURN(
      report.budget, ComputeDeltaBudget(eps, delta_dp, static_cast<double>(k)));
  report.m_sens = spectrum.frob_a_minus_i;
  report.within_definition_delta =
      report.m_sens <= report.budget.definition_delta;
  report.within_theorem_delta = report.m_sens <= report.budget.theorem_delta;
  report.params = ComputeSubExpParams(spectrum, static_cast<double>(k));
  report.expected_loss = report.params.mean;
  report.expectation_ok = report.expected_loss <= eps / 2;
  DPATTN_ASSIGN_OR_RETURN(report.tail, TailBound(report.params, eps / 2));
  report.tail_ok = report.tail <= delta_dp;

  if (!(report.within_definition_delta && report.within_theorem_delta)) {
    report.reason = CertificateReason::kSensitivityExceeded;
  } else if (!report.expectation_ok) {
    report.reason = CertificateReason::kExpectationExceeded;
  } else if (!report.tail_ok) {
    report.reason = CertificateReason::kTailExceeded;
  } else {
    report.reason = CertificateReason::kGranted;
  }
  report.granted = report.reason == CertificateReason::kGranted;
  return report;
}

inline absl::StatusOr<CertificateReport> DpCertificate(const SymMatrix& sigma1,
                                                       const SymMatrix& sigma2,
                                                       double eps,
                                                       double delta_dp,
                                                       std::int64_t k) {
  DPATTN_ASSIGN_OR_RETURN(const PrivacySpectrum spectrum,
                          ComputePrivacySpectrum(sigma1, sigma2));
  return DpCertificate(spectrum, eps, delta_dp, k);
}

}  // namespace dpattn

#endif  // DPATTN_PRIVACY_H_
