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

#ifndef DPATTN_PIPELINE_H_
#define DPATTN_PIPELINE_H_

// End-to-end private attention: from an (eta, alpha)-good dataset X, release
// B = GaussianSamplingMechanism(X X^T, k) and compare the attention matrices
// of A = X X^T and B, recording every requirement of the end-to-end guarantee
// as a named check.

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "dpattn/attention.h"
#include "dpattn/dataset.h"
#include "dpattn/errors.h"
#include "dpattn/linalg.h"
#include "dpattn/mechanism.h"
#include "dpattn/privacy.h"
#include "dpattn/status_macros.h"

namespace dpattn {

struct DpParams {
  double eps = 0.05;
  double delta_dp = 0.01;
  double gamma = 0.05;
  std::int64_t k = 1;
  double r = 0.05;
  FKind f_kind = FKind::kExp;
  double c_rho = 1;
  std::uint64_t seed = 0;

  // Structural validity. The narrower ranges eps, delta, r in (0, 0.1) are
  // requirements of the guarantee and are reported as checks instead.
  absl::Status Validate() const {
    if (!(eps > 0 && eps < 1)) return ParamRangeError("eps outside (0, 1)");
    if (!(delta_dp > 0 && delta_dp < 1)) {
      return ParamRangeError("delta outside (0, 1)");
    }
    if (!(gamma > 0 && gamma < 1)) {
      return ParamRangeError("gamma outside (0, 1)");
    }
    if (k < 1) return ParamRangeError("k must be >= 1");
    if (!(r > 0)) return ParamRangeError("r must be > 0");
    if (!(c_rho > 0)) return ParamRangeError("C_rho must be > 0");
    return absl::OkStatus();
  }
};

enum class CheckKind {
  // Precondition of the guarantee; failing it voids certification.
  kRequirement,
  // Reported only.
  kWarning,
  // Property of this particular release.
  kOutcome,
};

struct RequirementCheck {
  std::string name;
  CheckKind kind = CheckKind::kRequirement;
  bool pass = false;
  // Empty when the quantity could not be computed (e.g. singular B).
  std::optional<double> measured;
  double required = 0;
};

struct DpAttentionReport {
  DpParams params;
  int n = 0;
  int d = 0;
  SymMatrix a = SymMatrix::Zero(1);
  SymMatrix b = SymMatrix::Zero(1);
  Eigen::MatrixXd attention_a;
  Eigen::MatrixXd attention_b;
  double measured_error = 0;
  // 4 (1 + eps + 2r) r.
  double error_bound = 0;
  double rho = 0;
  DeltaBudget delta_budget;
  double delta_budget_used = 0;
  double sensitivity_bound_frob = 0;
  std::optional<double> rel_frob_error;
  std::vector<RequirementCheck> requirement_checks;
  std::vector<std::string> warnings;
  bool requirements_met = false;
  // (1 - eps) B <= A <= (1 + eps) B; holds with probability >= 1 - gamma.
  bool loewner_event = false;
  bool bound_satisfied = false;
  bool singular_estimate = false;
  bool psd_projected = false;
  // All requirement and outcome checks pass.
  bool certified = false;

  const RequirementCheck* check(std::string_view name) const {
    for (const RequirementCheck& c : requirement_checks) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }
  // Name of the first failing requirement or outcome check, or "".
  std::string first_failure() const {
    for (const RequirementCheck& c : requirement_checks) {
      if (!c.pass && c.kind != CheckKind::kWarning) return c.name;
    }
    return "";
  }
};

inline absl::StatusOr<DpAttentionReport> DpAttention(const Dataset& x,
                                                     double beta,
                                                     const DpParams& params) {
  DPATTN_RETURN_IF_ERROR(params.Validate());
  if (!(beta >= 0)) return ParamRangeError("beta must be >= 0");
  DpAttentionReport report;
  report.params = params;
  report.n = x.n();
  report.d = x.d();
  const int n = x.n();
  const double eps = params.eps;
  const double r = params.r;
  auto add = [&report](std::string name, CheckKind kind, bool pass,
                       std::optional<double> measured, double required) {
    report.requirement_checks.push_back(
        {std::move(name), kind, pass, measured, required});
  };

  report.a = Gram(x.matrix());
  DPATTN_ASSIGN_OR_RETURN(const SpectralDecomposition a_spec,
                          SymEigendecompose(report.a));

  add("d_ge_n", CheckKind::kRequirement, x.d() >= n, x.d(), n);
  add("eps_range", CheckKind::kRequirement, eps > 0 && eps < 0.1, eps, 0.1);
  add("delta_range", CheckKind::kRequirement,
      params.delta_dp > 0 && params.delta_dp < 0.1, params.delta_dp, 0.1);
  add("r_range", CheckKind::kRequirement, r > 0 && r < 0.1, r, 0.1);
  add("good_dataset", CheckKind::kRequirement,
      a_spec.min_eigenvalue() >= x.eta() - kGoodnessTolerance,
      a_spec.min_eigenvalue(), x.eta());
  const double a_max = EntrywiseMax(report.a.matrix());
  add("entry_bound", CheckKind::kRequirement, a_max <= r, a_max, r);
  add("eta_lt_r", CheckKind::kWarning, x.eta() < r, x.eta(), r);
  if (!(x.eta() < r)) report.warnings.push_back("eta_lt_r");

  DPATTN_ASSIGN_OR_RETURN(
      report.delta_budget,
      ComputeDeltaBudget(eps, params.delta_dp, static_cast<double>(params.k)));
  report.delta_budget_used = report.delta_budget.min();
  DPATTN_ASSIGN_OR_RETURN(const SensitivityValues sens_bound,
                          SensitivityBound(x.eta(), x.alpha(), beta, n));
  report.sensitivity_bound_frob = sens_bound.frobenius;
  add("sensitivity", CheckKind::kRequirement,
      sens_bound.frobenius < report.delta_budget_used, sens_bound.frobenius,
      report.delta_budget_used);

  DPATTN_ASSIGN_OR_RETURN(
      report.rho,
      UtilityRho(n, params.gamma, static_cast<double>(params.k), params.c_rho));
  add("utility", CheckKind::kRequirement, report.rho < 0.1 * eps, report.rho,
      0.1 * eps);
  // mu in [1 - rho, 1 + rho] implies 1 / mu in [1 / (1 + rho), 1 / (1 - rho)],
  // which lies inside [1 - eps, 1 + eps] iff rho / (1 - rho) <= eps.
  const double inverted_radius = report.rho < 1
                                     ? report.rho / (1 - report.rho)
                                     : std::numeric_limits<double>::infinity();
  add("rho_to_eps", CheckKind::kRequirement, inverted_radius <= eps,
      std::isfinite(inverted_radius) ? std::optional<double>(inverted_radius)
                                     : std::nullopt,
      eps);

  DPATTN_ASSIGN_OR_RETURN(
      const MechanismOutput released,
      GaussianSamplingMechanism(report.a, params.k, params.seed));
  report.rel_frob_error = released.rel_frob_error;
  report.singular_estimate = released.singular_estimate;
  if (report.singular_estimate) report.warnings.push_back("SingularEstimate");
  report.b = released.sigma_hat;
  DPATTN_ASSIGN_OR_RETURN(const SpectralDecomposition b_spec,
                          SymEigendecompose(report.b));
  if (b_spec.min_eigenvalue() < 0) {
    report.b = b_spec.Apply([](double v) { return std::max(v, 0.0); });
    report.psd_projected = true;
    report.warnings.push_back("PsdProjected");
  }

  constexpr double kLoewnerTolerance = 1e-12;
  absl::StatusOr<Eigen::VectorXd> mu =
      WhitenedEigenvalues(report.a, report.b, kLoewnerTolerance);
  std::optional<double> loewner_radius;
  if (mu.ok()) {
    loewner_radius = std::max(mu->maxCoeff() - 1, 1 - mu->minCoeff());
  }
  report.loewner_event = loewner_radius.has_value() && *loewner_radius <= eps;
  add("loewner", CheckKind::kOutcome, report.loewner_event, loewner_radius,
      eps);

  DPATTN_ASSIGN_OR_RETURN(report.attention_a,
                          AttentionMatrix(report.a, params.f_kind));
  DPATTN_ASSIGN_OR_RETURN(report.attention_b,
                          AttentionMatrix(report.b, params.f_kind));
  report.measured_error = EntrywiseMax(report.attention_a - report.attention_b);
  report.error_bound = 4 * (1 + eps + 2 * r) * r;
  report.bound_satisfied = report.measured_error <= report.error_bound;
  add("error_bound", CheckKind::kOutcome, report.bound_satisfied,
      report.measured_error, report.error_bound);

  report.requirements_met = true;
  report.certified = true;
  for (const RequirementCheck& check : report.requirement_checks) {
    if (check.pass || check.kind == CheckKind::kWarning) continue;
    report.certified = false;
    if (check.kind == CheckKind::kRequirement) report.requirements_met = false;
  }
  return report;
}

// Certificate for releasing from gram(base) instead of gram(perturbed), plus a
// Monte-Carlo estimate of Pr[Z > eps] over `trials` draws.
inline absl::StatusOr<CertificateReport> VerifyNeighborPrivacy(
    const NeighborPair& pair, double eps, double delta_dp, std::int64_t k,
    std::int64_t trials, std::uint64_t seed) {
  const SymMatrix base = Gram(pair.base().matrix());
  const SymMatrix perturbed = Gram(pair.perturbed());
  DPATTN_ASSIGN_OR_RETURN(const PrivacySpectrum spectrum,
                          ComputePrivacySpectrum(base, perturbed));
  DPATTN_ASSIGN_OR_RETURN(CertificateReport report,
                          DpCertificate(spectrum, eps, delta_dp, k));
  DPATTN_ASSIGN_OR_RETURN(report.monte_carlo,
                          McPrivacyVerify(spectrum, k, eps, trials, seed));
  return report;
}

inline absl::StatusOr<CertificateReport> VerifyNeighborPrivacy(
    const NeighborPair& pair, const DpParams& params, std::int64_t trials) {
  return VerifyNeighborPrivacy(pair, params.eps, params.delta_dp, params.k,
                               trials, params.seed);
}

}  // namespace dpattn

#endif  // DPATTN_PIPELINE_H_
