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

#ifndef DPATTN_ATTENTION_H_
#define DPATTN_ATTENTION_H_

// The attention map D(A)^{-1} f(A) for f in {exp, cosh}, where f is applied
// entrywise and D(A) = diag(f(A) 1), together with a checker for the
// deterministic perturbation chain that bounds how far the attention matrix
// moves when A is replaced by a Loewner-close B.
//
// Throughout, ||.||_inf of a matrix is the entrywise max-absolute-value.

#include <array>
#include <cmath>
#include <string>
#include <string_view>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "dpattn/errors.h"
#include "dpattn/linalg.h"
#include "dpattn/status_macros.h"

namespace dpattn {

enum class FKind { kExp, kCosh };

inline std::string_view FKindName(FKind kind) {
  return kind == FKind::kExp ? "exp" : "cosh";
}

inline absl::StatusOr<FKind> ParseFKind(std::string_view name) {
  if (name == "exp") return FKind::kExp;
  if (name == "cosh") return FKind::kCosh;
  return absl::InvalidArgumentError("unknown f '" + std::string(name) +
                                    "', expected exp or cosh");
}

inline absl::StatusOr<double> ApplyF(double z, FKind kind) {
  if (!std::isfinite(z)) return InvalidMatrixError("non-finite argument");
  const double value = kind == FKind::kExp ? std::exp(z) : std::cosh(z);
  if (!std::isfinite(value)) {
    return OverflowError(std::string(FKindName(kind)) + "(" +
                         std::to_string(z) + ")");
  }
  return value;
}

// f applied entrywise. The result is symmetric because f(M) inherits the
// exact symmetry of M.
inline absl::StatusOr<SymMatrix> EntrywiseF(const SymMatrix& m, FKind kind) {
  if (!m.IsFinite()) return InvalidMatrixError("non-finite entries");
  Eigen::MatrixXd mapped;
  if (kind == FKind::kExp) {
    mapped = m.matrix().array().exp().matrix();
  } else {
    mapped = m.matrix().array().cosh().matrix();
  }
  if (!mapped.allFinite()) {
    return OverflowError(std::string(FKindName(kind)) +
                         " overflows on an entry of magnitude " +
                         std::to_string(EntrywiseMax(m.matrix())));
  }
  return SymMatrix(mapped);
}

// Row sums of f(M), i.e. the diagonal of D(M).
inline absl::StatusOr<Eigen::VectorXd> NormalizerD(const SymMatrix& m,
                                                   FKind kind) {
  DPATTN_ASSIGN_OR_RETURN(const SymMatrix fm, EntrywiseF(m, kind));
  return Eigen::VectorXd(fm.matrix().rowwise().sum());
}

// D(M)^{-1} f(M). Rows sum to one; the result is not symmetric in general.
inline absl::StatusOr<Eigen::MatrixXd> AttentionMatrix(const SymMatrix& m,
                                                       FKind kind) {
  DPATTN_ASSIGN_OR_RETURN(const SymMatrix fm, EntrywiseF(m, kind));
  const Eigen::VectorXd d = fm.matrix().rowwise().sum();
  return Eigen::MatrixXd(d.cwiseInverse().asDiagonal() * fm.matrix());
}

// ||D(A)^{-1} f(A) - D(B)^{-1} f(B)||_inf (entrywise).
inline absl::StatusOr<double> AttentionError(const SymMatrix& a,
                                             const SymMatrix& b, FKind kind) {
  if (a.dim() != b.dim()) {
    return DimMismatchError(std::to_string(a.dim()) + " vs " +
                            std::to_string(b.dim()));
  }
  DPATTN_ASSIGN_OR_RETURN(const Eigen::MatrixXd att_a,
                          AttentionMatrix(a, kind));
  DPATTN_ASSIGN_OR_RETURN(const Eigen::MatrixXd att_b,
                          AttentionMatrix(b, kind));
  return EntrywiseMax(att_a - att_b);
}

inline absl::Status CheckErrorChainRange(double eps, double r) {
  if (!(eps > 0 && eps < 0.1)) {
    return ParamRangeError("eps=" + std::to_string(eps) + " outside (0, 0.1)");
  }
  if (!(r > 0 && r < 0.1)) {
    return ParamRangeError("r=" + std::to_string(r) + " outside (0, 0.1)");
  }
  return absl::OkStatus();
}

// The common lemma constant c = 2 + 2 eps + 4 r (entry, normalizer and
// attention stages all use it).
inline double ChainConstant(double eps, double r) {
  return 2 + 2 * eps + 4 * r;
}

// 4 (1 + eps + 2r) r, the attention error bound. eps, r in (0, 0.1).
inline absl::StatusOr<double> TheoreticalErrorBound(double eps, double r) {
  DPATTN_RETURN_IF_ERROR(CheckErrorChainRange(eps, r));
  return 4 * (1 + eps + 2 * r) * r;
}

struct AttentionErrorReport {
  double measured_inf_norm = 0;
  double bound = 0;
  double r = 0;
  double eps = 0;
  bool within_bound() const { return measured_inf_norm <= bound; }
};

inline absl::StatusOr<AttentionErrorReport> MeasureAttentionError(
    const SymMatrix& a, const SymMatrix& b, double eps, double r, FKind kind) {
  AttentionErrorReport report{.r = r, .eps = eps};
  DPATTN_ASSIGN_OR_RETURN(report.bound, TheoreticalErrorBound(eps, r));
  DPATTN_ASSIGN_OR_RETURN(report.measured_inf_norm, AttentionError(a, b, kind));
  return report;
}

struct ChainStage {
  std::string name;
  double measured = 0;
  double bound = 0;
  bool pass = false;
};

// Stages, in order:
//   entry_bound:    max |B_ij|                              vs (1 + eps) r
//   f_perturbation: max |f(A_ij) - f(B_ij)| / min(f(A_ij), f(B_ij))
//                                                           vs c r
//   normalizer:     max |D(A)_i - D(B)_i| / min(D(A)_i, D(B)_i)
//                                                           vs c r
//   attention:      ||D(A)^{-1} f(A) - D(B)^{-1} f(B)||_inf vs 2 c r
// with c = 2 + 2 eps + 4 r.
//
// The entry stage also records `entry_bound_exact`, r / (1 - eps), which is the
// largest |B_ij| the Loewner sandwich actually permits: B <= A / (1 - eps)
// gives B_ii <= r / (1 - eps), and that is attained by B = A / (1 - eps).
// (1 + eps) r is smaller than r / (1 - eps) by r eps^2 / (1 - eps), so the
// entry stage can fail at the edge of the admissible set even though the
// later stages have ample slack.
struct ChainReport {
  std::array<ChainStage, 4> stages;
  double entry_bound_exact = 0;

  bool all_pass() const {
    for (const ChainStage& stage : stages) {
      if (!stage.pass) return false;
    }
    return true;
  }
  const ChainStage& stage(std::string_view name) const {
    for (const ChainStage& s : stages) {
      if (s.name == name) return s;
    }
    return stages[0];
  }
};

// Evaluates the perturbation chain for A, B. Preconditions (checked, in this
// order, each reported as PreconditionFailed naming the requirement):
// eps, r in (0, 0.1); ||A||_inf <= r; A and B PSD; (1 - eps) B <= A <=
// (1 + eps) B. `tol` is the PSD / Loewner tolerance.
inline absl::StatusOr<ChainReport> LemmaChainCheck(const SymMatrix& a,
                                                   const SymMatrix& b,
                                                   double eps, double r,
                                                   FKind kind,
                                                   double tol = 1e-9) {
  if (a.dim() != b.dim()) {
    return DimMismatchError(std::to_string(a.dim()) + " vs " +
                            std::to_string(b.dim()));
  }
  if (absl::Status range = CheckErrorChainRange(eps, r); !range.ok()) {
    return PreconditionFailedError("parameter range: " +
                                   std::string(range.message()));
  }
  const double a_max = EntrywiseMax(a.matrix());
  if (!(a_max <= r)) {
    return PreconditionFailedError(
        "entry bound: ||A||_inf=" + std::to_string(a_max) +
        " > r=" + std::to_string(r));
  }
  DPATTN_ASSIGN_OR_RETURN(const bool a_psd, IsPsd(a, tol));
  DPATTN_ASSIGN_OR_RETURN(const bool b_psd, IsPsd(b, tol));
  if (!a_psd || !b_psd) {
    return PreconditionFailedError(a_psd ? "psd: B is not PSD"
                                         : "psd: A is not PSD");
  }
  absl::StatusOr<bool> sandwich = LoewnerWithin(a, b, eps, tol);
  if (!sandwich.ok() || !*sandwich) {
    return PreconditionFailedError(
        "loewner: (1-eps)B <= A <= (1+eps)B does not hold" +
        (sandwich.ok()
             ? std::string()
             : " (" + std::string(sandwich.status().message()) + ")"));
  }

  const double c = ChainConstant(eps, r);
  DPATTN_ASSIGN_OR_RETURN(const SymMatrix fa, EntrywiseF(a, kind));
  DPATTN_ASSIGN_OR_RETURN(const SymMatrix fb, EntrywiseF(b, kind));
  const Eigen::ArrayXXd fa_arr = fa.matrix().array();
  const Eigen::ArrayXXd fb_arr = fb.matrix().array();
  const double f_ratio =
      ((fa_arr - fb_arr).abs() / fa_arr.min(fb_arr)).maxCoeff();
  const Eigen::ArrayXd da = fa_arr.rowwise().sum();
  const Eigen::ArrayXd db = fb_arr.rowwise().sum();
  const double d_ratio = ((da - db).abs() / da.min(db)).maxCoeff();
  DPATTN_ASSIGN_OR_RETURN(const double att, AttentionError(a, b, kind));

  ChainReport report;
  const double b_max = EntrywiseMax(b.matrix());
  report.stages[0] = {"entry_bound", b_max, (1 + eps) * r,
                      b_max <= (1 + eps) * r};
  report.stages[1] = {"f_perturbation", f_ratio, c * r, f_ratio <= c * r};
  report.stages[2] = {"normalizer", d_ratio, c * r, d_ratio <= c * r};
  report.stages[3] = {"attention", att, 2 * c * r, att <= 2 * c * r};
  report.entry_bound_exact = r / (1 - eps);
  return report;
}

}  // namespace dpattn

#endif  // DPATTN_ATTENTION_H_
