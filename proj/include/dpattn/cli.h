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

#ifndef DPATTN_CLI_H_
#define DPATTN_CLI_H_

// Command implementations behind `dpattn <command> --config <path> [--out
// <dir>]`. Each command reads one JSON config, writes its outputs under the
// output directory and returns the process exit code:
//   0  success / certified
//   1  a requirement or certificate failed
//   2  input, parse or I/O error
// Relative paths inside a config resolve against the config's directory.

#include <cstdint>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dpattn/attention.h"
#include "dpattn/dataset.h"
#include "dpattn/experiments.h"
#include "dpattn/io.h"
#include "dpattn/mechanism.h"
#include "dpattn/pipeline.h"
#include "dpattn/privacy.h"
#include "dpattn/random.h"
#include "dpattn/status_macros.h"
#include "json.hpp"

namespace dpattn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitInputError = 2;
inline constexpr int kSchemaVersion = 1;

using nlohmann::json;
namespace fs = std::filesystem;

inline std::string RngName() {
  return std::string(kRandomStreamName) + "/v" +
         std::to_string(kRandomStreamVersion);
}

inline json ReportHeader(std::string_view command) {
  json out;
  out["schema_version"] = kSchemaVersion;
  out["command"] = command;
  out["rng"] = RngName();
  return out;
}

inline std::string Dump(const json& j) { return j.dump(2) + "\n"; }

inline json OptionalToJson(const std::optional<double>& v) {
  return v.has_value() ? json(*v) : json(nullptr);
}

inline std::string_view CheckKindName(CheckKind kind) {
  switch (kind) {
    case CheckKind::kRequirement:
      return "requirement";
    case CheckKind::kWarning:
      return "warning";
    case CheckKind::kOutcome:
      return "outcome";
  }
  return "unknown";
}

inline json DpAttentionReportToJson(const DpAttentionReport& report,
                                    double beta, double eta, double alpha) {
  json out = ReportHeader("dp-attention");
  const DpParams& p = report.params;
  out["params"] = {{"eps", p.eps},     {"delta", p.delta_dp},
                   {"gamma", p.gamma}, {"k", p.k},
                   {"r", p.r},         {"f", FKindName(p.f_kind)},
                   {"c_rho", p.c_rho}, {"seed", p.seed},
                   {"beta", beta}};
  out["dataset"] = {
      {"n", report.n}, {"d", report.d}, {"eta", eta}, {"alpha", alpha}};
  out["certified"] = report.certified;
  out["requirements_met"] = report.requirements_met;
  out["loewner_event"] = report.loewner_event;
  out["bound_satisfied"] = report.bound_satisfied;
  out["singular_estimate"] = report.singular_estimate;
  out["psd_projected"] = report.psd_projected;
  out["first_failure"] = report.first_failure();
  out["measured_error"] = report.measured_error;
  out["error_bound"] = report.error_bound;
  out["rho"] = report.rho;
  out["rel_frob_error"] = OptionalToJson(report.rel_frob_error);
  out["delta_budget"] = {{"definition", report.delta_budget.definition_delta},
                         {"theorem", report.delta_budget.theorem_delta},
                         {"used", report.delta_budget_used}};
  out["sensitivity_bound_frob"] = report.sensitivity_bound_frob;
  json checks = json::array();
  for (const RequirementCheck& c : report.requirement_checks) {
    checks.push_back({{"name", c.name},
                      {"kind", CheckKindName(c.kind)},
                      {"pass", c.pass},
                      {"measured", OptionalToJson(c.measured)},
                      {"required", c.required}});
  }
  out["requirement_checks"] = std::move(checks);
  out["warnings"] = report.warnings;
  out["A"] = MatrixToJson(report.a.matrix());
  out["B"] = MatrixToJson(report.b.matrix());
  out["attention_A"] = MatrixToJson(report.attention_a);
  out["attention_B"] = MatrixToJson(report.attention_b);
  return out;
}

inline json CertificateReportToJson(const CertificateReport& report) {
  json out = ReportHeader("verify-privacy");
  out["params"] = {
      {"eps", report.eps}, {"delta", report.delta_dp}, {"k", report.k}};
  out["granted"] = report.granted;
  out["reason"] = CertificateReasonName(report.reason);
  out["m_sens"] = report.m_sens;
  out["delta_budget"] = {{"definition", report.budget.definition_delta},
                         {"theorem", report.budget.theorem_delta},
                         {"used", report.budget.min()}};
  out["within_definition_delta"] = report.within_definition_delta;
  out["within_theorem_delta"] = report.within_theorem_delta;
  out["expected_loss"] = report.expected_loss;
  out["expectation_ok"] = report.expectation_ok;
  out["sub_exponential"] = {{"nu", report.params.nu},
                            {"alpha", report.params.alpha_se},
                            {"mean", report.params.mean}};
  out["tail_bound_at_half_eps"] = report.tail;
  out["tail_ok"] = report.tail_ok;
  if (report.monte_carlo.has_value()) {
    const MonteCarloResult& mc = *report.monte_carlo;
    out["monte_carlo"] = {{"trials", mc.trials},
                          {"exceedances", mc.exceedances},
                          {"empirical_rate", mc.empirical_rate},
                          {"wilson_upper_99", mc.wilson_upper}};
  }
  return out;
}

namespace internal {

inline absl::StatusOr<json> LoadConfig(const fs::path& path) {
  DPATTN_ASSIGN_OR_RETURN(const std::string text, ReadFile(path));
  json parsed = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded()) {
    return absl::InvalidArgumentError(path.string() + ": malformed JSON");
  }
  return parsed;
}

inline fs::path Resolve(const fs::path& config_dir, const std::string& path) {
  const fs::path p(path);
  return p.is_absolute() ? p : config_dir / p;
}

inline int Fail(std::ostream& err, const absl::Status& status) {
  err << "error: " << status.message() << "\n";
  return kExitInputError;
}

inline absl::Status CheckPositive(const ConfigReader& cfg,
                                  const std::string& key, double value) {
  if (!(value > 0)) {
    return absl::InvalidArgumentError(cfg.context() + ": '" + key +
                                      "' must be > 0");
  }
  return absl::OkStatus();
}

// Reads a CSV dataset and validates (eta, alpha)-goodness and d >= n.
inline absl::StatusOr<Dataset> LoadDataset(const fs::path& path, double eta,
                                           double alpha) {
  DPATTN_ASSIGN_OR_RETURN(Eigen::MatrixXd x, ReadMatrixCsv(path));
  absl::StatusOr<Dataset> dataset = Dataset::Create(std::move(x), eta, alpha);
  if (!dataset.ok()) {
    return absl::Status(
        dataset.status().code(),
        path.string() + ": " + std::string(dataset.status().message()));
  }
  return dataset;
}

}  // namespace internal

// Config: {"n", "d", "eta", "alpha", "seed", optional "name" (file stem,
// default "dataset"), optional "neighbor": {"beta", "index", "seed"}}.
// Writes <name>.csv, <name>.json (sidecar) and, with "neighbor",
// <name>_neighbor.csv.
inline int RunGenDataset(const json& config, const fs::path& out_dir,
                         std::ostream& err) {
  const ConfigReader cfg(config, "gen-dataset config");
  auto body = [&]() -> absl::StatusOr<int> {
    DPATTN_RETURN_IF_ERROR(
        cfg.CheckKeys({"n", "d", "eta", "alpha", "seed", "name", "neighbor"}));
    DPATTN_ASSIGN_OR_RETURN(const std::int64_t n, cfg.Int("n"));
    DPATTN_ASSIGN_OR_RETURN(const std::int64_t d, cfg.Int("d"));
    DPATTN_ASSIGN_OR_RETURN(const double eta, cfg.Double("eta"));
    DPATTN_ASSIGN_OR_RETURN(const double alpha, cfg.Double("alpha"));
    DPATTN_ASSIGN_OR_RETURN(const std::uint64_t seed, cfg.Seed("seed"));
    DPATTN_ASSIGN_OR_RETURN(const std::string name,
                            cfg.String("name", "dataset"));
    if (n < 1 || n > 4096 || d < 1 || d > (1 << 20)) {
      return absl::InvalidArgumentError(
          "gen-dataset config: n or d out of supported range");
    }
    DPATTN_RETURN_IF_ERROR(internal::CheckPositive(cfg, "eta", eta));
    DPATTN_RETURN_IF_ERROR(internal::CheckPositive(cfg, "alpha", alpha));

    std::optional<NeighborPair> neighbor;
    json sidecar = ReportHeader("gen-dataset");
    sidecar["n"] = n;
    sidecar["d"] = d;
    sidecar["eta"] = eta;
    sidecar["alpha"] = alpha;
    sidecar["seed"] = seed;
    sidecar["csv"] = name + ".csv";

    DPATTN_ASSIGN_OR_RETURN(
        const Dataset dataset,
        GenerateGoodDataset(static_cast<int>(n), static_cast<int>(d), eta,
                            alpha, seed));
    if (cfg.Has("neighbor")) {
      const ConfigReader ncfg(config.at("neighbor"), "gen-dataset neighbor");
      DPATTN_RETURN_IF_ERROR(ncfg.CheckKeys({"beta", "index", "seed"}));
      DPATTN_ASSIGN_OR_RETURN(const double beta, ncfg.Double("beta"));
      DPATTN_ASSIGN_OR_RETURN(const std::int64_t index, ncfg.Int("index"));
      DPATTN_ASSIGN_OR_RETURN(const std::uint64_t nseed, ncfg.Seed("seed"));
      if (index < 0 || index >= d) {
        return absl::InvalidArgumentError(
            "gen-dataset neighbor: index outside [0, d)");
      }
      DPATTN_ASSIGN_OR_RETURN(
          neighbor,
          MakeNeighbor(dataset, beta, static_cast<int>(index), nseed));
      sidecar["neighbor"] = {{"beta", beta},
                             {"index", index},
                             {"seed", nseed},
                             {"csv", name + "_neighbor.csv"}};
    }
    DPATTN_RETURN_IF_ERROR(
        WriteFile(out_dir / (name + ".csv"), MatrixToCsv(dataset.matrix())));
    if (neighbor.has_value()) {
      DPATTN_RETURN_IF_ERROR(WriteFile(out_dir / (name + "_neighbor.csv"),
                                       MatrixToCsv(neighbor->perturbed())));
    }
    DPATTN_RETURN_IF_ERROR(
        WriteFile(out_dir / (name + ".json"), Dump(sidecar)));
    return kExitOk;
  };
  absl::StatusOr<int> result = body();
  return result.ok() ? *result : internal::Fail(err, result.status());
}

// Config: {"dataset" (CSV path), "eta", "alpha", "beta", "eps", "delta",
// "gamma", "r", "f" ("exp" | "cosh"), "seed", exactly one of "k" or
// "rho_target", optional "c_rho" (default 1)}. Writes
// dp_attention_report.json; exit 0 iff certified.
inline int RunDpAttention(const json& config, const fs::path& config_dir,
                          const fs::path& out_dir, std::ostream& err) {
  const ConfigReader cfg(config, "dp-attention config");
  auto body = [&]() -> absl::StatusOr<int> {
    DPATTN_RETURN_IF_ERROR(
        cfg.CheckKeys({"dataset", "eta", "alpha", "beta", "eps", "delta",
                       "gamma", "r", "f", "seed", "k", "rho_target", "c_rho"}));
    DPATTN_ASSIGN_OR_RETURN(const std::string dataset_path,
                            cfg.String("dataset"));
    DPATTN_ASSIGN_OR_RETURN(const double eta, cfg.Double("eta"));
    DPATTN_ASSIGN_OR_RETURN(const double alpha, cfg.Double("alpha"));
    DPATTN_ASSIGN_OR_RETURN(const double beta, cfg.Double("beta"));
    DpParams params;
    DPATTN_ASSIGN_OR_RETURN(params.eps, cfg.Double("eps"));
    DPATTN_ASSIGN_OR_RETURN(params.delta_dp, cfg.Double("delta"));
    DPATTN_ASSIGN_OR_RETURN(params.gamma, cfg.Double("gamma"));
    DPATTN_ASSIGN_OR_RETURN(params.r, cfg.Double("r"));
    DPATTN_ASSIGN_OR_RETURN(const std::string f_name, cfg.String("f"));
    DPATTN_ASSIGN_OR_RETURN(params.f_kind, ParseFKind(f_name));
    DPATTN_ASSIGN_OR_RETURN(params.seed, cfg.Seed("seed"));
    DPATTN_ASSIGN_OR_RETURN(params.c_rho, cfg.Double("c_rho", 1.0));
    DPATTN_RETURN_IF_ERROR(internal::CheckPositive(cfg, "eta", eta));
    DPATTN_RETURN_IF_ERROR(internal::CheckPositive(cfg, "alpha", alpha));
    if (!(beta >= 0)) {
      return absl::InvalidArgumentError(
          "dp-attention config: 'beta' must be >= 0");
    }
    if (cfg.Has("k") == cfg.Has("rho_target")) {
      return absl::InvalidArgumentError(
          "dp-attention config: give exactly one of 'k' and 'rho_target'");
    }
    DPATTN_ASSIGN_OR_RETURN(
        const Dataset dataset,
        internal::LoadDataset(internal::Resolve(config_dir, dataset_path), eta,
                              alpha));
    if (cfg.Has("k")) {
      DPATTN_ASSIGN_OR_RETURN(params.k, cfg.Int("k"));
    } else {
      DPATTN_ASSIGN_OR_RETURN(const double rho_target,
                              cfg.Double("rho_target"));
      DPATTN_ASSIGN_OR_RETURN(params.k, RequiredK(dataset.n(), params.gamma,
                                                  rho_target, params.c_rho));
    }
    DPATTN_RETURN_IF_ERROR(params.Validate());
    DPATTN_ASSIGN_OR_RETURN(const DpAttentionReport report,
                            DpAttention(dataset, beta, params));
    DPATTN_RETURN_IF_ERROR(
        WriteFile(out_dir / "dp_attention_report.json",
                  Dump(DpAttentionReportToJson(report, beta, eta, alpha))));
    if (!report.certified) {
      err << "not certified: check '" << report.first_failure() << "' failed\n";
      return kExitFailed;
    }
    return kExitOk;
  };
  absl::StatusOr<int> result = body();
  return result.ok() ? *result : internal::Fail(err, result.status());
}

// Config: {"base", "perturbed" (CSV paths), "eta", "alpha", "beta", "eps",
// "delta", "k", "trials" (>= 1000), "seed"}. Writes privacy_report.json and
// z_samples.csv; exit 0 iff the certificate is granted and the empirical
// Pr[Z > eps] is at most delta.
inline int RunVerifyPrivacy(const json& config, const fs::path& config_dir,
                            const fs::path& out_dir, std::ostream& err) {
  const ConfigReader cfg(config, "verify-privacy config");
  auto body = [&]() -> absl::StatusOr<int> {
    DPATTN_RETURN_IF_ERROR(
        cfg.CheckKeys({"base", "perturbed", "eta", "alpha", "beta", "eps",
                       "delta", "k", "trials", "seed"}));
    DPATTN_ASSIGN_OR_RETURN(const std::string base_path, cfg.String("base"));
    DPATTN_ASSIGN_OR_RETURN(const std::string perturbed_path,
                            cfg.String("perturbed"));
    DPATTN_ASSIGN_OR_RETURN(const double eta, cfg.Double("eta"));
    DPATTN_ASSIGN_OR_RETURN(const double alpha, cfg.Double("alpha"));
    DPATTN_ASSIGN_OR_RETURN(const double beta, cfg.Double("beta"));
    DPATTN_ASSIGN_OR_RETURN(const double eps, cfg.Double("eps"));
    DPATTN_ASSIGN_OR_RETURN(const double delta_dp, cfg.Double("delta"));
    DPATTN_ASSIGN_OR_RETURN(const std::int64_t k, cfg.Int("k"));
    DPATTN_ASSIGN_OR_RETURN(const std::int64_t trials, cfg.Int("trials"));
    DPATTN_ASSIGN_OR_RETURN(const std::uint64_t seed, cfg.Seed("seed"));
    if (trials < kMinPrivacyTrials) {
      return absl::InvalidArgumentError(
          "verify-privacy config: 'trials' must be >= " +
          std::to_string(kMinPrivacyTrials));
    }
    if (k < 1) {
      return absl::InvalidArgumentError(
          "verify-privacy config: 'k' must be >= 1");
    }
    DPATTN_RETURN_IF_ERROR(CheckPrivacyRange(eps, delta_dp));
    DPATTN_RETURN_IF_ERROR(internal::CheckPositive(cfg, "eta", eta));
    DPATTN_RETURN_IF_ERROR(internal::CheckPositive(cfg, "alpha", alpha));
    DPATTN_ASSIGN_OR_RETURN(
        Dataset base,
        internal::LoadDataset(internal::Resolve(config_dir, base_path), eta,
                              alpha));
    DPATTN_ASSIGN_OR_RETURN(
        Eigen::MatrixXd perturbed,
        ReadMatrixCsv(internal::Resolve(config_dir, perturbed_path)));
    DPATTN_ASSIGN_OR_RETURN(
        const NeighborPair pair,
        NeighborPair::Create(std::move(base), std::move(perturbed), beta));
    DPATTN_ASSIGN_OR_RETURN(
        const CertificateReport report,
        VerifyNeighborPrivacy(pair, eps, delta_dp, k, trials, seed));

    json out = CertificateReportToJson(report);
    out["pair"] = {{"beta", beta},
                   {"index", pair.index().has_value() ? json(*pair.index())
                                                      : json(nullptr)}};
    out["seed"] = seed;
    DPATTN_RETURN_IF_ERROR(
        WriteFile(out_dir / "privacy_report.json", Dump(out)));
    std::string samples = "trial,z\n";
    const std::vector<double>& z = report.monte_carlo->samples;
    for (std::size_t t = 0; t < z.size(); ++t) {
      samples += std::to_string(t);
      samples += ',';
      samples += FormatDouble(z[t]);
      samples += '\n';
    }
    DPATTN_RETURN_IF_ERROR(WriteFile(out_dir / "z_samples.csv", samples));
    const bool empirical_ok = report.monte_carlo->empirical_rate <= delta_dp;
    if (!report.granted || !empirical_ok) {
      err << "privacy not verified: "
          << (report.granted ? "empirical rate exceeds delta"
                             : CertificateReasonName(report.reason))
          << "\n";
      return kExitFailed;
    }
    return kExitOk;
  };
  absl::StatusOr<int> result = body();
  return result.ok() ? *result : internal::Fail(err, result.status());
}

// Config: {"n", "ks" (array), "trials", "seed", optional "sigma" ("random" |
// "identity", default "random"), optional "condition_number" (default 10)}.
// Writes bench_utility.csv with rows (n, k, trial, rel_frob_error) followed by
// one (n, k, median, value) summary row per k.
inline int RunBenchUtility(const json& config, const fs::path& out_dir,
                           std::ostream& err) {
  const ConfigReader cfg(config, "bench-utility config");
  auto body = [&]() -> absl::StatusOr<int> {
    DPATTN_RETURN_IF_ERROR(cfg.CheckKeys(
        {"n", "ks", "trials", "seed", "sigma", "condition_number"}));
    DPATTN_ASSIGN_OR_RETURN(const std::int64_t n, cfg.Int("n"));
    DPATTN_ASSIGN_OR_RETURN(const std::vector<std::int64_t> ks,
                            cfg.IntList("ks"));
    DPATTN_ASSIGN_OR_RETURN(const std::int64_t trials, cfg.Int("trials"));
    DPATTN_ASSIGN_OR_RETURN(const std::uint64_t seed, cfg.Seed("seed"));
    DPATTN_ASSIGN_OR_RETURN(const std::string sigma_kind,
                            cfg.String("sigma", "random"));
    DPATTN_ASSIGN_OR_RETURN(const double condition_number,
                            cfg.Double("condition_number", 10.0));
    if (n < 1 || n > 4096) {
      return absl::InvalidArgumentError("bench-utility config: n out of range");
    }
    if (trials < 1) {
      return absl::InvalidArgumentError(
          "bench-utility config: 'trials' must be >= 1");
    }
    for (const std::int64_t k : ks) {
      if (k < 1) {
        return absl::InvalidArgumentError(
            "bench-utility config: every k must be >= 1");
      }
    }
    if (!(condition_number >= 1)) {
      return absl::InvalidArgumentError(
          "bench-utility config: 'condition_number' must be >= 1");
    }
    SymMatrix sigma = SymMatrix::Identity(static_cast<int>(n));
    if (sigma_kind == "random") {
      sigma = RandomSpdMatrix(static_cast<int>(n), condition_number, seed,
                              kBenchSigmaStream);
    } else if (sigma_kind != "identity") {
      return absl::InvalidArgumentError(
          "bench-utility config: 'sigma' must be 'random' or 'identity'");
    }
    DPATTN_ASSIGN_OR_RETURN(const std::vector<UtilitySample> samples,
                            BenchUtility(sigma, ks, trials, seed));
    std::string csv = "n,k,trial,rel_frob_error\n";
    std::map<std::int64_t, std::vector<double>> by_k;
    for (const UtilitySample& s : samples) {
      csv += std::to_string(s.n) + "," + std::to_string(s.k) + "," +
             std::to_string(s.trial) + "," + FormatDouble(s.rel_frob_error) +
             "\n";
      by_k[s.k].push_back(s.rel_frob_error);
    }
    for (const std::int64_t k : ks) {
      auto it = by_k.find(k);
      if (it == by_k.end()) continue;
      csv += std::to_string(n) + "," + std::to_string(k) + ",median," +
             FormatDouble(Median(it->second)) + "\n";
      by_k.erase(it);
    }
    DPATTN_RETURN_IF_ERROR(WriteFile(out_dir / "bench_utility.csv", csv));
    return kExitOk;
  };
  absl::StatusOr<int> result = body();
  return result.ok() ? *result : internal::Fail(err, result.status());
}

inline constexpr std::string_view kCommands[] = {
    "gen-dataset", "dp-attention", "verify-privacy", "bench-utility"};

// Loads the config at `config_path` and dispatches.
inline int RunCommand(std::string_view command, const fs::path& config_path,
                      const fs::path& out_dir, std::ostream& err) {
  absl::StatusOr<json> config = internal::LoadConfig(config_path);
  if (!config.ok()) return internal::Fail(err, config.status());
  const fs::path config_dir =
      config_path.has_parent_path() ? config_path.parent_path() : fs::path(".");
  if (command == "gen-dataset") return RunGenDataset(*config, out_dir, err);
  if (command == "dp-attention") {
    return RunDpAttention(*config, config_dir, out_dir, err);
  }
  if (command == "verify-privacy") {
    return RunVerifyPrivacy(*config, config_dir, out_dir, err);
  }
  if (command == "bench-utility") {
    return RunBenchUtility(*config, out_dir, err);
  }
  err << "error: unknown command '" << command << "'\n";
  return kExitInputError;
}

}  // namespace dpattn::cli

#endif  // DPATTN_CLI_H_
