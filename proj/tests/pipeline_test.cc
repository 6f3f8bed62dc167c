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

#include "dpattn/pipeline.h"

#include <cmath>
#include <map>
#include <string>

#include "Eigen/Dense"
#include "dpattn/dataset.h"
#include "dpattn/errors.h"
#include "gtest/gtest.h"

namespace dpattn {
namespace {

constexpr std::int64_t kRho005 = 767409;   // smallest k with rho <= 0.005
constexpr std::int64_t kRho004 = 1196713;  // smallest k with rho <= 0.004

Dataset ExampleDataset(std::uint64_t seed) {
  return *GenerateGoodDataset(4, 8, 0.01, 0.11, seed);
}

DpParams ExampleParams(std::int64_t k, std::uint64_t seed) {
  DpParams params;
  params.eps = 0.05;
  params.delta_dp = 0.01;
  params.gamma = 0.05;
  params.k = k;
  params.r = 0.05;
  params.f_kind = FKind::kExp;
  params.seed = seed;
  return params;
}

TEST(DpAttentionTest, EndToEndExampleIsCertified) {
  ASSERT_EQ(*RequiredK(4, 0.05, 0.005, 1), kRho005);
  auto report = DpAttention(ExampleDataset(1), 1e-8, ExampleParams(kRho005, 2));
  ASSERT_TRUE(report.ok()) << report.status();
  EXPECT_TRUE(report->certified) << report->first_failure();
  EXPECT_TRUE(report->requirements_met);
  EXPECT_TRUE(report->loewner_event);
  EXPECT_TRUE(report->bound_satisfied);
  EXPECT_LE(report->measured_error, 0.23);
  EXPECT_NEAR(report->error_bound, 0.23, 1e-15);
  EXPECT_EQ(report->first_failure(), "");
  EXPECT_TRUE(report->warnings.empty());
  EXPECT_EQ(report->n, 4);
  EXPECT_EQ(report->d, 8);
  EXPECT_EQ(report->attention_a.rows(), 4);
  EXPECT_LE(report->rho, 0.005);
  EXPECT_NEAR(report->sensitivity_bound_frob, 2 * 0.11 * 1e-8 * 2 / 0.01,
              1e-20);
  EXPECT_EQ(report->delta_budget_used, report->delta_budget.min());
}

TEST(DpAttentionTest, TooFewSamplesFailsUtility) {
  auto report = DpAttention(ExampleDataset(1), 1e-8, ExampleParams(1, 2));
  ASSERT_TRUE(report.ok()) << report.status();
  EXPECT_FALSE(report->certified);
  EXPECT_FALSE(report->check("utility")->pass);
  // Sensitivity with k = 1 has a large budget, so utility fails first.
  EXPECT_EQ(report->first_failure(), "utility");
  EXPECT_TRUE(report->singular_estimate);
}

TEST(DpAttentionTest, LargeBetaFailsSensitivity) {
  auto report = DpAttention(ExampleDataset(1), 0.01, ExampleParams(kRho005, 2));
  ASSERT_TRUE(report.ok()) << report.status();
  EXPECT_FALSE(report->certified);
  EXPECT_EQ(report->first_failure(), "sensitivity");
  EXPECT_TRUE(report->check("utility")->pass);
}

TEST(DpAttentionTest, RangeViolationsAreNamedChecks) {
  DpParams params = ExampleParams(kRho005, 2);
  params.eps = 0.2;
  auto report = DpAttention(ExampleDataset(1), 1e-8, params);
  ASSERT_TRUE(report.ok());
  EXPECT_EQ(report->first_failure(), "eps_range");

  params = ExampleParams(kRho005, 2);
  params.r = 0.01;
  report = DpAttention(ExampleDataset(1), 1e-8, params);
  ASSERT_TRUE(report.ok());
  EXPECT_EQ(report->first_failure(), "entry_bound");
  EXPECT_FALSE(report->check("eta_lt_r")->pass);
  EXPECT_EQ(report->warnings.front(), "eta_lt_r");

  params = ExampleParams(kRho005, 2);
  params.eps = 1.5;
  EXPECT_TRUE(HasErrorKind(
      DpAttention(ExampleDataset(1), 1e-8, params).status(), "ParamRange"));
  EXPECT_TRUE(HasErrorKind(
      DpAttention(ExampleDataset(1), -1, ExampleParams(kRho005, 2)).status(),
      "ParamRange"));
}

TEST(DpAttentionTest, WarningDoesNotBlockCertification) {
  // A = 0.02 I, so r = 0.02 satisfies the entry bound while eta < r fails.
  auto x = GenerateGoodDataset(2, 2, 0.02, 0.2, 1);
  ASSERT_TRUE(x.ok());
  DpParams params = ExampleParams(*RequiredK(2, 0.05, 0.004, 1), 3);
  params.r = 0.02;
  auto report = DpAttention(*x, 1e-9, params);
  ASSERT_TRUE(report.ok()) << report.status();
  EXPECT_FALSE(report->check("eta_lt_r")->pass);
  EXPECT_TRUE(report->certified) << report->first_failure();
  ASSERT_EQ(report->warnings.size(), 1u);
}

TEST(DpAttentionTest, ReportIsCompleteAndConsistent) {
  auto report = DpAttention(ExampleDataset(3), 1e-8, ExampleParams(1000, 4));
  ASSERT_TRUE(report.ok());
  std::map<std::string, int> seen;
  for (const RequirementCheck& c : report->requirement_checks) ++seen[c.name];
  for (const char* name :
       {"d_ge_n", "eps_range", "delta_range", "r_range", "good_dataset",
        "entry_bound", "eta_lt_r", "sensitivity", "utility", "rho_to_eps",
        "loewner", "error_bound"}) {
    EXPECT_EQ(seen[name], 1) << name;
  }
  EXPECT_EQ(seen.size(), 12u);
  EXPECT_EQ(report->error_bound, 4 * (1 + 0.05 + 2 * 0.05) * 0.05);
  EXPECT_EQ(report->a.matrix(), Gram(ExampleDataset(3).matrix()).matrix());
}

TEST(DpAttentionTest, PropertyCertifiedImpliesEveryCheckPasses) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    for (std::int64_t k : {std::int64_t{100}, std::int64_t{20000}, kRho004}) {
      auto report =
          DpAttention(ExampleDataset(seed), 1e-8, ExampleParams(k, seed));
      ASSERT_TRUE(report.ok());
      if (report->certified) {
        for (const RequirementCheck& c : report->requirement_checks) {
          if (c.kind != CheckKind::kWarning) EXPECT_TRUE(c.pass) << c.name;
        }
        EXPECT_LE(report->measured_error, report->error_bound);
      }
      EXPECT_EQ(report->error_bound, 4 * (1 + 0.05 + 2 * 0.05) * 0.05);
    }
  }
}

TEST(DpAttentionTest, PropertyUtilityCheckMonotoneInK) {
  const Dataset x = ExampleDataset(5);
  bool was_passing = false;
  for (std::int64_t k = 1; k <= (std::int64_t{1} << 22); k *= 2) {
    DpParams params = ExampleParams(k, 1);
    auto rho = UtilityRho(4, params.gamma, static_cast<double>(k), 1);
    const bool passing = *rho < 0.1 * params.eps;
    EXPECT_FALSE(was_passing && !passing) << "k=" << k;
    was_passing = passing;
  }
  EXPECT_TRUE(was_passing);
  // Spot-check against the reported check at a few k.
  for (std::int64_t k : {std::int64_t{1000}, kRho005}) {
    auto report = DpAttention(x, 1e-8, ExampleParams(k, 1));
    EXPECT_EQ(report->check("utility")->pass,
              *UtilityRho(4, 0.05, static_cast<double>(k), 1) < 0.005);
  }
}

TEST(DpAttentionTest, Deterministic) {
  auto a = DpAttention(ExampleDataset(7), 1e-8, ExampleParams(50000, 8));
  auto b = DpAttention(ExampleDataset(7), 1e-8, ExampleParams(50000, 8));
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_EQ(a->b.matrix(), b->b.matrix());
  EXPECT_EQ(a->measured_error, b->measured_error);
}

TEST(VerifyNeighborPrivacyTest, IdenticalPairIsCertified) {
  const Dataset x = ExampleDataset(1);
  auto pair = NeighborPair::Create(x, x.matrix(), 0.001);
  ASSERT_TRUE(pair.ok());
  auto report = VerifyNeighborPrivacy(*pair, ExampleParams(kRho005, 1), 1000);
  ASSERT_TRUE(report.ok()) << report.status();
  EXPECT_TRUE(report->granted);
  ASSERT_TRUE(report->monte_carlo.has_value());
  EXPECT_EQ(report->monte_carlo->empirical_rate, 0);
}

TEST(VerifyNeighborPrivacyTest, CertifiedPairHasLowEmpiricalRate) {
  const Dataset x = ExampleDataset(2);
  const double eps = 0.5, delta = 0.05;
  const std::int64_t k = 50;
  const double budget = ComputeDeltaBudget(eps, delta, k)->min();
  // beta on the sensitivity bound: 2 sqrt(n) alpha beta / eta = budget.
  const double beta = 0.999 * budget * x.eta() / (2 * 2 * x.alpha());
  auto pair = MakeNeighbor(x, beta, 5, 11);
  ASSERT_TRUE(pair.ok());
  auto report = VerifyNeighborPrivacy(*pair, eps, delta, k, 5000, 12);
  ASSERT_TRUE(report.ok()) << report.status();
  EXPECT_TRUE(report->granted);
  EXPECT_LE(report->monte_carlo->empirical_rate, delta);
}

TEST(VerifyNeighborPrivacyTest, SensitivityViolationIsDenied) {
  const Dataset x = ExampleDataset(2);
  auto pair = MakeNeighbor(x, 0.1, 5, 11);
  ASSERT_TRUE(pair.ok());
  auto report = VerifyNeighborPrivacy(*pair, 0.5, 0.05, 50, 1000, 12);
  ASSERT_TRUE(report.ok()) << report.status();
  EXPECT_FALSE(report->granted);
  EXPECT_EQ(report->reason, CertificateReason::kSensitivityExceeded);
}

}  // namespace
}  // namespace dpattn
