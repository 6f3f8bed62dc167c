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

#include "dpattn/dataset.h"

#include <cmath>

#include "Eigen/Dense"
#include "dpattn/errors.h"
#include "dpattn/linalg.h"
#include "gtest/gtest.h"
#include "test_util.h"

namespace dpattn {
namespace {

using ::dpattn::testing::Gen;

TEST(CheckGoodTest, Examples) {
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2, 2);
  EXPECT_TRUE(CheckGood(id, 1, 1));
  EXPECT_FALSE(CheckGood(id, 1.5, 1));
  EXPECT_TRUE(CheckGood(2 * id, 4, 2));
  EXPECT_FALSE(CheckGood(2 * id, 4, 1.9));
  EXPECT_TRUE(CheckGood(id * (1 + 1e-10), 1, 1));
}

TEST(GramTest, Examples) {
  EXPECT_EQ(Gram(Eigen::MatrixXd::Identity(2, 2)).matrix(),
            Eigen::MatrixXd::Identity(2, 2));
  Eigen::MatrixXd x(2, 2);
  x << 1, 1, 0, 0;
  Eigen::MatrixXd expected(2, 2);
  expected << 2, 0, 0, 0;
  EXPECT_EQ(Gram(x).matrix(), expected);
}

TEST(DatasetTest, CreateValidates) {
  EXPECT_TRUE(Dataset::Create(Eigen::MatrixXd::Identity(2, 2), 1, 1).ok());
  EXPECT_TRUE(HasErrorKind(
      Dataset::Create(Eigen::MatrixXd::Identity(3, 2), 0.1, 1).status(),
      "PreconditionFailed"));
  EXPECT_TRUE(HasErrorKind(
      Dataset::Create(Eigen::MatrixXd::Identity(2, 2), 2, 1).status(),
      "PreconditionFailed"));
  EXPECT_TRUE(HasErrorKind(
      Dataset::Create(Eigen::MatrixXd::Identity(2, 2), 0, 1).status(),
      "ParamRange"));
}

TEST(GenerateGoodDatasetTest, Examples) {
  auto square = GenerateGoodDataset(2, 2, 1, 1, 99);
  ASSERT_TRUE(square.ok());
  EXPECT_EQ(square->matrix(), Eigen::MatrixXd::Identity(2, 2));

  auto wide = GenerateGoodDataset(2, 4, 1, 1, 7);
  ASSERT_TRUE(wide.ok());
  EXPECT_TRUE(CheckGood(wide->matrix(), 1, 1, 0));

  EXPECT_TRUE(
      HasErrorKind(GenerateGoodDataset(2, 2, 4, 1, 1).status(), "Infeasible"));
  EXPECT_TRUE(HasErrorKind(GenerateGoodDataset(3, 2, 1, 1, 1).status(),
                           "PreconditionFailed"));
}

TEST(GenerateGoodDatasetTest, DeterministicPerSeed) {
  auto a = GenerateGoodDataset(4, 16, 0.01, 0.2, 1);
  auto b = GenerateGoodDataset(4, 16, 0.01, 0.2, 1);
  auto c = GenerateGoodDataset(4, 16, 0.01, 0.2, 2);
  ASSERT_TRUE(a.ok() && b.ok() && c.ok());
  EXPECT_EQ(a->matrix(), b->matrix());
  EXPECT_NE(a->matrix(), c->matrix());
}

TEST(GenerateGoodDatasetTest, PropertyGramBoundedBelowByEta) {
  Gen gen(21);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = gen.Int(1, 8);
    const int d = n * gen.Int(1, 4);
    const double eta = gen.LogUniform(1e-4, 10);
    const double alpha = std::sqrt(eta) * gen.Uniform(1, 3);
    auto x = GenerateGoodDataset(n, d, eta, alpha, trial);
    ASSERT_TRUE(x.ok()) << x.status();
    EXPECT_TRUE(CheckGood(x->matrix(), eta, alpha, 0)) << "trial " << trial;
    auto spectrum = SymEigendecompose(Gram(x->matrix()));
    EXPECT_GE(spectrum->min_eigenvalue(), eta - 1e-9);
    EXPECT_TRUE(*IsPsd(Gram(x->matrix()), 0));
  }
}

TEST(MakeNeighborTest, Examples) {
  auto x = Dataset::Create(Eigen::MatrixXd::Identity(2, 2), 1, 1);
  ASSERT_TRUE(x.ok());
  auto pair = MakeNeighbor(*x, 0.01, 1, 3);
  ASSERT_TRUE(pair.ok()) << pair.status();
  EXPECT_EQ(pair->perturbed().col(0), x->matrix().col(0));
  EXPECT_LE((pair->perturbed().col(1) - x->matrix().col(1)).norm(),
            0.01 + 1e-15);
  EXPECT_LE(pair->perturbed().col(1).norm(), 1 + 1e-15);
  ASSERT_TRUE(pair->index().has_value());
  EXPECT_EQ(*pair->index(), 1);

  auto tiny = MakeNeighbor(*x, 1e-15, 0, 3);
  ASSERT_TRUE(tiny.ok());
  EXPECT_LE((tiny->perturbed() - x->matrix()).cwiseAbs().maxCoeff(), 1e-15);

  EXPECT_TRUE(
      HasErrorKind(MakeNeighbor(*x, 0.01, 2, 3).status(), "ParamRange"));
  EXPECT_TRUE(
      HasErrorKind(MakeNeighbor(*x, 0.01, -1, 3).status(), "ParamRange"));
}

TEST(MakeNeighborTest, MovesExactlyBetaInsideTheBall) {
  auto x = GenerateGoodDataset(4, 8, 0.01, 1.0, 5);
  ASSERT_TRUE(x.ok());
  // Column 6 has norm <= 0.1, far inside the unit ball.
  auto pair = MakeNeighbor(*x, 0.05, 6, 8);
  ASSERT_TRUE(pair.ok());
  EXPECT_NEAR((pair->perturbed().col(6) - x->matrix().col(6)).norm(), 0.05,
              1e-15);
}

TEST(NeighborPairTest, CreateRejectsNonNeighbors) {
  auto x = Dataset::Create(Eigen::MatrixXd::Identity(3, 3), 1, 1);
  ASSERT_TRUE(x.ok());
  Eigen::MatrixXd two = x->matrix();
  two(0, 0) += 1e-3;
  two(1, 1) += 1e-3;
  EXPECT_TRUE(HasErrorKind(NeighborPair::Create(*x, two, 1).status(),
                           "PreconditionFailed"));
  Eigen::MatrixXd far = x->matrix();
  far(0, 0) += 0.5;
  EXPECT_TRUE(HasErrorKind(NeighborPair::Create(*x, far, 0.1).status(),
                           "PreconditionFailed"));
  EXPECT_TRUE(HasErrorKind(
      NeighborPair::Create(*x, Eigen::MatrixXd::Identity(3, 4), 1).status(),
      "DimMismatch"));
  auto same = NeighborPair::Create(*x, x->matrix(), 0);
  ASSERT_TRUE(same.ok());
  EXPECT_FALSE(same->index().has_value());
}

TEST(SensitivityTest, Examples) {
  auto x = Dataset::Create(Eigen::MatrixXd::Identity(2, 2), 1, 1.01);
  ASSERT_TRUE(x.ok());
  auto same = NeighborPair::Create(*x, x->matrix(), 0);
  auto zero = SensitivityMeasured(*same);
  ASSERT_TRUE(zero.ok());
  EXPECT_EQ(zero->spectral, 0);
  EXPECT_EQ(zero->frobenius, 0);

  Eigen::MatrixXd perturbed = x->matrix();
  perturbed(0, 0) = 1.01;
  auto pair = NeighborPair::Create(*x, perturbed, 0.01 + 1e-15);
  ASSERT_TRUE(pair.ok()) << pair.status();
  auto measured = SensitivityMeasured(*pair);
  ASSERT_TRUE(measured.ok());
  EXPECT_NEAR(measured->spectral, 1.01 * 1.01 - 1, 1e-15);
  EXPECT_NEAR(measured->frobenius, 1.01 * 1.01 - 1, 1e-15);

  auto zero_bound = SensitivityBound(1, 1, 0, 3);
  EXPECT_EQ(zero_bound->spectral, 0);
  EXPECT_EQ(zero_bound->frobenius, 0);
  auto bound = SensitivityBound(1, 1.01, 0.01, 2);
  ASSERT_TRUE(bound.ok());
  EXPECT_NEAR(bound->spectral, 0.0202, 1e-15);
  EXPECT_NEAR(bound->frobenius, 0.0202 * std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(bound->frobenius, 0.02856711395993652, 1e-15);
  EXPECT_LE(measured->spectral, bound->spectral);
  EXPECT_TRUE(
      HasErrorKind(SensitivityBound(0, 1, 1, 1).status(), "ParamRange"));
}

TEST(SensitivityTest, PropertyMeasuredWithinBound) {
  Gen gen(22);
  int cases = 0;
  for (int n : {2, 4, 8}) {
    for (int mult : {1, 2, 4}) {
      for (int rep = 0; rep < 56; ++rep, ++cases) {
        const int d = n * mult;
        const double eta = gen.LogUniform(1e-3, 1);
        const double alpha = std::sqrt(eta) * gen.Uniform(1, 2);
        const double beta = gen.LogUniform(1e-6, 1) * alpha;
        auto x = GenerateGoodDataset(n, d, eta, alpha, cases);
        ASSERT_TRUE(x.ok());
        auto pair = MakeNeighbor(*x, beta, gen.Int(0, d - 1), cases + 1000);
        ASSERT_TRUE(pair.ok());
        const int index = *pair->index();
        for (int j = 0; j < d; ++j) {
          if (j != index) {
            ASSERT_EQ(pair->perturbed().col(j), x->matrix().col(j));
          }
        }
        EXPECT_LE(pair->perturbed().col(index).norm(), alpha * (1 + 1e-15));
        auto measured = SensitivityMeasured(*pair);
        auto bound = SensitivityBound(eta, alpha, beta, n);
        ASSERT_TRUE(measured.ok() && bound.ok());
        EXPECT_LE(measured->spectral, bound->spectral) << "case " << cases;
        EXPECT_LE(measured->frobenius, bound->frobenius) << "case " << cases;
        EXPECT_LE(measured->frobenius,
                  std::sqrt(n) * measured->spectral * (1 + 1e-12));
        EXPECT_TRUE(*LoewnerWithin(Gram(pair->perturbed()), Gram(x->matrix()),
                                   bound->spectral, 1e-9))
            << "case " << cases;
      }
    }
  }
  EXPECT_GE(cases, 500);
}

}  // namespace
}  // namespace dpattn
