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

#ifndef DPATTN_TESTS_TEST_UTIL_H_
#define DPATTN_TESTS_TEST_UTIL_H_

// Shared helpers for the unit and acceptance tests: a seeded case generator
// for property tests and a scoped environment override.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <random>
#include <string>

#include "Eigen/Dense"
#include "dpattn/linalg.h"

namespace dpattn::testing {

// Hand-rolled generator for property tests. Every case is reproducible from
// (seed, case index), which the tests print on failure.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : engine_(seed) {}

  double Uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double LogUniform(double lo, double hi) {
    return std::exp(Uniform(std::log(lo), std::log(hi)));
  }
  int Int(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(engine_);
  }
  double Normal() { return std::normal_distribution<double>()(engine_); }
  bool Coin() { return Int(0, 1) == 1; }

  Eigen::MatrixXd Gaussian(int rows, int cols) {
    Eigen::MatrixXd m(rows, cols);
    for (int j = 0; j < cols; ++j) {
      for (int i = 0; i < rows; ++i) m(i, j) = Normal();
    }
    return m;
  }

  Eigen::MatrixXd Orthogonal(int n) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(Gaussian(n, n));
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd r = qr.matrixQR();
    for (int j = 0; j < n; ++j) {
      if (r(j, j) < 0) q.col(j) = -q.col(j);
    }
    return q;
  }

  // Symmetric matrix with the given spectrum in a random basis.
  SymMatrix WithSpectrum(const Eigen::VectorXd& lambda) {
    const Eigen::MatrixXd q = Orthogonal(static_cast<int>(lambda.size()));
    return SymMatrix(q * lambda.asDiagonal() * q.transpose());
  }

  // Positive definite matrix with eigenvalues log-uniform in [lo, hi].
  SymMatrix Spd(int n, double lo, double hi) {
    Eigen::VectorXd lambda(n);
    for (int i = 0; i < n; ++i) lambda(i) = LogUniform(lo, hi);
    return WithSpectrum(lambda);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Sets an environment variable for the lifetime of the object.
class ScopedEnv {
 public:
  ScopedEnv(const char* name, const std::string& value) : name_(name) {
    if (const char* old = std::getenv(name)) previous_ = old;
    ::setenv(name, value.c_str(), 1);
  }
  ~ScopedEnv() {
    if (previous_.has_value()) {
      ::setenv(name_, previous_->c_str(), 1);
    } else {
      ::unsetenv(name_);
    }
  }
  ScopedEnv(const ScopedEnv&) = delete;
  ScopedEnv& operator=(const ScopedEnv&) = delete;

 private:
  const char* name_;
  std::optional<std::string> previous_;
};

}  // namespace dpattn::testing

#endif  // DPATTN_TESTS_TEST_UTIL_H_
