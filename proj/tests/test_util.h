// Copyright 2026 The hmcal Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef HMCAL_TESTS_TEST_UTIL_H_
#define HMCAL_TESTS_TEST_UTIL_H_

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace hmcal::testing {

// Hand-rolled generators over std::mt19937_64 so test cases do not share a
// stream with the library's own Rng.
class Gen {
 public:
  explicit Gen(uint64_t seed) : engine_(seed) {}

  double Uniform(double lo = 0.0, double hi = 1.0) {
    return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }
  int Int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  double Normal(double mean = 0.0, double sd = 1.0) {
    return std::normal_distribution<double>(mean, sd)(engine_);
  }
  bool Coin() { return Int(0, 1) == 1; }
  Eigen::Vector3d Vec3(double lo = -1.0, double hi = 1.0) {
    return {Uniform(lo, hi), Uniform(lo, hi), Uniform(lo, hi)};
  }
  Eigen::Vector3d UnitVec() {
    Eigen::Vector3d v;
    do {
      v = Eigen::Vector3d(Normal(), Normal(), Normal());
    } while (v.norm() < 1e-6);
    return v.normalized();
  }
  // Uniformly distributed rotation from a normalized Gaussian quaternion.
  Eigen::Matrix3d Rotation() {
    Eigen::Quaterniond q(Normal(), Normal(), Normal(), Normal());
    q.normalize();
    return q.toRotationMatrix();
  }
  Eigen::MatrixXd Matrix(int rows, int cols, double sd = 1.0) {
    Eigen::MatrixXd m(rows, cols);
    for (int j = 0; j < cols; ++j) {
      for (int i = 0; i < rows; ++i) m(i, j) = Normal(0.0, sd);
    }
    return m;
  }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Central difference of f at x along coordinate i.
inline double CentralDiff(const std::function<double()>& f, double* x, double h) {
  const double x0 = *x;
  *x = x0 + h;
  const double fp = f();
  *x = x0 - h;
  const double fm = f();
  *x = x0;
  return (fp - fm) / (2.0 * h);
}

// |a - b| / max(|a|, |b|, floor).
inline double RelErr(double a, double b, double floor = 1e-8) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace hmcal::testing

#endif  // HMCAL_TESTS_TEST_UTIL_H_
