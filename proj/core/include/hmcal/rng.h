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

#ifndef HMCAL_RNG_H_
#define HMCAL_RNG_H_

#include <cstdint>
#include <random>

namespace hmcal {

// Seeded generator whose uniform and normal draws are computed from raw
// mt19937_64 output, so sequences do not depend on the standard library's
// distribution implementations. Normal draws use Box-Muller; only the libm
// transcendentals (log, sin, cos) can differ across platforms.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t NextU64() { return engine_(); }
  // Uniform in [0, 1) with 53 random bits.
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  // Uniform integer in [lo, hi] (inclusive), rejection sampled.
  int64_t UniformInt(int64_t lo, int64_t hi);
  double Normal();
  double Normal(double mean, double stddev) { return mean + stddev * Normal(); }

  // Derives an independent stream, e.g. one per camera or per worker.
  Rng Fork(uint64_t salt);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace hmcal

#endif  // HMCAL_RNG_H_
