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

#include "hmcal/schedule.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hmcal/error.h"

namespace hmcal {

double CoarseWeight(double alpha, int level) {
  const double x = alpha - (level - 1);
  if (x < 0.0) return 0.0;
  if (x < 1.0) return (1.0 - std::cos(x * std::numbers::pi)) / 2.0;
  return 1.0;
}

double AlphaFromEta(double eta, int num_levels) {
  if (eta >= 1.0) return num_levels;
  if (eta <= 0.0) return 0.0;
  return num_levels * std::expm1(eta) / (std::numbers::e - 1.0);
}

void ValidateSchedule(const TrainSchedule& s) {
  if (s.total_steps < 0) Fail(ErrorKind::kConfig, "total_steps must be >= 0");
  if (s.coarse_to_fine_end < 1) {
    Fail(ErrorKind::kConfig, "coarse_to_fine_end must be >= 1");
  }
  if (s.s0 < 0 || s.s1 < 0) Fail(ErrorKind::kConfig, "s0 and s1 must be >= 0");
  if (s.num_levels < 1) Fail(ErrorKind::kConfig, "num_levels must be >= 1");
  if (s.reg_decay_end < s.reg_decay_start) {
    Fail(ErrorKind::kConfig, "reg_decay_end must be >= reg_decay_start");
  }
  if (!(s.reg_floor > 0.0 && s.reg_floor <= 1.0)) {
    Fail(ErrorKind::kConfig, "reg_floor must be in (0, 1]");
  }
}

double TrainSchedule::Eta(int step) const {
  return std::clamp(static_cast<double>(step) / coarse_to_fine_end, 0.0, 1.0);
}

double TrainSchedule::Alpha(int step) const {
  if (!coarse_to_fine) return num_levels;
  return AlphaFromEta(Eta(step), num_levels);
}

std::vector<double> TrainSchedule::LevelWeights(int step) const {
  const double alpha = Alpha(step);
  std::vector<double> w(num_levels);
  for (int l = 0; l < num_levels; ++l) w[l] = CoarseWeight(alpha, l + 1);
  return w;
}

bool TrainSchedule::PosesActive(int step) const {
  return !curriculum || step >= s0;
}

bool TrainSchedule::OffsetsActive(int step) const {
  return !curriculum || step >= s0 + s1;
}

double TrainSchedule::RegularizerScale(int step) const {
  if (step <= reg_decay_start) return 1.0;
  if (step >= reg_decay_end) return reg_floor;
  const double x = static_cast<double>(step - reg_decay_start) /
                   (reg_decay_end - reg_decay_start);
  return reg_floor + (1.0 - reg_floor) * 0.5 * (1.0 + std::cos(x * std::numbers::pi));
}

std::vector<int> TrainSchedule::UpsampleLevels(int step) const {
  std::vector<int> out;
  if (!coarse_to_fine || step <= 0) return out;
  const double prev = Alpha(step - 1);
  const double now = Alpha(step);
  for (int l = 2; l <= num_levels; ++l) {
    if (prev < l - 1 && now >= l - 1) out.push_back(l - 1);
  }
  return out;
}

}  // namespace hmcal
