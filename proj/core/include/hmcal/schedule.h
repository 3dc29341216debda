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

#ifndef HMCAL_SCHEDULE_H_
#define HMCAL_SCHEDULE_H_

#include <vector>

namespace hmcal {

// Weight of level l (1-based) at coarse-to-fine progress alpha: zero below
// l - 1, a half-cosine ramp over [l - 1, l), one above.
double CoarseWeight(double alpha, int level);

// alpha = L (e^eta - 1) / (e - 1); eta = 1 gives exactly L.
double AlphaFromEta(double eta, int num_levels);

struct TrainSchedule {
  int total_steps = 300000;
  int coarse_to_fine_end = 100000;
  int s0 = 2000;   // pose deltas unfreeze
  int s1 = 18000;  // further steps until offsets unfreeze
  int num_levels = 2;
  int reg_decay_start = 100000;
  int reg_decay_end = 150000;
  double reg_floor = 0.01;
  bool coarse_to_fine = true;
  bool curriculum = true;

  double Eta(int step) const;
  double Alpha(int step) const;
  std::vector<double> LevelWeights(int step) const;
  bool PosesActive(int step) const;
  bool OffsetsActive(int step) const;
  // Multiplier on regularizer weights: 1, then a cosine decay to reg_floor.
  double RegularizerScale(int step) const;
  // 0-based levels whose upsample initialization happens at `step`, i.e.
  // alpha first reaches l - 1 (1-based l > 1).
  std::vector<int> UpsampleLevels(int step) const;
};

void ValidateSchedule(const TrainSchedule& schedule);

}  // namespace hmcal

#endif  // HMCAL_SCHEDULE_H_
