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

#ifndef HMCAL_TIMESYNC_H_
#define HMCAL_TIMESYNC_H_

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "hmcal/skeleton.h"

namespace hmcal {

struct DtwOptions {
  // Sakoe-Chiba half-width in frames; unset means the full cost matrix.
  // The band is widened to |len_a - len_b| so both endpoints stay reachable.
  std::optional<int> window;
};

struct PairwiseAlignment {
  double cost = 0.0;
  // Mode of (t_b - t_a) over the matched pairs of the selected optimal path.
  int offset = 0;
  std::vector<std::pair<int, int>> path;  // (t_a, t_b), start to end
  double frame_rate = 0.0;                // rate the offset is expressed in
};

// DTW over per-frame feature rows with Euclidean local distance, step set
// {(1,0),(0,1),(1,1)} and both endpoints matched. Backtracking prefers the
// diagonal, then (1,0), then (0,1); warping-time ties prefer the smallest
// magnitude, then the smaller signed value.
PairwiseAlignment DtwAlign(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                           const DtwOptions& options = {});

// Per-frame flattened canonical joints (frames x 66K).
Eigen::MatrixXd CanonicalFeatures(const MotionSequence& seq,
                                  const SkeletonModel& model);

// Resamples the lower-rate sequence to the higher rate before aligning.
PairwiseAlignment PairwiseDtw(const MotionSequence& a, const MotionSequence& b,
                              const SkeletonModel& model,
                              const DtwOptions& options = {});

struct AlignmentMatrices {
  Eigen::MatrixXd cost;    // symmetric, zero diagonal
  Eigen::MatrixXi offset;  // antisymmetric, offset(i, j) = t_j - t_i
  double frame_rate = 0.0;
};

// Fills all i < j pairs; pairs are independent and may run on `threads`
// workers. Output does not depend on the evaluation order.
AlignmentMatrices BuildMatrices(const std::vector<MotionSequence>& seqs,
                                const SkeletonModel& model,
                                const DtwOptions& options = {},
                                int threads = 1);

// Per-camera integer delays: local frame t of camera i shows global time
// t - offsets[i]. offsets[anchor] == 0.
struct GlobalOffsets {
  std::vector<int> offsets;
  int anchor = 0;
};

// Greedy merge of pairwise offsets in increasing cost order.
GlobalOffsets GlobalAlign(const AlignmentMatrices& mats);

// Shifts all offsets so that `anchor` has offset zero.
GlobalOffsets Reanchor(const GlobalOffsets& offsets, int anchor);

// Camera with the smallest summed DTW cost to all others (lowest index wins).
int SelectAnchorByCost(const Eigen::MatrixXd& cost);

}  // namespace hmcal

#endif  // HMCAL_TIMESYNC_H_
