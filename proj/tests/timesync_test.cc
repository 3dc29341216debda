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


#include <functional>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

#include "hmcal/error.h"
#include "hmcal/skeleton.h"
#include "hmcal/timesync.h"
#include "oracles.h"
#include "test_util.h"

namespace hmcal {
namespace {

using testing::BruteForceDtw;
using testing::Gen;

double PathCost(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                const std::vector<std::pair<int, int>>& path) {
  double cost = 0.0;
  for (const auto& [i, j] : path) cost += (a.row(i) - b.row(j)).norm();
  return cost;
}

void ExpectValidPath(const std::vector<std::pair<int, int>>& path, int n, int m) {
  ASSERT_FALSE(path.empty());
  EXPECT_EQ(path.front(), std::make_pair(0, 0));
  EXPECT_EQ(path.back(), std::make_pair(n - 1, m - 1));
  for (size_t k = 1; k < path.size(); ++k) {
    const int di = path[k].first - path[k - 1].first;
    const int dj = path[k].second - path[k - 1].second;
    EXPECT_TRUE((di == 1 && dj == 0) || (di == 0 && dj == 1) || (di == 1 && dj == 1));
  }
}

TEST(DtwTest, MatchesBruteForceEnumeration) {
  Gen gen(31);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = gen.Int(1, 8), m = gen.Int(1, 8), d = gen.Int(1, 3);
    const Eigen::MatrixXd a = gen.Matrix(n, d), b = gen.Matrix(m, d);
    const PairwiseAlignment al = DtwAlign(a, b);
    EXPECT_EQ(al.cost, BruteForceDtw(a, b));
    ExpectValidPath(al.path, n, m);
    EXPECT_EQ(PathCost(a, b, al.path), al.cost);
  }
}

TEST(DtwTest, IdenticalSequencesAlignOnTheDiagonal) {
  Gen gen(32);
  const Eigen::MatrixXd a = gen.Matrix(10, 4);
  const PairwiseAlignment al = DtwAlign(a, a);
  EXPECT_EQ(al.cost, 0.0);
  EXPECT_EQ(al.offset, 0);
  ASSERT_EQ(al.path.size(), 10u);
  for (int k = 0; k < 10; ++k) EXPECT_EQ(al.path[k], std::make_pair(k, k));
}

// Random walk rows so distinct frames are far apart.
Eigen::MatrixXd Walk(Gen& gen, int frames, int dim) {
  Eigen::MatrixXd w(frames, dim);
  w.row(0) = gen.Matrix(1, dim);
  for (int t = 1; t < frames; ++t) w.row(t) = w.row(t - 1) + gen.Matrix(1, dim);
  return w;
}

// Shift k minimizing the mean distance over frames with t_b = t_a + k.
int ShiftScan(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, int min_overlap) {
  int best_k = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int k = -static_cast<int>(a.rows()); k <= b.rows(); ++k) {
    double sum = 0.0;
    int count = 0;
    for (int ta = 0; ta < a.rows(); ++ta) {
      const int tb = ta + k;
      if (tb < 0 || tb >= b.rows()) continue;
      sum += (a.row(ta) - b.row(tb)).norm();
      ++count;
    }
    if (count >= min_overlap && sum / count < best) {
      best = sum / count;
      best_k = k;
    }
  }
  return best_k;
}

TEST(DtwTest, OffsetMatchesShiftScanOnCroppedCopies) {
  Gen gen(33);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::MatrixXd full = Walk(gen, 80, 3);
    const int sa = gen.Int(0, 20), sb = gen.Int(0, 20);
    const int la = gen.Int(45, 60), lb = gen.Int(45, 60);
    const Eigen::MatrixXd a = full.middleRows(sa, la);
    const Eigen::MatrixXd b = full.middleRows(sb, lb);
    const PairwiseAlignment al = DtwAlign(a, b);
    EXPECT_EQ(al.offset, sa - sb);
    EXPECT_EQ(al.offset, ShiftScan(a, b, 20));
  }
}

TEST(DtwTest, WindowOnlyRestricts) {
  Gen gen(34);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = gen.Int(5, 20), m = gen.Int(5, 20);
    const Eigen::MatrixXd a = gen.Matrix(n, 2), b = gen.Matrix(m, 2);
    const double full = DtwAlign(a, b).cost;
    const PairwiseAlignment banded = DtwAlign(a, b, {gen.Int(0, 4)});
    EXPECT_GE(banded.cost, full);
    EXPECT_TRUE(std::isfinite(banded.cost));
    ExpectValidPath(banded.path, n, m);
    EXPECT_EQ(DtwAlign(a, b, {std::max(n, m)}).cost, full);
  }
}

TEST(DtwTest, RejectsBadInputs) {
  try {
    DtwAlign(Eigen::MatrixXd(0, 3), Eigen::MatrixXd::Zero(2, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInput);
  }
  try {
    DtwAlign(Eigen::MatrixXd::Zero(2, 3), Eigen::MatrixXd::Zero(2, 4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kCorrespondence);
  }
}

AlignmentMatrices ConsistentMatrices(Gen& gen, const std::vector<int>& delays) {
  const int n = static_cast<int>(delays.size());
  AlignmentMatrices mats;
  mats.cost = Eigen::MatrixXd::Zero(n, n);
  mats.offset = Eigen::MatrixXi::Zero(n, n);
  mats.frame_rate = 30.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      mats.cost(i, j) = mats.cost(j, i) = gen.Uniform(1.0, 10.0);
      mats.offset(i, j) = delays[j] - delays[i];
      mats.offset(j, i) = -mats.offset(i, j);
    }
  }
  return mats;
}

TEST(GlobalAlignTest, RecoversConsistentDelaysUpToShift) {
  Gen gen(35);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = gen.Int(2, 12);
    std::vector<int> delays(n);
    for (int& d : delays) d = gen.Int(-120, 120);
    const GlobalOffsets g = GlobalAlign(ConsistentMatrices(gen, delays));
    ASSERT_EQ(static_cast<int>(g.offsets.size()), n);
    EXPECT_EQ(g.offsets[g.anchor], 0);
    for (int i = 0; i < n; ++i) EXPECT_EQ(g.offsets[i], delays[i] - delays[g.anchor]);
  }
}

TEST(GlobalAlignTest, CheapPairsWinOverInconsistentExpensiveOnes) {
  Gen gen(36);
  const std::vector<int> delays = {0, 5, -3, 9};
  AlignmentMatrices mats = ConsistentMatrices(gen, delays);
  mats.cost(0, 3) = mats.cost(3, 0) = 100.0;
  mats.offset(0, 3) = 40;
  mats.offset(3, 0) = -40;
  const GlobalOffsets g = GlobalAlign(mats);
  for (int i = 0; i < 4; ++i) EXPECT_EQ(g.offsets[i], delays[i] - delays[g.anchor]);
}

TEST(GlobalAlignTest, AnchorIsFirstCameraOfCheapestPair) {
  Gen gen(37);
  AlignmentMatrices mats = ConsistentMatrices(gen, {0, 1, 2, 3});
  mats.cost(2, 3) = mats.cost(3, 2) = 0.5;
  EXPECT_EQ(GlobalAlign(mats).anchor, 2);
}

TEST(GlobalAlignTest, ReanchorShiftsAllOffsets) {
  GlobalOffsets g{{0, 4, -2}, 0};
  const GlobalOffsets r = Reanchor(g, 1);
  EXPECT_EQ(r.anchor, 1);
  EXPECT_EQ(r.offsets, (std::vector<int>{-4, 0, -6}));
  EXPECT_THROW(Reanchor(g, 3), Error);
}

TEST(GlobalAlignTest, AnchorByCostPicksSmallestRowSum) {
  Eigen::MatrixXd cost(3, 3);
  cost << 0, 5, 1, 5, 0, 1, 1, 1, 0;
  EXPECT_EQ(SelectAnchorByCost(cost), 2);
  cost.setConstant(1.0);
  EXPECT_EQ(SelectAnchorByCost(cost), 0);
}

TEST(GlobalAlignTest, RejectsFewerThanTwoCameras) {
  AlignmentMatrices mats;
  mats.cost = Eigen::MatrixXd::Zero(1, 1);
  mats.offset = Eigen::MatrixXi::Zero(1, 1);
  EXPECT_THROW(GlobalAlign(mats), Error);
}

MotionSequence StateSequence(Gen& gen, int frames, double fps, int humans = 1) {
  // Smoothly varying poses so frames are distinct and locally ordered.
  std::vector<HumanState> base(humans);
  std::vector<std::array<Eigen::Vector3d, kNumJoints>> rate(humans);
  for (int h = 0; h < humans; ++h) {
    for (int j = 0; j < kNumJoints; ++j) rate[h][j] = gen.Vec3(-0.05, 0.05);
  }
  MotionSequence seq;
  seq.fps = fps;
  seq.num_humans = humans;
  for (int t = 0; t < frames; ++t) {
    MotionFrame f;
    for (int h = 0; h < humans; ++h) {
      HumanState s = base[h];
      for (int j = 0; j < kNumJoints; ++j) s.body_pose[j] = rate[h][j] * std::sin(0.07 * t + j);
      s.root_orientation = gen.Vec3();
      s.root_position = gen.Vec3();
      f.states.push_back(s);
    }
    seq.frames.push_back(f);
  }
  return seq;
}

MotionSequence Crop(const MotionSequence& seq, int start, int len, const std::string& id) {
  MotionSequence out = seq;
  out.camera_id = id;
  out.frames.assign(seq.frames.begin() + start, seq.frames.begin() + start + len);
  return out;
}

TEST(BuildMatricesTest, NoiseFreeCropsGiveExactPairwiseOffsets) {
  Gen gen(38);
  const SkeletonModel& model = SkeletonModel::Default();
  const MotionSequence full = StateSequence(gen, 90, 30.0, 2);
  const std::vector<int> starts = {0, 7, 15, 3};
  std::vector<MotionSequence> seqs;
  for (size_t i = 0; i < starts.size(); ++i) {
    seqs.push_back(Crop(full, starts[i], 60 + static_cast<int>(i), "c" + std::to_string(i)));
  }
  for (int threads : {1, 3}) {
    const AlignmentMatrices mats = BuildMatrices(seqs, model, {}, threads);
    EXPECT_EQ(mats.frame_rate, 30.0);
    for (int i = 0; i < 4; ++i) {
      EXPECT_EQ(mats.cost(i, i), 0.0);
      for (int j = 0; j < 4; ++j) {
        EXPECT_EQ(mats.offset(i, j), starts[i] - starts[j]);
        EXPECT_EQ(mats.cost(i, j), mats.cost(j, i));
      }
    }
    const GlobalOffsets g = GlobalAlign(mats);
    // Local frame t of camera i shows global time t + start_i.
    for (int i = 0; i < 4; ++i) {
      EXPECT_EQ(g.offsets[i] - g.offsets[0], starts[0] - starts[i]);
    }
  }
}

TEST(BuildMatricesTest, ThreadCountDoesNotChangeResults) {
  Gen gen(39);
  std::vector<MotionSequence> seqs;
  for (int i = 0; i < 5; ++i) seqs.push_back(StateSequence(gen, 30 + i, 30.0));
  const AlignmentMatrices a = BuildMatrices(seqs, SkeletonModel::Default(), {}, 1);
  const AlignmentMatrices b = BuildMatrices(seqs, SkeletonModel::Default(), {}, 4);
  EXPECT_EQ(a.cost, b.cost);
  EXPECT_EQ(a.offset, b.offset);
}

TEST(BuildMatricesTest, MixedRatesUseTheHighestRate) {
  Gen gen(40);
  std::vector<MotionSequence> seqs = {StateSequence(gen, 24, 24.0), StateSequence(gen, 30, 30.0)};
  const AlignmentMatrices mats = BuildMatrices(seqs, SkeletonModel::Default());
  EXPECT_EQ(mats.frame_rate, 30.0);
  EXPECT_EQ(PairwiseDtw(seqs[0], seqs[1], SkeletonModel::Default()).frame_rate, 30.0);
}

TEST(BuildMatricesTest, RejectsSingleCameraAndPeopleMismatch) {
  Gen gen(41);
  try {
    BuildMatrices({StateSequence(gen, 5, 30.0)}, SkeletonModel::Default());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kInput);
  }
  try {
    BuildMatrices({StateSequence(gen, 5, 30.0, 1), StateSequence(gen, 5, 30.0, 2)},
                  SkeletonModel::Default());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kCorrespondence);
  }
}

TEST(CanonicalFeaturesTest, FlattensJointRows) {
  Gen gen(42);
  const MotionSequence seq = StateSequence(gen, 3, 30.0, 2);
  const Eigen::MatrixXd f = CanonicalFeatures(seq, SkeletonModel::Default());
  ASSERT_EQ(f.rows(), 3);
  ASSERT_EQ(f.cols(), 3 * 2 * kNumJoints);
  const Eigen::MatrixX3d j = FrameCanonicalJoints(seq.frames[2], SkeletonModel::Default());
  for (int r = 0; r < j.rows(); ++r) {
    for (int c = 0; c < 3; ++c) EXPECT_EQ(f(2, 3 * r + c), j(r, c));
  }
}

}  // namespace
}  // namespace hmcal
