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

#include "hmcal/timesync.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <thread>

#include "hmcal/error.h"

namespace hmcal {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int ModeOfWarpingTimes(const std::vector<std::pair<int, int>>& path) {
  std::map<int, int> histogram;
  for (const auto& [ta, tb] : path) ++histogram[tb - ta];
  int best = 0;
  int best_count = -1;
  for (const auto& [delta, count] : histogram) {
    const bool better =
        count > best_count ||
        (count == best_count &&
         (std::abs(delta) < std::abs(best) ||
          (std::abs(delta) == std::abs(best) && delta < best)));
    if (better) {
      best = delta;
      best_count = count;
    }
  }
  return best;
}

}  // namespace

PairwiseAlignment DtwAlign(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                           const DtwOptions& options) {
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(b.rows());
  if (n == 0 || m == 0) Fail(ErrorKind::kInput, "DTW needs nonempty sequences");
  if (a.cols() != b.cols()) {
    Fail(ErrorKind::kCorrespondence, "DTW feature widths differ: " +
                                         std::to_string(a.cols()) + " vs " +
                                         std::to_string(b.cols()));
  }
  int band = std::numeric_limits<int>::max();
  if (options.window) band = std::max(*options.window, std::abs(n - m));

  // acc(i, j): cheapest path cost from (0, 0) through (i, j).
  Eigen::MatrixXd acc = Eigen::MatrixXd::Constant(n, m, kInf);
  for (int i = 0; i < n; ++i) {
    const int j_lo = band == std::numeric_limits<int>::max()
                         ? 0
                         : std::max(0, i - band);
    const int j_hi = band == std::numeric_limits<int>::max()
                         ? m - 1
                         : std::min(m - 1, i + band);
    for (int j = j_lo; j <= j_hi; ++j) {
      const double d = (a.row(i) - b.row(j)).norm();
      double prev;
      if (i == 0 && j == 0) {
        prev = 0.0;
      } else {
        prev = kInf;
        if (i > 0 && j > 0) prev = std::min(prev, acc(i - 1, j - 1));
        if (i > 0) prev = std::min(prev, acc(i - 1, j));
        if (j > 0) prev = std::min(prev, acc(i, j - 1));
      }
      acc(i, j) = prev + d;
    }
  }

  PairwiseAlignment out;
  out.cost = acc(n - 1, m - 1);
  int i = n - 1;
  int j = m - 1;
  out.path.emplace_back(i, j);
  while (i > 0 || j > 0) {
    const double diag = (i > 0 && j > 0) ? acc(i - 1, j - 1) : kInf;
    const double up = i > 0 ? acc(i - 1, j) : kInf;
    const double left = j > 0 ? acc(i, j - 1) : kInf;
    if (diag <= up && diag <= left) {
      --i;
      --j;
    } else if (up <= left) {
      --i;
    } else {
      --j;
    }
    out.path.emplace_back(i, j);
  }
  std::reverse(out.path.begin(), out.path.end());
  out.offset = ModeOfWarpingTimes(out.path);
  return out;
}

Eigen::MatrixXd CanonicalFeatures(const MotionSequence& seq,
                                  const SkeletonModel& model) {
  const int width = 3 * kNumJoints * seq.num_humans;
  Eigen::MatrixXd features(seq.size(), width);
  for (int t = 0; t < seq.size(); ++t) {
    const Eigen::MatrixX3d joints = FrameCanonicalJoints(seq.frames[t], model);
    if (joints.rows() * 3 != width) {
      Fail(ErrorKind::kCorrespondence,
           seq.camera_id + " frame " + std::to_string(t) +
               " does not hold " + std::to_string(seq.num_humans) + " people");
    }
    // Row-major flattening keeps joint rows contiguous.
    for (int r = 0; r < joints.rows(); ++r) {
      features.block<1, 3>(t, 3 * r) = joints.row(r);
    }
  }
  return features;
}

PairwiseAlignment PairwiseDtw(const MotionSequence& a, const MotionSequence& b,
                              const SkeletonModel& model,
                              const DtwOptions& options) {
  if (a.frames.empty() || b.frames.empty()) {
    Fail(ErrorKind::kInput, "empty motion sequence (" + a.camera_id + ", " +
                                b.camera_id + ")");
  }
  if (a.num_humans != b.num_humans) {
    Fail(ErrorKind::kCorrespondence,
         a.camera_id + " tracks " + std::to_string(a.num_humans) +
             " people but " + b.camera_id + " tracks " +
             std::to_string(b.num_humans));
  }
  const double rate = std::max(a.fps, b.fps);
  const Eigen::MatrixXd fa =
      CanonicalFeatures(a.fps == rate ? a : ResampleMotion(a, rate, model),
                        model);
  const Eigen::MatrixXd fb =
      CanonicalFeatures(b.fps == rate ? b : ResampleMotion(b, rate, model),
                        model);
  PairwiseAlignment out = DtwAlign(fa, fb, options);
  out.frame_rate = rate;
  return out;
}

AlignmentMatrices BuildMatrices(const std::vector<MotionSequence>& seqs,
                                const SkeletonModel& model,
                                const DtwOptions& options, int threads) {
  const int n = static_cast<int>(seqs.size());
  if (n < 2) {
    Fail(ErrorKind::kInput, "time synchronization needs at least 2 cameras, got " +
                                std::to_string(n));
  }
  double rate = 0.0;
  for (const auto& s : seqs) rate = std::max(rate, s.fps);

  // Features at the common rate, computed once per sequence.
  std::vector<Eigen::MatrixXd> features(n);
  for (int i = 0; i < n; ++i) {
    if (seqs[i].frames.empty()) {
      Fail(ErrorKind::kInput, "camera " + std::to_string(i) + " (" +
                                  seqs[i].camera_id + ") has no frames");
    }
    features[i] = CanonicalFeatures(
        seqs[i].fps == rate ? seqs[i] : ResampleMotion(seqs[i], rate, model),
        model);
  }

  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  AlignmentMatrices mats;
  mats.cost = Eigen::MatrixXd::Zero(n, n);
  mats.offset = Eigen::MatrixXi::Zero(n, n);
  mats.frame_rate = rate;

  std::vector<std::string> errors(pairs.size());
  std::vector<ErrorKind> kinds(pairs.size(), ErrorKind::kInput);
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (size_t p = next++; p < pairs.size(); p = next++) {
      const auto [i, j] = pairs[p];
      try {
        const PairwiseAlignment r = DtwAlign(features[i], features[j], options);
        mats.cost(i, j) = mats.cost(j, i) = r.cost;
        mats.offset(i, j) = r.offset;
        mats.offset(j, i) = -r.offset;
      } catch (const Error& e) {
        errors[p] = e.what();
        kinds[p] = e.kind();
      } catch (const std::exception& e) {
        errors[p] = e.what();
      }
    }
  };
  const int workers = std::clamp(threads, 1, static_cast<int>(pairs.size()));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (size_t p = 0; p < pairs.size(); ++p) {
    if (!errors[p].empty()) {
      Fail(kinds[p], "pair (" + std::to_string(pairs[p].first) + ", " +
                                  std::to_string(pairs[p].second) +
                                  "): " + errors[p]);
    }
  }
  return mats;
}

GlobalOffsets GlobalAlign(const AlignmentMatrices& mats) {
  const int n = static_cast<int>(mats.cost.rows());
  if (n < 2 || mats.cost.cols() != n || mats.offset.rows() != n ||
      mats.offset.cols() != n) {
    Fail(ErrorKind::kInput, "alignment matrices must be N x N with N >= 2");
  }
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  }
  // Stable sort keeps lexicographic order among equal costs.
  std::stable_sort(pairs.begin(), pairs.end(),
                   [&](const auto& p, const auto& q) {
                     return mats.cost(p.first, p.second) <
                            mats.cost(q.first, q.second);
                   });

  // group[c]: 0 for the global group, g > 0 for local group g, -1 unassigned.
  std::vector<int> group(n, -1);
  std::vector<int> dt(n, 0);
  int next_local = 1;
  const auto shift_group = [&](int from, int to, int shift) {
    for (int c = 0; c < n; ++c) {
      if (group[c] == from) {
        group[c] = to;
        dt[c] += shift;
      }
    }
  };

  {
    const auto [i, j] = pairs.front();
    dt[i] = 0;
    dt[j] = mats.offset(i, j);
    group[i] = group[j] = 0;
  }
  for (size_t k = 1; k < pairs.size(); ++k) {
    const auto [i, j] = pairs[k];
    const int rel = mats.offset(i, j);  // wanted: dt[j] - dt[i] == rel
    const int gi = group[i];
    const int gj = group[j];
    if (gi >= 0 && gi == gj) continue;  // already aligned together
    if (gi == -1 && gj == -1) {
      group[i] = group[j] = next_local++;
      dt[i] = 0;
      dt[j] = rel;
    } else if (gj == -1) {
      group[j] = gi;
      dt[j] = dt[i] + rel;
    } else if (gi == -1) {
      group[i] = gj;
      dt[i] = dt[j] - rel;
    } else if (gi == 0) {
      shift_group(gj, 0, dt[i] + rel - dt[j]);
    } else if (gj == 0) {
      shift_group(gi, 0, dt[j] - rel - dt[i]);
    } else {
      // Two local groups: the later one joins the earlier one.
      shift_group(gj, gi, dt[i] + rel - dt[j]);
    }
  }

  GlobalOffsets out;
  out.offsets = dt;
  out.anchor = pairs.front().first;
  return out;
}

GlobalOffsets Reanchor(const GlobalOffsets& offsets, int anchor) {
  if (anchor < 0 || anchor >= static_cast<int>(offsets.offsets.size())) {
    Fail(ErrorKind::kInput, "anchor index out of range");
  }
  GlobalOffsets out = offsets;
  const int base = offsets.offsets[anchor];
  for (int& o : out.offsets) o -= base;
  out.anchor = anchor;
  return out;
}

int SelectAnchorByCost(const Eigen::MatrixXd& cost) {
  const Eigen::VectorXd total = cost.rowwise().sum();
  int best = 0;
  for (int i = 1; i < total.size(); ++i) {
    if (total(i) < total(best)) best = i;
  }
  return best;
}

}  // namespace hmcal
