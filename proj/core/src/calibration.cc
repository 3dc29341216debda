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

#include "hmcal/calibration.h"

#include <algorithm>
#include <limits>

#include "hmcal/error.h"
#include "hmcal/so3.h"

namespace hmcal {

CameraPose CameraCalibration::PoseAt(int frame) const {
  const CameraPose& p = base.PoseAt(frame);
  if (!base.IsStatic() || (rot_delta.isZero(0.0) && center_delta.isZero(0.0))) {
    return p;
  }
  const Eigen::Matrix3d r = p.rotation * so3::Exp(rot_delta).transpose();
  return CameraPose::FromCenter(r, p.Center() + center_delta, p.timestamp);
}

CalibInput CalibrationState::ToCalibInput() const {
  CalibInput in;
  for (const CameraCalibration& c : cameras) {
    in.camera_ids.push_back(c.camera_id);
    in.poses.push_back(c.PoseAt(c.base.poses.front().timestamp));
    in.offsets.push_back(c.offset);
  }
  return in;
}

TimeMapping TimeMapping::Covering(const CalibrationState& state,
                                  const std::vector<int>& frame_counts,
                                  double margin) {
  if (static_cast<int>(frame_counts.size()) != state.size() || state.size() == 0) {
    Fail(ErrorKind::kInput, "frame counts must match cameras");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 0; i < state.size(); ++i) {
    lo = std::min(lo, state.GlobalTime(i, 0));
    hi = std::max(hi, state.GlobalTime(i, std::max(frame_counts[i] - 1, 0)));
  }
  TimeMapping m;
  m.lo = lo - margin;
  m.hi = hi + margin;
  if (!(m.hi > m.lo)) m.hi = m.lo + 1.0;
  return m;
}

}  // namespace hmcal
