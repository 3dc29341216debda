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

#ifndef HMCAL_CHECKPOINT_H_
#define HMCAL_CHECKPOINT_H_

#include <filesystem>
#include <vector>

#include "hmcal/calibration.h"
#include "hmcal/decoders.h"
#include "hmcal/planefield.h"

namespace hmcal {

inline constexpr uint32_t kCheckpointVersion = 1;

// Binary layout: 8-byte magic "HMCALCKP", uint32 version, uint64 metadata
// length, JSON metadata (configs, step, camera ids and shapes), then raw
// little-endian doubles: field parameters, decoder parameters, and per
// camera rot_delta, center_delta, offset and base poses (R row-major, tau).
struct Checkpoint {
  int step = 0;
  PlaneFieldConfig field_config;
  std::vector<double> field;
  DecoderConfig decoder_config;
  std::vector<double> decoders;
  CalibrationState calibration;
  TimeMapping timing;
};

void WriteCheckpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint ReadCheckpoint(const std::filesystem::path& path);

}  // namespace hmcal

#endif  // HMCAL_CHECKPOINT_H_
