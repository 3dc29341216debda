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

#ifndef HMCAL_REGULARIZERS_H_
#define HMCAL_REGULARIZERS_H_

#include <vector>

#include "hmcal/planefield.h"

namespace hmcal {

struct RegularizerWeights {
  double tv_space = 0.001;
  double smooth_time = 0.01;
  double l1_time = 0.001;
  double density_l1 = 0.01;
};

struct RegularizerValues {
  double tv_space = 0.0;
  double smooth_time = 0.0;
  double l1_time = 0.0;
};

// Unweighted field regularizers:
//   tv_space: mean squared difference of adjacent entries on space planes;
//   smooth_time: mean squared second difference along time on space-time
//   planes; l1_time: mean |entry - 1| on space-time planes.
// When `grad` is non-null, adds the gradient of
// scale * (w.tv_space * tv + w.smooth_time * smooth + w.l1_time * l1).
RegularizerValues FieldRegularizers(const PlaneField& field,
                                    const RegularizerWeights& weights,
                                    double scale, std::vector<double>* grad);

}  // namespace hmcal

#endif  // HMCAL_REGULARIZERS_H_
