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

#include "hmcal/regularizers.h"

#include <cmath>

namespace hmcal {
namespace {

struct Counts {
  size_t tv = 0;
  size_t smooth = 0;
  size_t l1 = 0;
};

Counts CountTerms(const PlaneField& field) {
  Counts n;
  const size_t f = field.feature_dim();
  for (int l = 0; l < field.num_levels(); ++l) {
    for (int p = 0; p < kNumPlanes; ++p) {
      const PlaneLayout& lay = field.layout(l, p);
      const size_t rows = lay.rows;
      const size_t cols = lay.cols;
      if (IsSpaceTimePlane(p)) {
        if (cols >= 3) n.smooth += rows * (cols - 2) * f;
        n.l1 += rows * cols * f;
      } else {
        n.tv += ((rows - 1) * cols + rows * (cols - 1)) * f;
      }
    }
  }
  return n;
}

}  // namespace

RegularizerValues FieldRegularizers(const PlaneField& field,
                                    const RegularizerWeights& weights,
                                    double scale, std::vector<double>* grad) {
  const Counts n = CountTerms(field);
  const int f = field.feature_dim();
  const double* params = field.params().data();
  const double g_tv = n.tv ? scale * weights.tv_space / n.tv : 0.0;
  const double g_smooth = n.smooth ? scale * weights.smooth_time / n.smooth : 0.0;
  const double g_l1 = n.l1 ? scale * weights.l1_time / n.l1 : 0.0;
  double* g = grad ? grad->data() : nullptr;
  double tv = 0.0;
  double smooth = 0.0;
  double l1 = 0.0;

  for (int l = 0; l < field.num_levels(); ++l) {
    for (int p = 0; p < kNumPlanes; ++p) {
      const PlaneLayout& lay = field.layout(l, p);
      const size_t row_step = static_cast<size_t>(lay.cols) * f;
      auto at = [&](int r, int c) {
        return lay.offset + static_cast<size_t>(r) * row_step +
               static_cast<size_t>(c) * f;
      };
      if (!IsSpaceTimePlane(p)) {
        for (int r = 0; r < lay.rows; ++r) {
          for (int c = 0; c < lay.cols; ++c) {
            const size_t i = at(r, c);
            for (int dir = 0; dir < 2; ++dir) {
              if (dir == 0 ? r + 1 >= lay.rows : c + 1 >= lay.cols) continue;
              const size_t j = dir == 0 ? at(r + 1, c) : at(r, c + 1);
              for (int k = 0; k < f; ++k) {
                const double d = params[j + k] - params[i + k];
                tv += d * d;
                if (g) {
                  g[j + k] += 2.0 * g_tv * d;
                  g[i + k] -= 2.0 * g_tv * d;
                }
              }
            }
          }
        }
        continue;
      }
      // Space-time planes: columns run along time.
      for (int r = 0; r < lay.rows; ++r) {
        for (int c = 0; c < lay.cols; ++c) {
          const size_t i = at(r, c);
          for (int k = 0; k < f; ++k) {
            const double d = params[i + k] - 1.0;
            l1 += std::abs(d);
            if (g && d != 0.0) g[i + k] += g_l1 * (d > 0 ? 1.0 : -1.0);
          }
          if (c + 2 >= lay.cols) continue;
          const size_t j = at(r, c + 1);
          const size_t m = at(r, c + 2);
          for (int k = 0; k < f; ++k) {
            const double d = params[i + k] - 2.0 * params[j + k] + params[m + k];
            smooth += d * d;
            if (g) {
              g[i + k] += 2.0 * g_smooth * d;
              g[j + k] -= 4.0 * g_smooth * d;
              g[m + k] += 2.0 * g_smooth * d;
            }
          }
        }
      }
    }
  }
  RegularizerValues v;
  v.tv_space = n.tv ? tv / n.tv : 0.0;
  v.smooth_time = n.smooth ? smooth / n.smooth : 0.0;
  v.l1_time = n.l1 ? l1 / n.l1 : 0.0;
  return v;
}

}  // namespace hmcal
