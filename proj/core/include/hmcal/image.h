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

#ifndef HMCAL_IMAGE_H_
#define HMCAL_IMAGE_H_

#include <filesystem>
#include <vector>

#include <Eigen/Core>

namespace hmcal {

// Row-major RGB image with channel values nominally in [0, 1].
class Image {
 public:
  Image() = default;
  Image(int width, int height, const Eigen::Vector3d& fill = Eigen::Vector3d::Zero());

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }

  double& at(int x, int y, int c) { return data_[(y * width_ + x) * 3 + c]; }
  double at(int x, int y, int c) const {
    return data_[(y * width_ + x) * 3 + c];
  }
  Eigen::Vector3d Pixel(int x, int y) const;
  void SetPixel(int x, int y, const Eigen::Vector3d& rgb);

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  // Rounds to 8 bits, as stored on disk.
  Image Quantized() const;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> data_;
};

// Binary P6, 8-bit.
void WritePpm(const Image& image, const std::filesystem::path& path);
Image ReadPpm(const std::filesystem::path& path);

}  // namespace hmcal

#endif  // HMCAL_IMAGE_H_
