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

#include "hmcal/image.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "hmcal/error.h"

namespace hmcal {
namespace {

uint8_t ToByte(double v) {
  return static_cast<uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

}  // namespace

Image::Image(int width, int height, const Eigen::Vector3d& fill)
    : width_(width), height_(height), data_(3 * width * height) {
  for (int i = 0; i < width * height; ++i) {
    for (int c = 0; c < 3; ++c) data_[3 * i + c] = fill(c);
  }
}

Eigen::Vector3d Image::Pixel(int x, int y) const {
  const double* p = &data_[(y * width_ + x) * 3];
  return Eigen::Vector3d(p[0], p[1], p[2]);
}

void Image::SetPixel(int x, int y, const Eigen::Vector3d& rgb) {
  double* p = &data_[(y * width_ + x) * 3];
  p[0] = rgb(0);
  p[1] = rgb(1);
  p[2] = rgb(2);
}

Image Image::Quantized() const {
  Image out = *this;
  for (double& v : out.data_) v = ToByte(v) / 255.0;
  return out;
}

void WritePpm(const Image& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorKind::kData, "cannot write " + path.string());
  out << "P6\n" << image.width() << " " << image.height() << "\n255\n";
  std::vector<uint8_t> bytes(image.data().size());
  std::transform(image.data().begin(), image.data().end(), bytes.begin(),
                 ToByte);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) Fail(ErrorKind::kData, "short write to " + path.string());
}

Image ReadPpm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorKind::kData, "cannot read " + path.string());
  std::string magic;
  int width = 0;
  int height = 0;
  int maxval = 0;
  in >> magic >> width >> height >> maxval;
  in.get();  // single whitespace before the raster
  if (magic != "P6" || width <= 0 || height <= 0 || maxval != 255) {
    Fail(ErrorKind::kData, path.string() + " is not an 8-bit binary PPM");
  }
  std::vector<uint8_t> bytes(3 * static_cast<size_t>(width) * height);
  in.read(reinterpret_cast<char*>(bytes.data()),
          static_cast<std::streamsize>(bytes.size()));
  if (!in) Fail(ErrorKind::kData, path.string() + " is truncated");
  Image image(width, height);
  for (size_t i = 0; i < bytes.size(); ++i) image.data()[i] = bytes[i] / 255.0;
  return image;
}

}  // namespace hmcal
