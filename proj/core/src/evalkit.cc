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

#include "hmcal/evalkit.h"

#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "hmcal/error.h"
#include "hmcal/so3.h"

namespace hmcal {
namespace {

constexpr int kSsimWindow = 11;
constexpr double kSsimSigma = 1.5;

std::array<double, kSsimWindow> GaussianTaps() {
  std::array<double, kSsimWindow> taps{};
  double sum = 0.0;
  for (int i = 0; i < kSsimWindow; ++i) {
    const double x = i - kSsimWindow / 2;
    taps[i] = std::exp(-x * x / (2.0 * kSsimSigma * kSsimSigma));
    sum += taps[i];
  }
  for (double& t : taps) t /= sum;
  return taps;
}

void CheckSameShape(const Image& a, const Image& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    Fail(ErrorKind::kInput, "image sizes differ: " + std::to_string(a.width()) +
                                "x" + std::to_string(a.height()) + " vs " +
                                std::to_string(b.width()) + "x" +
                                std::to_string(b.height()));
  }
  if (a.empty()) Fail(ErrorKind::kInput, "empty image");
}

// Separable valid-mode Gaussian filter of one channel of f(a, b).
template <typename F>
std::vector<double> FilterValid(const Image& a, const Image& b, int c, F f,
                                int* out_w, int* out_h) {
  static const std::array<double, kSsimWindow> taps = GaussianTaps();
  const int w = a.width();
  const int h = a.height();
  const int ow = w - kSsimWindow + 1;
  const int oh = h - kSsimWindow + 1;
  std::vector<double> rows(static_cast<size_t>(ow) * h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) {
        s += taps[k] * f(a.at(x + k, y, c), b.at(x + k, y, c));
      }
      rows[y * ow + x] = s;
    }
  }
  std::vector<double> out(static_cast<size_t>(ow) * oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double s = 0.0;
      for (int k = 0; k < kSsimWindow; ++k) s += taps[k] * rows[(y + k) * ow + x];
      out[y * ow + x] = s;
    }
  }
  *out_w = ow;
  *out_h = oh;
  return out;
}

}  // namespace

std::vector<CameraPose> AlignCameraSets(const std::vector<CameraPose>& est,
                                        const std::vector<CameraPose>& ref) {
  if (est.size() != ref.size()) {
    Fail(ErrorKind::kInput, "camera sets differ in size");
  }
  if (est.size() < 3) {
    Fail(ErrorKind::kDegenerate, "camera alignment needs >= 3 cameras, got " +
                                     std::to_string(est.size()));
  }
  Eigen::MatrixX3d oe(est.size(), 3);
  Eigen::MatrixX3d orf(ref.size(), 3);
  for (size_t i = 0; i < est.size(); ++i) {
    oe.row(i) = est[i].Center().transpose();
    orf.row(i) = ref[i].Center().transpose();
  }
  const SimilarityTransform t = Procrustes(oe, orf);
  std::vector<CameraPose> out;
  out.reserve(est.size());
  for (const auto& p : est) out.push_back(ApplyToPose(p, t));
  return out;
}

double CameraExtent(const std::vector<CameraPose>& poses) {
  if (poses.empty()) return 0.0;
  Eigen::Vector3d lo = poses[0].Center();
  Eigen::Vector3d hi = lo;
  for (const auto& p : poses) {
    lo = lo.cwiseMin(p.Center());
    hi = hi.cwiseMax(p.Center());
  }
  return (hi - lo).norm();
}

CalibReport CalibErrors(const CalibInput& est, const CalibInput& gt) {
  const size_t n = gt.poses.size();
  if (est.poses.size() != n || est.offsets.size() != gt.offsets.size() ||
      (!gt.offsets.empty() && gt.offsets.size() != n)) {
    Fail(ErrorKind::kInput, "estimated and ground-truth camera sets differ");
  }
  if (!est.camera_ids.empty() && !gt.camera_ids.empty() &&
      est.camera_ids != gt.camera_ids) {
    Fail(ErrorKind::kInput, "camera ids differ between estimate and ground truth");
  }
  const std::vector<CameraPose> aligned = AlignCameraSets(est.poses, gt.poses);
  double shift = 0.0;
  for (size_t i = 0; i < gt.offsets.size(); ++i) {
    shift += est.offsets[i] - gt.offsets[i];
  }
  if (!gt.offsets.empty()) shift /= static_cast<double>(gt.offsets.size());

  CalibReport report;
  report.scene_extent = CameraExtent(gt.poses);
  report.mean.camera_id = "mean";
  for (size_t i = 0; i < n; ++i) {
    CameraError e;
    e.camera_id = i < gt.camera_ids.size() ? gt.camera_ids[i]
                                           : std::to_string(i);
    e.rotation_deg = so3::AngleBetween(aligned[i].rotation, gt.poses[i].rotation) *
                     180.0 / std::numbers::pi;
    e.translation = (aligned[i].Center() - gt.poses[i].Center()).norm();
    e.offset = gt.offsets.empty()
                   ? 0.0
                   : std::abs(est.offsets[i] - gt.offsets[i] - shift);
    report.mean.rotation_deg += e.rotation_deg;
    report.mean.translation += e.translation;
    report.mean.offset += e.offset;
    report.cameras.push_back(e);
  }
  report.mean.rotation_deg /= static_cast<double>(n);
  report.mean.translation /= static_cast<double>(n);
  report.mean.offset /= static_cast<double>(n);
  return report;
}

double Psnr(const Image& rendered, const Image& reference) {
  CheckSameShape(rendered, reference);
  double sse = 0.0;
  for (size_t i = 0; i < rendered.data().size(); ++i) {
    const double d = rendered.data()[i] - reference.data()[i];
    sse += d * d;
  }
  const double mse = sse / static_cast<double>(rendered.data().size());
  if (mse == 0.0) return kPsnrIdenticalSentinel;
  return 10.0 * std::log10(1.0 / mse);
}

double Ssim(const Image& rendered, const Image& reference) {
  CheckSameShape(rendered, reference);
  if (rendered.width() < kSsimWindow || rendered.height() < kSsimWindow) {
    Fail(ErrorKind::kInput, "SSIM needs images of at least 11x11 pixels");
  }
  constexpr double c1 = 0.01 * 0.01;
  constexpr double c2 = 0.03 * 0.03;
  double total = 0.0;
  size_t count = 0;
  for (int c = 0; c < 3; ++c) {
    int w = 0;
    int h = 0;
    const auto mu_a = FilterValid(rendered, reference, c,
                                  [](double a, double) { return a; }, &w, &h);
    const auto mu_b = FilterValid(rendered, reference, c,
                                  [](double, double b) { return b; }, &w, &h);
    const auto aa = FilterValid(rendered, reference, c,
                                [](double a, double) { return a * a; }, &w, &h);
    const auto bb = FilterValid(rendered, reference, c,
                                [](double, double b) { return b * b; }, &w, &h);
    const auto ab = FilterValid(rendered, reference, c,
                                [](double a, double b) { return a * b; }, &w, &h);
    for (size_t i = 0; i < mu_a.size(); ++i) {
      const double va = aa[i] - mu_a[i] * mu_a[i];
      const double vb = bb[i] - mu_b[i] * mu_b[i];
      const double cov = ab[i] - mu_a[i] * mu_b[i];
      total += ((2.0 * mu_a[i] * mu_b[i] + c1) * (2.0 * cov + c2)) /
               ((mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1) * (va + vb + c2));
      ++count;
    }
  }
  return total / static_cast<double>(count);
}

ImageMetrics ComputeImageMetrics(const Image& rendered, const Image& reference) {
  return {Psnr(rendered, reference), Ssim(rendered, reference)};
}

std::string FormatReportTable(const CalibReport& init,
                              const CalibReport* refine) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof(line), "%-12s | %9s %9s | %11s %11s | %9s %9s\n",
                "camera", "rot init", "rot ref", "trans init", "trans ref",
                "dt init", "dt ref");
  out += line;
  out += std::string(84, '-') + "\n";
  auto row = [&](const CameraError& a, const CameraError* b) {
    if (b) {
      std::snprintf(line, sizeof(line),
                    "%-12s | %9.4f %9.4f | %11.6f %11.6f | %9.4f %9.4f\n",
                    a.camera_id.c_str(), a.rotation_deg, b->rotation_deg,
                    a.translation, b->translation, a.offset, b->offset);
    } else {
      std::snprintf(line, sizeof(line),
                    "%-12s | %9.4f %9s | %11.6f %11s | %9.4f %9s\n",
                    a.camera_id.c_str(), a.rotation_deg, "-", a.translation,
                    "-", a.offset, "-");
    }
    out += line;
  };
  for (size_t i = 0; i < init.cameras.size(); ++i) {
    row(init.cameras[i],
        refine && i < refine->cameras.size() ? &refine->cameras[i] : nullptr);
  }
  out += std::string(84, '-') + "\n";
  row(init.mean, refine ? &refine->mean : nullptr);
  return out;
}

}  // namespace hmcal
