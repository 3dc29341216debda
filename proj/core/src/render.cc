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

#include "hmcal/render.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "hmcal/error.h"

namespace hmcal {
namespace {

constexpr int kChunkRays = 64;

struct Chunk {
  int begin = 0;
  int end = 0;
  Eigen::Matrix3Xd rgb;
  Eigen::VectorXd transmittance;
  Eigen::MatrixXd weights;
  double sq_sum = 0.0;
  double sigma_sum = 0.0;
  std::vector<double> g_field;
  std::vector<double> g_decoders;
  Eigen::Matrix3Xd d_origins;
  Eigen::Matrix3Xd d_directions;
  Eigen::VectorXd d_times;
};

struct ChunkJob {
  const RenderParams* params;
  const RayBatch* batch;
  const Eigen::Matrix3Xd* targets;  // null for forward-only
  double inv_rays;
  double density_coef;  // d loss / d sigma per sample from the density term
  bool want_weights;
};

void RunChunk(const ChunkJob& job, Chunk* chunk) {
  const RenderParams& p = *job.params;
  const RenderConfig& cfg = p.config;
  const RayBatch& batch = *job.batch;
  const int ns = cfg.samples;
  const int rays = chunk->end - chunk->begin;
  const int count = rays * ns;
  const double delta = (cfg.far - cfg.near) / ns;

  Eigen::Matrix3Xd points(3, count);
  const Eigen::Matrix3Xd dirs = batch.directions.middleCols(chunk->begin, rays);
  std::vector<double> times(count);
  std::vector<double> depth(count);
  for (int r = 0; r < rays; ++r) {
    const int ray = chunk->begin + r;
    for (int k = 0; k < ns; ++k) {
      const int s = r * ns + k;
      const double u = batch.jitter.empty()
                           ? 0.5
                           : batch.jitter[static_cast<size_t>(ray) * ns + k];
      depth[s] = cfg.near + (k + u) * delta;
      points.col(s) = batch.origins.col(ray) + depth[s] * batch.directions.col(ray);
      times[s] = batch.times[ray];
    }
  }

  FieldEncoder encoder(*p.field);
  const Eigen::MatrixXd& features = encoder.Forward(points, times, p.level_weights);
  Decoders::Cache cache;
  Eigen::VectorXd sigma;
  Eigen::Matrix3Xd color;
  const bool backward = job.targets != nullptr;
  p.decoders->Forward(features, dirs, ns, &sigma, &color, backward ? &cache : nullptr);

  // Compositing. trans[s] is the transmittance before sample s.
  std::vector<double> trans(count);
  std::vector<double> weight(count);
  chunk->rgb.resize(3, rays);
  chunk->transmittance.resize(rays);
  if (job.want_weights) chunk->weights.resize(ns, rays);
  for (int r = 0; r < rays; ++r) {
    double optical = 0.0;
    Eigen::Vector3d c = Eigen::Vector3d::Zero();
    for (int k = 0; k < ns; ++k) {
      const int s = r * ns + k;
      const double t_before = std::exp(-optical);
      optical += sigma(s) * delta;
      const double w = t_before - std::exp(-optical);
      trans[s] = t_before;
      weight[s] = w;
      c += w * color.col(s);
      if (job.want_weights) chunk->weights(k, r) = w;
    }
    const double t_final = std::exp(-optical);
    chunk->transmittance(r) = t_final;
    chunk->rgb.col(r) = c + t_final * cfg.background;
  }
  chunk->sigma_sum = sigma.sum();
  if (!backward) return;

  Eigen::VectorXd d_sigma(count);
  Eigen::Matrix3Xd d_color(3, count);
  chunk->sq_sum = 0.0;
  for (int r = 0; r < rays; ++r) {
    const int ray = chunk->begin + r;
    const Eigen::Vector3d residual = chunk->rgb.col(r) - job.targets->col(ray);
    chunk->sq_sum += residual.squaredNorm();
    const Eigen::Vector3d d_rgb = 2.0 * job.inv_rays * residual;
    // suffix = sum of w_j c_j over later samples plus the background term.
    Eigen::Vector3d suffix = chunk->transmittance(r) * cfg.background;
    for (int k = ns - 1; k >= 0; --k) {
      const int s = r * ns + k;
      const double t_after = trans[s] - weight[s];
      d_color.col(s) = weight[s] * d_rgb;
      d_sigma(s) = delta * d_rgb.dot(t_after * color.col(s) - suffix) +
                   job.density_coef;
      suffix += weight[s] * color.col(s);
    }
  }

  chunk->g_decoders.assign(p.decoders->params().size(), 0.0);
  chunk->g_field.assign(p.field->params().size(), 0.0);
  Eigen::MatrixXd d_features;
  Eigen::Matrix3Xd d_dirs;
  p.decoders->Backward(cache, d_sigma, d_color, chunk->g_decoders.data(),
                       &d_features, &d_dirs);
  Eigen::Matrix3Xd d_points;
  std::vector<double> d_times;
  encoder.Backward(d_features, &chunk->g_field, &d_points, &d_times);

  chunk->d_origins.setZero(3, rays);
  chunk->d_directions = d_dirs;
  chunk->d_times.setZero(rays);
  for (int r = 0; r < rays; ++r) {
    for (int k = 0; k < ns; ++k) {
      const int s = r * ns + k;
      chunk->d_origins.col(r) += d_points.col(s);
      chunk->d_directions.col(r) += depth[s] * d_points.col(s);
      chunk->d_times(r) += d_times[s];
    }
  }
}

std::vector<Chunk> RunChunks(const ChunkJob& job, int rays, int threads) {
  std::vector<Chunk> chunks;
  for (int b = 0; b < rays; b += kChunkRays) {
    Chunk c;
    c.begin = b;
    c.end = std::min(rays, b + kChunkRays);
    chunks.push_back(std::move(c));
  }
  const int workers = std::max(1, std::min<int>(threads, chunks.size()));
  if (workers == 1) {
    for (Chunk& c : chunks) RunChunk(job, &c);
    return chunks;
  }
  std::atomic<size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (size_t i = next++; i < chunks.size(); i = next++) {
          RunChunk(job, &chunks[i]);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return chunks;
}

void CheckBatch(const RenderParams& params, const RayBatch& batch) {
  if (!params.field || !params.decoders) {
    Fail(ErrorKind::kInput, "render needs a field and decoders");
  }
  ValidateRenderConfig(params.config);
  if (static_cast<int>(params.level_weights.size()) != params.field->num_levels()) {
    Fail(ErrorKind::kInput, "level weight count does not match field levels");
  }
  if (params.decoders->config().feature_dim != params.field->fused_dim()) {
    Fail(ErrorKind::kConfig, "decoder input size does not match field features");
  }
  const int n = batch.size();
  if (batch.directions.cols() != n || static_cast<int>(batch.times.size()) != n) {
    Fail(ErrorKind::kInput, "ray batch fields differ in length");
  }
  if (!batch.jitter.empty() &&
      batch.jitter.size() != static_cast<size_t>(n) * params.config.samples) {
    Fail(ErrorKind::kInput, "jitter must hold one value per ray sample");
  }
}

}  // namespace

void ValidateRenderConfig(const RenderConfig& config) {
  if (config.samples < 1) Fail(ErrorKind::kConfig, "samples per ray must be >= 1");
  if (!(config.near < config.far)) Fail(ErrorKind::kConfig, "near must be < far");
}

Ray GenerateRay(const CameraPose& pose, const Intrinsics& intrinsics, double px,
                double py) {
  const Eigen::Vector3d cam((px - intrinsics.cx) / intrinsics.fx,
                            (py - intrinsics.cy) / intrinsics.fy, 1.0);
  const Eigen::Vector3d d = pose.rotation.transpose() * cam;
  const double n = d.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    Fail(ErrorKind::kNumerical, "degenerate ray direction");
  }
  return {pose.Center(), d / n};
}

void RayBatch::Resize(int n) {
  origins.resize(3, n);
  directions.resize(3, n);
  times.assign(n, 0.0);
  jitter.clear();
}

void RayBatch::Set(int i, const Ray& ray, double time) {
  origins.col(i) = ray.origin;
  directions.col(i) = ray.direction;
  times[i] = time;
}

RenderOutput RenderBatch(const RenderParams& params, const RayBatch& batch,
                         bool want_weights) {
  CheckBatch(params, batch);
  const int n = batch.size();
  ChunkJob job{&params, &batch, nullptr, 0.0, 0.0, want_weights};
  std::vector<Chunk> chunks = RunChunks(job, n, params.threads);
  RenderOutput out;
  out.rgb.resize(3, n);
  out.transmittance.resize(n);
  if (want_weights) out.weights.resize(params.config.samples, n);
  for (const Chunk& c : chunks) {
    const int len = c.end - c.begin;
    out.rgb.middleCols(c.begin, len) = c.rgb;
    out.transmittance.segment(c.begin, len) = c.transmittance;
    if (want_weights) out.weights.middleCols(c.begin, len) = c.weights;
  }
  return out;
}

LossTerms LossAndGradients(const RenderParams& params, const RayBatch& batch,
                           const Eigen::Matrix3Xd& targets,
                           double density_weight, RenderGradients* grads) {
  CheckBatch(params, batch);
  const int n = batch.size();
  if (n == 0) Fail(ErrorKind::kInput, "empty ray batch");
  if (targets.cols() != n) Fail(ErrorKind::kInput, "target count differs from rays");
  const double samples = static_cast<double>(n) * params.config.samples;
  ChunkJob job{&params, &batch, &targets, 1.0 / n, density_weight / samples, false};
  std::vector<Chunk> chunks = RunChunks(job, n, params.threads);

  RenderGradients scratch;
  if (!grads) grads = &scratch;
  grads->field.assign(params.field->params().size(), 0.0);
  grads->decoders.assign(params.decoders->params().size(), 0.0);
  grads->d_origins.resize(3, n);
  grads->d_directions.resize(3, n);
  grads->d_times.resize(n);
  LossTerms terms;
  double sq = 0.0;
  double sig = 0.0;
  for (const Chunk& c : chunks) {
    sq += c.sq_sum;
    sig += c.sigma_sum;
    for (size_t i = 0; i < c.g_field.size(); ++i) grads->field[i] += c.g_field[i];
    for (size_t i = 0; i < c.g_decoders.size(); ++i) {
      grads->decoders[i] += c.g_decoders[i];
    }
    const int len = c.end - c.begin;
    grads->d_origins.middleCols(c.begin, len) = c.d_origins;
    grads->d_directions.middleCols(c.begin, len) = c.d_directions;
    grads->d_times.segment(c.begin, len) = c.d_times;
  }
  terms.photometric = sq / n;
  terms.density_mean = sig / samples;
  return terms;
}

double PhotometricLoss(const Eigen::Matrix3Xd& rendered,
                       const Eigen::Matrix3Xd& target) {
  if (rendered.cols() != target.cols()) {
    Fail(ErrorKind::kInput, "rendered and target batches differ in size");
  }
  if (rendered.cols() == 0) return 0.0;
  return (rendered - target).colwise().squaredNorm().sum() / rendered.cols();
}

}  // namespace hmcal
