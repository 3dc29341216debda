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


#include <benchmark/benchmark.h>

#include <vector>

#include <Eigen/Core>

#include "hmcal/decoders.h"
#include "hmcal/planefield.h"
#include "hmcal/posealign.h"
#include "hmcal/render.h"
#include "hmcal/rng.h"
#include "hmcal/skeleton.h"
#include "hmcal/so3.h"
#include "hmcal/synth.h"
#include "hmcal/timesync.h"

namespace hmcal {
namespace {

Eigen::MatrixXd RandomSequence(Rng& rng, int frames, int dim) {
  Eigen::MatrixXd m(frames, dim);
  for (int i = 0; i < m.size(); ++i) m.data()[i] = rng.Normal();
  return m;
}

void BM_DtwAlign(benchmark::State& state) {
  Rng rng(1);
  const int n = static_cast<int>(state.range(0));
  const Eigen::MatrixXd a = RandomSequence(rng, n, 36);
  const Eigen::MatrixXd b = RandomSequence(rng, n, 36);
  for (auto _ : state) benchmark::DoNotOptimize(DtwAlign(a, b));
  state.SetComplexityN(n);
}
BENCHMARK(BM_DtwAlign)->RangeMultiplier(2)->Range(64, 512)->Complexity(benchmark::oNSquared);

void BM_GlobalAlign(benchmark::State& state) {
  SceneSpec spec;
  spec.num_cameras = static_cast<int>(state.range(0));
  spec.frames = 270;
  spec.min_overlap = 150;
  spec.max_offset = 120;
  spec.image_width = spec.image_height = 0;
  const Dataset d = Generate(spec);
  for (auto _ : state) {
    benchmark::DoNotOptimize(GlobalAlign(BuildMatrices(d.motions, SkeletonModel::Default())));
  }
}
BENCHMARK(BM_GlobalAlign)->Arg(4)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_Procrustes(benchmark::State& state) {
  Rng rng(2);
  const int n = static_cast<int>(state.range(0));
  Eigen::MatrixX3d src(n, 3);
  for (int i = 0; i < src.size(); ++i) src.data()[i] = rng.Normal();
  const Eigen::Matrix3d r = so3::Exp(Eigen::Vector3d(0.3, -0.2, 0.9));
  const Eigen::MatrixX3d dst = (2.5 * src * r.transpose()).rowwise() +
                               Eigen::RowVector3d(1.0, -2.0, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(Procrustes(src, dst));
}
BENCHMARK(BM_Procrustes)->Arg(10)->Arg(100)->Arg(1000);

struct RenderFixture {
  RenderFixture(int rays, int samples)
      : field(FieldConfig()), decoders(DecoderConfig{32, 32}) {
    Rng rng(3);
    field.InitDefault(rng);
    decoders.Init(rng);
    config.samples = samples;
    batch.Resize(rays);
    targets.resize(3, rays);
    for (int i = 0; i < rays; ++i) {
      const Eigen::Vector3d o(rng.Normal(), rng.Normal(), rng.Normal());
      const Eigen::Vector3d origin = 3.0 * o.normalized();
      const Eigen::Vector3d aim(rng.Uniform(-0.5, 0.5), rng.Uniform(-0.5, 0.5),
                                rng.Uniform(-0.5, 0.5));
      batch.Set(i, {origin, (aim - origin).normalized()}, rng.Uniform());
      targets.col(i) = Eigen::Vector3d(rng.Uniform(), rng.Uniform(), rng.Uniform());
    }
  }

  static PlaneFieldConfig FieldConfig() {
    PlaneFieldConfig c;
    c.spatial_resolution = {8, 16};
    c.time_resolution = 16;
    c.feature_dim = 16;
    return c;
  }

  RenderParams Params(int threads) const {
    return {&field, &decoders, level_weights, config, threads};
  }

  PlaneField field;
  Decoders decoders;
  RenderConfig config;
  std::vector<double> level_weights = {1.0, 1.0};
  RayBatch batch;
  Eigen::Matrix3Xd targets;
};

void BM_RenderForward(benchmark::State& state) {
  const RenderFixture f(static_cast<int>(state.range(0)), 24);
  const RenderParams params = f.Params(1);
  for (auto _ : state) benchmark::DoNotOptimize(RenderBatch(params, f.batch));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RenderForward)->Arg(64)->Arg(1024)->Unit(benchmark::kMicrosecond);

void BM_RenderLossAndGradients(benchmark::State& state) {
  const RenderFixture f(static_cast<int>(state.range(0)), 24);
  const RenderParams params = f.Params(static_cast<int>(state.range(1)));
  RenderGradients grads;
  for (auto _ : state) {
    benchmark::DoNotOptimize(LossAndGradients(params, f.batch, f.targets, 0.0, &grads));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RenderLossAndGradients)
    ->Args({64, 1})
    ->Args({1024, 1})
    ->Args({1024, 4})
    ->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace hmcal

BENCHMARK_MAIN();
