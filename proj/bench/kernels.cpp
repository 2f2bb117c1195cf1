// Copyright The lfraster Authors
// SPDX-License-Identifier: Apache-2.0

// Parallel kernels against their serial references on the desk scene.

#include <benchmark/benchmark.h>

#include "desk.hpp"
#include "lfr/oracle.hpp"
#include "lfr/raster.hpp"

namespace {

using namespace lfr;

struct Desk {
  display::DisplayConfig cfg = test::desk_display(480, 270, 24);
  scene::GaussianScene scene = test::desk_scene(4000);
  std::vector<camera::Camera> rig = test::desk_rig(cfg, 23.0);
  camera::Clustering cl{24, 4};
  display::ViewpointMatrix matrix = display::build_viewpoint_matrix(cfg);
  display::RemapTable remap = display::build_remap_table(matrix, cfg);
  raster::ProjectionBuffers buffers = raster::project_all(scene, rig, cl);
  std::vector<raster::KeyedSplat> keys = raster::generate_keys(buffers, cl, cfg);
  raster::SortedSplats sorted = raster::sort_splats(keys, cfg.num_tiles(), cl.num_clusters());
};

const Desk& desk() {
  static const Desk d;
  return d;
}

void BM_Keys(benchmark::State& state) {
  const auto& d = desk();
  for (auto _ : state) benchmark::DoNotOptimize(raster::generate_keys(d.buffers, d.cl, d.cfg));
}

void BM_KeysReference(benchmark::State& state) {
  const auto& d = desk();
  for (auto _ : state) benchmark::DoNotOptimize(raster::generate_keys_reference(d.buffers, d.cl, d.cfg));
}

void BM_Sort(benchmark::State& state) {
  const auto& d = desk();
  for (auto _ : state) {
    benchmark::DoNotOptimize(raster::sort_splats(d.keys, d.cfg.num_tiles(), d.cl.num_clusters()));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(d.keys.size()));
}

void BM_SortReference(benchmark::State& state) {
  const auto& d = desk();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        raster::sort_splats_reference(d.keys, d.cfg.num_tiles(), d.cl.num_clusters()));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(d.keys.size()));
}

void BM_Blend(benchmark::State& state) {
  const auto& d = desk();
  for (auto _ : state) {
    benchmark::DoNotOptimize(raster::blend(d.sorted, d.buffers, d.cl, d.remap, d.matrix, {0, 0, 0}));
  }
}

void BM_BlendReference(benchmark::State& state) {
  const auto& d = desk();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        raster::blend_reference(d.sorted, d.buffers, d.cl, d.remap, d.matrix, {0, 0, 0}));
  }
}

void BM_RemapTable(benchmark::State& state) {
  const auto& d = desk();
  for (auto _ : state) benchmark::DoNotOptimize(display::build_remap_table(d.matrix, d.cfg));
}

void BM_Pipeline(benchmark::State& state) {
  const auto& d = desk();
  const raster::LightFieldRenderer r(d.cfg);
  raster::RenderOptions o;
  o.cluster_size = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(r.render(d.scene, d.rig, o));
}

void BM_FullFrame(benchmark::State& state) {
  const auto& d = desk();
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle::render_lightfield_fullframe(d.scene, d.cfg, d.rig, {0, 0, 0}));
  }
}

BENCHMARK(BM_Keys)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_KeysReference)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Sort)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SortReference)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Blend)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BlendReference)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RemapTable)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Pipeline)->Arg(1)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FullFrame)->Unit(benchmark::kMillisecond)->UseRealTime()->Iterations(2);

}  // namespace

BENCHMARK_MAIN();
