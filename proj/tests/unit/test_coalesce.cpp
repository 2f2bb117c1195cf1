// Copyright The lfraster Authors
// SPDX-License-Identifier: Apache-2.0

#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "desk.hpp"
#include "lfr/coalesce.hpp"
#include "lfr/error.hpp"

namespace lfr::coalesce {
namespace {

using camera::Clustering;
using raster::GaussianRangeTable;

// Every (tile, cluster) list holds `len` records, laid out contiguously.
GaussianRangeTable uniform_ranges(int tiles, int clusters, std::uint32_t len) {
  std::vector<std::uint32_t> offsets(static_cast<std::size_t>(tiles) * clusters + 1);
  for (std::size_t i = 0; i < offsets.size(); ++i) offsets[i] = static_cast<std::uint32_t>(i) * len;
  return GaussianRangeTable(tiles, clusters, std::move(offsets));
}

GaussianRangeTable random_ranges(int tiles, int clusters, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint32_t> len(0, 40);
  std::vector<std::uint32_t> offsets(static_cast<std::size_t>(tiles) * clusters + 1, 0);
  for (std::size_t i = 1; i < offsets.size(); ++i) offsets[i] = offsets[i - 1] + len(rng);
  return GaussianRangeTable(tiles, clusters, std::move(offsets));
}

display::DisplayConfig alternating_panel() {
  display::DisplayConfig c;
  c.width = 8;
  c.height = 4;
  c.tilt = 0.0;
  c.line_count = 2.0;
  c.lens_offset = 0.0;
  c.num_views = 2;
  c.tile_size = 8;
  return c;
}

TEST(Coalesce, AlternatingViewsHandExample) {
  const auto cfg = alternating_panel();
  const auto m = display::build_viewpoint_matrix(cfg);
  for (std::size_t s = 0; s < cfg.num_subpixels(); ++s) ASSERT_EQ(m[s], s % 2);
  const Clustering cl(2, 1);
  const auto r = compare_mappings(uniform_ranges(1, 2, 8), display::build_remap_table(m, cfg), m, cl, {});
  EXPECT_EQ(r.raster.total_warps, 3u);
  EXPECT_EQ(r.raster.transactions_total, 48u);
  EXPECT_EQ(r.remapped.transactions_total, 32u);
  EXPECT_EQ(r.raster.transactions_ideal, 24u);
  EXPECT_EQ(r.remapped.transactions_ideal, 24u);
  EXPECT_DOUBLE_EQ(r.raster.distinct_lists_mean, 2.0);
  EXPECT_DOUBLE_EQ(r.remapped.distinct_lists_mean, 4.0 / 3.0);
  EXPECT_EQ(r.remapped.distinct_lists_histogram, (std::vector<std::uint64_t>{0, 2, 1}));
  EXPECT_DOUBLE_EQ(r.reduction_ratio(), 1.5);
  // One cluster spanning both views needs no remapping.
  const auto merged = compare_mappings(uniform_ranges(1, 1, 8), display::build_remap_table(m, cfg), m,
                                       Clustering(2, 2), {});
  EXPECT_EQ(merged.raster.transactions_total, merged.remapped.transactions_total);
  EXPECT_DOUBLE_EQ(merged.raster.divergence_ratio, 1.0);
}

TEST(Coalesce, SingleViewMappingsAgree) {
  const auto cfg = test::desk_display(64, 48, 1);
  const auto m = display::build_viewpoint_matrix(cfg);
  std::mt19937_64 rng(1);
  const auto ranges = random_ranges(cfg.num_tiles(), 1, rng);
  const auto r = compare_mappings(ranges, display::build_remap_table(m, cfg), m, Clustering(1, 1), {});
  EXPECT_EQ(r.raster.transactions_total, r.remapped.transactions_total);
  EXPECT_EQ(r.raster.distinct_lists_histogram, r.remapped.distinct_lists_histogram);
}

TEST(Coalesce, SingleThreadWarpsAgree) {
  const auto cfg = test::desk_display(64, 48, 8);
  const auto m = display::build_viewpoint_matrix(cfg);
  std::mt19937_64 rng(2);
  const auto ranges = random_ranges(cfg.num_tiles(), 8, rng);
  WarpModel w;
  w.warp_size = 1;
  const auto r = compare_mappings(ranges, display::build_remap_table(m, cfg), m, Clustering(8, 1), w);
  EXPECT_EQ(r.raster.transactions_total, r.remapped.transactions_total);
  EXPECT_EQ(r.raster.total_warps, cfg.num_subpixels());
}

TEST(Coalesce, LenticularRemapNeverCostsMore) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> tilt(-0.4, 0.4), lx(2.0, 12.0), off(-5, 5);
  std::uniform_int_distribution<int> views(2, 40), dim(8, 80), size(1, 4);
  for (int trial = 0; trial < 40; ++trial) {
    display::DisplayConfig c;
    c.width = dim(rng);
    c.height = dim(rng);
    c.tilt = tilt(rng);
    c.line_count = lx(rng);
    c.lens_offset = off(rng);
    c.num_views = views(rng);
    c.tile_size = 16;
    const auto m = display::build_viewpoint_matrix(c);
    const Clustering cl(c.num_views, size(rng));
    const auto ranges = random_ranges(c.num_tiles(), cl.num_clusters(), rng);
    const auto r = compare_mappings(ranges, display::build_remap_table(m, c), m, cl, {});
    for (const auto* rep : {&r.raster, &r.remapped}) {
      EXPECT_GE(rep->transactions_total, rep->transactions_ideal);
      EXPECT_EQ(std::accumulate(rep->distinct_lists_histogram.begin(),
                                rep->distinct_lists_histogram.end(), std::uint64_t{0}),
                rep->total_warps);
    }
    EXPECT_LE(r.remapped.distinct_lists_mean, r.raster.distinct_lists_mean + 1e-12);
  }
}

TEST(Coalesce, DeskRenderBenefitsAndIsDeterministic) {
  const auto cfg = test::desk_display();
  const auto rig = test::desk_rig(cfg, 8.0);
  raster::RenderOptions o;
  o.cluster_size = 1;
  o.keep_artifacts = true;
  const auto res = raster::render_lightfield(test::desk_scene(2000), cfg, rig, o);
  const auto& art = *res.artifacts;
  const auto m = display::build_viewpoint_matrix(cfg);
  const auto remap = display::build_remap_table(m, cfg);
  const auto a = compare_mappings(art.sorted.ranges, remap, m, art.clustering, {});
  EXPECT_LT(a.remapped.transactions_total, a.raster.transactions_total);
  EXPECT_LT(a.remapped.distinct_lists_mean, a.raster.distinct_lists_mean);
  EXPECT_GT(a.reduction_ratio(), 1.0);
  const auto b = compare_mappings(art.sorted.ranges, remap, m, art.clustering, {});
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
  EXPECT_EQ(histogram_csv(a), histogram_csv(b));
  EXPECT_EQ(histogram_csv(a).substr(0, 45), "distinct_lists,raster_warps,remapped_warps\n0,");
}

TEST(Coalesce, Errors) {
  const auto cfg = alternating_panel();
  const auto m = display::build_viewpoint_matrix(cfg);
  const auto remap = display::build_remap_table(m, cfg);
  WarpModel bad;
  bad.element_bytes = 48;
  EXPECT_THROW(compare_mappings(uniform_ranges(1, 2, 1), remap, m, Clustering(2, 1), bad), Error);
  bad = {};
  bad.warp_size = 0;
  EXPECT_THROW(bad.validate(), Error);
  try {
    compare_mappings(uniform_ranges(1, 3, 1), remap, m, Clustering(2, 1), {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInconsistentInputs);
  }
}

}  // namespace
}  // namespace lfr::coalesce
