// Copyright The lfraster Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "lfr/camera.hpp"
#include "lfr/display.hpp"
#include "lfr/raster.hpp"

namespace lfr::coalesce {

struct WarpModel {
  int warp_size = 32;
  int transaction_bytes = 128;
  int element_bytes = 32;

  /// Throws InvalidConfig.
  void validate() const;
};

enum class ThreadMapping { kRaster, kRemapped };

const char* to_string(ThreadMapping mapping);

struct MappingReport {
  ThreadMapping mapping = ThreadMapping::kRaster;
  std::uint64_t total_warps = 0;
  /// histogram[n] = number of warps touching exactly n distinct lists.
  std::vector<std::uint64_t> distinct_lists_histogram;
  double distinct_lists_mean = 0.0;
  std::uint64_t transactions_total = 0;
  std::uint64_t transactions_ideal = 0;
  double divergence_ratio = 1.0;
};

struct CoalesceReport {
  WarpModel model;
  MappingReport raster;
  MappingReport remapped;

  /// raster.transactions_total / remapped.transactions_total.
  double reduction_ratio() const;
};

/// Replays the blend stage's list reads warp by warp. Warps are
/// `warp_size` consecutive ranks of one tile (the last warp of a tile may be
/// partial). At step s each thread whose list still has entries reads record
/// s of its (tile, cluster) list at byte address (S + s) * element_bytes; the
/// distinct aligned transaction_bytes segments of the warp are counted. Early
/// alpha termination and caches are not modeled.
///
/// `remap` supplies the view-coherent order; the raster order is row-major.
/// Throws InconsistentInputs.
MappingReport simulate_blend_access(const raster::GaussianRangeTable& ranges,
                                    const display::RemapTable& remap,
                                    const display::ViewpointMatrix& matrix,
                                    const camera::Clustering& clustering,
                                    const WarpModel& model, ThreadMapping mapping);

/// Same replay with an explicit rank order (used by both mappings).
MappingReport simulate_with_order(const raster::GaussianRangeTable& ranges,
                                  const display::RemapTable& order,
                                  const display::ViewpointMatrix& matrix,
                                  const camera::Clustering& clustering, const WarpModel& model);

CoalesceReport compare_mappings(const raster::GaussianRangeTable& ranges,
                                const display::RemapTable& remap,
                                const display::ViewpointMatrix& matrix,
                                const camera::Clustering& clustering, const WarpModel& model);

nlohmann::json to_json(const CoalesceReport& report);
std::string histogram_csv(const CoalesceReport& report);

}  // namespace lfr::coalesce
