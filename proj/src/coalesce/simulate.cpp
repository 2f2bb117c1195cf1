// Copyright The lfraster Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <sstream>

#include "lfr/coalesce.hpp"
#include "lfr/error.hpp"

namespace lfr::coalesce {

void WarpModel::validate() const {
  if (warp_size < 1 || transaction_bytes < 1 || element_bytes < 1) {
    throw Error(ErrorCode::kInvalidConfig, "warp model sizes must be positive");
  }
  if (transaction_bytes % element_bytes != 0) {
    throw Error(ErrorCode::kInvalidConfig, "transaction_bytes must be a multiple of element_bytes");
  }
}

const char* to_string(ThreadMapping mapping) {
  return mapping == ThreadMapping::kRaster ? "raster" : "remapped";
}

double CoalesceReport::reduction_ratio() const {
  if (remapped.transactions_total == 0) return 1.0;
  return static_cast<double>(raster.transactions_total) /
         static_cast<double>(remapped.transactions_total);
}

namespace {

struct WarpStats {
  std::uint64_t total = 0;
  std::uint64_t ideal = 0;
  int distinct = 0;
};

struct List {
  int cluster;
  std::uint32_t begin;
  std::uint32_t size;
};

WarpStats replay_warp(std::span<const std::uint32_t> ranks, int tile,
                      const raster::GaussianRangeTable& ranges,
                      const display::ViewpointMatrix& matrix,
                      const camera::Clustering& clustering, const WarpModel& model,
                      std::vector<List>& lists, std::vector<std::uint64_t>& segments) {
  // Threads reading the same list issue the same address at every step, so a
  // warp is fully described by its distinct lists.
  lists.clear();
  for (const std::uint32_t s : ranks) {
    const int k = clustering.cluster_of(matrix[s]);
    if (std::none_of(lists.begin(), lists.end(), [k](const List& l) { return l.cluster == k; })) {
      const auto r = ranges.range(tile, k);
      lists.push_back({k, r.begin, r.size()});
    }
  }
  WarpStats st;
  st.distinct = static_cast<int>(lists.size());
  std::uint32_t steps = 0;
  for (const auto& l : lists) steps = std::max(steps, l.size);
  st.ideal = steps;
  for (std::uint32_t step = 0; step < steps; ++step) {
    segments.clear();
    for (const auto& l : lists) {
      if (step >= l.size) continue;
      const std::uint64_t addr = (static_cast<std::uint64_t>(l.begin) + step) * model.element_bytes;
      segments.push_back(addr / model.transaction_bytes);
    }
    std::sort(segments.begin(), segments.end());
    st.total += static_cast<std::uint64_t>(
        std::unique(segments.begin(), segments.end()) - segments.begin());
  }
  return st;
}

}  // namespace

MappingReport simulate_with_order(const raster::GaussianRangeTable& ranges,
                                  const display::RemapTable& order,
                                  const display::ViewpointMatrix& matrix,
                                  const camera::Clustering& clustering, const WarpModel& model) {
  model.validate();
  const auto& cfg = matrix.config();
  if (!(order.config() == cfg) || order.size() != cfg.num_subpixels() ||
      ranges.num_tiles() != cfg.num_tiles() ||
      ranges.num_clusters() != clustering.num_clusters() ||
      clustering.num_views() != cfg.num_views) {
    throw Error(ErrorCode::kInconsistentInputs, "coalescing inputs come from different renders");
  }

  const int tiles = cfg.num_tiles();
  const int max_lists = std::min(model.warp_size, clustering.num_clusters());
  std::vector<WarpStats> per_tile(tiles);
  std::vector<std::vector<std::uint64_t>> histograms(tiles);
#pragma omp parallel
  {
    std::vector<List> lists;
    std::vector<std::uint64_t> segments;
#pragma omp for schedule(dynamic, 4)
    for (int t = 0; t < tiles; ++t) {
      const auto ranks = order.tile(t);
      auto& hist = histograms[t];
      hist.assign(max_lists + 1, 0);
      WarpStats& acc = per_tile[t];
      for (std::size_t w = 0; w < ranks.size(); w += model.warp_size) {
        const auto warp = ranks.subspan(w, std::min<std::size_t>(model.warp_size, ranks.size() - w));
        const WarpStats st = replay_warp(warp, t, ranges, matrix, clustering, model, lists, segments);
        acc.total += st.total;
        acc.ideal += st.ideal;
        acc.distinct += st.distinct;
        ++hist[st.distinct];
      }
    }
  }

  MappingReport report;
  report.distinct_lists_histogram.assign(max_lists + 1, 0);
  std::uint64_t distinct_sum = 0;
  for (int t = 0; t < tiles; ++t) {
    report.transactions_total += per_tile[t].total;
    report.transactions_ideal += per_tile[t].ideal;
    distinct_sum += static_cast<std::uint64_t>(per_tile[t].distinct);
    for (std::size_t n = 0; n < histograms[t].size(); ++n) {
      report.distinct_lists_histogram[n] += histograms[t][n];
      report.total_warps += histograms[t][n];
    }
  }
  if (report.total_warps > 0) {
    report.distinct_lists_mean =
        static_cast<double>(distinct_sum) / static_cast<double>(report.total_warps);
  }
  if (report.transactions_ideal > 0) {
    report.divergence_ratio = static_cast<double>(report.transactions_total) /
                              static_cast<double>(report.transactions_ideal);
  }
  return report;
}

MappingReport simulate_blend_access(const raster::GaussianRangeTable& ranges,
                                    const display::RemapTable& remap,
                                    const display::ViewpointMatrix& matrix,
                                    const camera::Clustering& clustering,
                                    const WarpModel& model, ThreadMapping mapping) {
  MappingReport report =
      mapping == ThreadMapping::kRemapped
          ? simulate_with_order(ranges, remap, matrix, clustering, model)
          : simulate_with_order(ranges, display::build_raster_table(matrix.config()), matrix,
                                clustering, model);
  report.mapping = mapping;
  return report;
}

CoalesceReport compare_mappings(const raster::GaussianRangeTable& ranges,
                                const display::RemapTable& remap,
                                const display::ViewpointMatrix& matrix,
                                const camera::Clustering& clustering, const WarpModel& model) {
  CoalesceReport report;
  report.model = model;
  report.raster =
      simulate_blend_access(ranges, remap, matrix, clustering, model, ThreadMapping::kRaster);
  report.remapped =
      simulate_blend_access(ranges, remap, matrix, clustering, model, ThreadMapping::kRemapped);
  return report;
}

namespace {

nlohmann::json mapping_json(const MappingReport& r) {
  return {{"mapping", to_string(r.mapping)},
          {"total_warps", r.total_warps},
          {"distinct_lists_per_warp",
           {{"mean", r.distinct_lists_mean}, {"histogram", r.distinct_lists_histogram}}},
          {"transactions_total", r.transactions_total},
          {"transactions_ideal", r.transactions_ideal},
          {"divergence_ratio", r.divergence_ratio}};
}

}  // namespace

nlohmann::json to_json(const CoalesceReport& report) {
  return {{"schema_version", 1},
          {"model",
           {{"warp_size", report.model.warp_size},
            {"transaction_bytes", report.model.transaction_bytes},
            {"element_bytes", report.model.element_bytes},
            {"definition",
             "per warp step, count distinct aligned segments of (S + step) * element_bytes over "
             "unfinished threads; early termination and caches ignored"}}},
          {"raster", mapping_json(report.raster)},
          {"remapped", mapping_json(report.remapped)},
          {"reduction_ratio", report.reduction_ratio()}};
}

std::string histogram_csv(const CoalesceReport& report) {
  std::ostringstream out;
  out << "distinct_lists,raster_warps,remapped_warps\n";
  const std::size_t n = std::max(report.raster.distinct_lists_histogram.size(),
                                 report.remapped.distinct_lists_histogram.size());
  auto at = [](const std::vector<std::uint64_t>& h, std::size_t i) {
    return i < h.size() ? h[i] : std::uint64_t{0};
  };
  for (std::size_t i = 0; i < n; ++i) {
    out << i << ',' << at(report.raster.distinct_lists_histogram, i) << ','
        << at(report.remapped.distinct_lists_histogram, i) << '\n';
  }
  return out.str();
}

}  // namespace lfr::coalesce
