// Copyright The lfraster Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <array>
#include <bit>
#include <limits>

#include <omp.h>

#include "lfr/error.hpp"
#include "lfr/raster.hpp"

namespace lfr::raster {

namespace {

constexpr int kRadixBits = 8;
constexpr int kBuckets = 1 << kRadixBits;

using Histogram = std::array<std::size_t, kBuckets>;

// Slot t * K + k of every key, scanned into [S, E) offsets.
GaussianRangeTable build_ranges(const std::vector<std::uint64_t>& keys, int num_tiles,
                                int num_clusters, int bits_k) {
  const std::size_t slots = static_cast<std::size_t>(num_tiles) * num_clusters;
  std::vector<std::uint32_t> offsets(slots + 1, 0);
  for (const std::uint64_t key : keys) {
    const std::size_t slot =
        static_cast<std::size_t>(key_tile(key, bits_k)) * num_clusters + key_cluster(key, bits_k);
    if (slot >= slots) {
      throw Error(ErrorCode::kInconsistentInputs, "sort key addresses a tile outside the panel");
    }
    ++offsets[slot + 1];
  }
  for (std::size_t s = 0; s < slots; ++s) offsets[s + 1] += offsets[s];
  return GaussianRangeTable(num_tiles, num_clusters, std::move(offsets));
}

SortedSplats split(const std::vector<KeyedSplat>& sorted, int num_tiles, int num_clusters) {
  SortedSplats out;
  out.bits_k = cluster_bits(num_clusters);
  out.keys.resize(sorted.size());
  out.gaussians.resize(sorted.size());
  const auto n = static_cast<std::ptrdiff_t>(sorted.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t e = 0; e < n; ++e) {
    out.keys[e] = sorted[e].key;
    out.gaussians[e] = sorted[e].gaussian;
  }
  out.ranges = build_ranges(out.keys, num_tiles, num_clusters, out.bits_k);
  return out;
}

void check_size(std::size_t n) {
  if (n > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::kInconsistentInputs, "too many Gaussian-tile pairs for 32-bit offsets");
  }
}

}  // namespace

SortedSplats sort_splats(std::vector<KeyedSplat> keys, int num_tiles, int num_clusters) {
  check_size(keys.size());
  const int bits_k = cluster_bits(num_clusters);
  const int tile_bits = std::bit_width(static_cast<std::uint32_t>(std::max(num_tiles - 1, 0)));
  const int key_bits = 32 + bits_k + tile_bits;
  const std::size_t n = keys.size();
  std::vector<KeyedSplat> scratch(n);

  const int threads = std::max(1, std::min<int>(omp_get_max_threads(),
                                                static_cast<int>(n / 4096) + 1));
  std::vector<Histogram> hist(threads);
  KeyedSplat* src = keys.data();
  KeyedSplat* dst = scratch.data();

  for (int shift = 0; shift < key_bits; shift += kRadixBits) {
#pragma omp parallel num_threads(threads)
    {
      const int t = omp_get_thread_num();
      const std::size_t lo = n * t / threads, hi = n * (t + 1) / threads;
      Histogram& h = hist[t];
      h.fill(0);
      for (std::size_t e = lo; e < hi; ++e) ++h[(src[e].key >> shift) & (kBuckets - 1)];
#pragma omp barrier
#pragma omp single
      {
        // Bucket-major, thread-minor offsets keep the pass stable.
        std::size_t running = 0;
        for (int d = 0; d < kBuckets; ++d) {
          for (int u = 0; u < threads; ++u) {
            const std::size_t count = hist[u][d];
            hist[u][d] = running;
            running += count;
          }
        }
      }
      for (std::size_t e = lo; e < hi; ++e) dst[h[(src[e].key >> shift) & (kBuckets - 1)]++] = src[e];
    }
    std::swap(src, dst);
  }
  if (src != keys.data()) keys.swap(scratch);
  return split(keys, num_tiles, num_clusters);
}

SortedSplats sort_splats_reference(std::vector<KeyedSplat> keys, int num_tiles,
                                   int num_clusters) {
  check_size(keys.size());
  std::stable_sort(keys.begin(), keys.end(),
                   [](const KeyedSplat& a, const KeyedSplat& b) { return a.key < b.key; });
  return split(keys, num_tiles, num_clusters);
}

}  // namespace lfr::raster
