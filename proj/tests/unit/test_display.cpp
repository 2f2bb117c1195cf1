// Copyright The lfraster Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "desk.hpp"
#include "lfr/display.hpp"
#include "lfr/error.hpp"

namespace lfr::display {
namespace {

DisplayConfig make(int w, int h, double tilt_deg, double lx, double offset, int views,
                   int tile = 16) {
  DisplayConfig c;
  c.width = w;
  c.height = h;
  c.tilt = tilt_deg * std::numbers::pi / 180.0;
  c.line_count = lx;
  c.lens_offset = offset;
  c.num_views = views;
  c.tile_size = tile;
  return c;
}

// Straight evaluation of the lens equations in long double.
int view_oracle(const DisplayConfig& c, int x, int y, int u) {
  const long double lx = c.line_count;
  const long double d = 3.0L * x + u + 3.0L * y * std::tan(static_cast<long double>(c.tilt)) -
                        c.lens_offset;
  long double r = d - lx * std::floor(d / lx);
  if (r >= lx) r -= lx;
  if (r < 0) r = 0;
  return std::min(static_cast<int>(std::floor(c.num_views * r / lx)), c.num_views - 1);
}

DisplayConfig random_config(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> tilt(-15, 15), lx(2, 40), unit(0, 1);
  std::uniform_int_distribution<int> size(1, 90), views(1, 64), tile(1, 20);
  const double l = lx(rng);
  return make(size(rng), size(rng), tilt(rng), l, (2 * unit(rng) - 1) * l, views(rng), tile(rng));
}

TEST(Viewpoint, ThreeViewUnitPanel) {
  const auto m = build_viewpoint_matrix(make(1, 1, 0, 3, 0, 3));
  EXPECT_EQ(m.at(0, 0, 0), 0);
  EXPECT_EQ(m.at(0, 0, 1), 1);
  EXPECT_EQ(m.at(0, 0, 2), 2);
}

TEST(Viewpoint, ZeroOffsetOrigin) {
  for (double lx : {2.5, 7.3, 40.0}) {
    for (int n : {1, 5, 64}) EXPECT_EQ(viewpoint_index(make(4, 4, 0, lx, 0, n), 0, 0, 0), 0);
  }
}

TEST(Viewpoint, RowPeriodTwoPixels) {
  const auto c = make(40, 3, 0, 6, 0, 3);
  const auto m = build_viewpoint_matrix(c);
  for (int y = 0; y < c.height; ++y) {
    for (int x = 0; x + 2 < c.width; ++x) {
      for (int u = 0; u < 3; ++u) EXPECT_EQ(m.at(x, y, u), m.at(x + 2, y, u));
    }
  }
}

TEST(Viewpoint, PeriodicInSubpixelLinearization) {
  const auto c = make(50, 2, 0, 7, 1.25, 9);
  const auto m = build_viewpoint_matrix(c);
  for (int s = 0; s + 7 < 3 * c.width; ++s) {
    EXPECT_EQ(m.at(s / 3, 1, s % 3), m.at((s + 7) / 3, 1, (s + 7) % 3));
  }
}

TEST(Viewpoint, MatchesOracleAndRange) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 40; ++trial) {
    const auto c = random_config(rng);
    const auto m = build_viewpoint_matrix(c);
    for (int y = 0; y < c.height; ++y) {
      for (int x = 0; x < c.width; ++x) {
        for (int u = 0; u < 3; ++u) {
          ASSERT_LT(m.at(x, y, u), c.num_views);
          ASSERT_EQ(m.at(x, y, u), view_oracle(c, x, y, u)) << x << "," << y << "," << u;
        }
      }
    }
    EXPECT_EQ(m, build_viewpoint_matrix(c));
  }
}

TEST(Viewpoint, NegativeOffsetsFloorMod) {
  // Koffset larger than 3x + u puts d_offset below zero.
  const auto c = make(2, 1, 0, 4, 3.5, 4);
  EXPECT_EQ(viewpoint_index(c, 0, 0, 0), 0);  // -3.5 mod 4 = 0.5
  EXPECT_EQ(viewpoint_index(c, 0, 0, 1), 1);  // -2.5 mod 4 = 1.5
  EXPECT_EQ(viewpoint_index(c, 0, 0, 2), 2);  // -1.5 mod 4 = 2.5
}

TEST(Viewpoint, RowShiftIsThreeTanAlpha) {
  const auto c = make(30, 30, 11, 9.7, 0.3, 12);
  const double shift = 3.0 * std::tan(c.tilt);
  for (int y = 0; y + 1 < c.height; ++y) {
    for (int x = 0; x < c.width; ++x) {
      auto shifted = c;
      shifted.lens_offset = c.lens_offset - shift;
      EXPECT_EQ(viewpoint_index(c, x, y + 1, 1), viewpoint_index(shifted, x, y, 1));
    }
  }
}

TEST(Config, InvalidConfigs) {
  auto expect_invalid = [](DisplayConfig c) {
    try {
      build_viewpoint_matrix(c);
      ADD_FAILURE() << "accepted an invalid config";
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidConfig);
    }
  };
  expect_invalid(make(0, 4, 0, 3, 0, 3));
  expect_invalid(make(4, 4, 0, 0, 0, 3));
  expect_invalid(make(4, 4, 0, 3, 0, 0));
  expect_invalid(make(4, 4, 0, 3, 0, 3, 0));
  expect_invalid(make(4, 4, 90, 3, 0, 3));
}

TEST(Config, ParseAndFormatRoundTrip) {
  const auto c = parse_display_config(
      "# panel\nwidth=3840\nheight = 2160\ntilt_deg=-12.5\nline_count=35.7\noffset=-3\n"
      "views=71\ntile=16\n");
  EXPECT_EQ(c.width, 3840);
  EXPECT_EQ(c.height, 2160);
  EXPECT_DOUBLE_EQ(c.tilt, -12.5 * std::numbers::pi / 180.0);
  EXPECT_EQ(c.num_views, 71);
  EXPECT_EQ(parse_display_config(format_display_config(c)), c);
  std::mt19937_64 rng(2);
  for (int i = 0; i < 200; ++i) {
    const auto r = random_config(rng);
    EXPECT_EQ(parse_display_config(format_display_config(r)), r);
  }
}

TEST(Config, ParseErrors) {
  for (const char* text : {"width=10\nheight=10\ncolour=3\n", "width=ten\nheight=1\n",
                           "width=10 height=10\n", "width=10\nheight=10\nviews=0\n"}) {
    try {
      parse_display_config(text);
      ADD_FAILURE() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kInvalidConfig);
    }
  }
}

TEST(Remap, SingleViewIsIdentity) {
  const auto c = make(37, 21, 5, 6.3, 0.2, 1, 8);
  const auto remap = build_remap_table(build_viewpoint_matrix(c), c);
  EXPECT_EQ(remap, build_raster_table(c));
}

TEST(Remap, RasterTableIsRowMajorPerTile) {
  const auto c = make(37, 21, 0, 3, 0, 3, 8);
  const auto raster = build_raster_table(c);
  ASSERT_EQ(raster.num_tiles(), 5 * 3);
  for (int t = 0; t < raster.num_tiles(); ++t) {
    const int x0 = (t % 5) * 8, y0 = (t / 5) * 8;
    const int w = std::min(8, c.width - x0), h = std::min(8, c.height - y0);
    ASSERT_EQ(raster.tile_end(t) - raster.tile_begin(t), static_cast<std::uint32_t>(w * h * 3));
    std::uint32_t r = raster.tile_begin(t);
    for (int y = y0; y < y0 + h; ++y) {
      for (int x = x0; x < x0 + w; ++x) {
        for (int u = 0; u < 3; ++u) {
          EXPECT_EQ(raster[r], subpixel_index(c, x, y, u));
          EXPECT_EQ(raster.local_index(t, raster[r]), r - raster.tile_begin(t));
          ++r;
        }
      }
    }
  }
}

TEST(Remap, GroupsPixelsPerViewWhenPitchIsOneTile) {
  // Lx = 3 * tile, N = tile: each view covers exactly one pixel's three
  // subpixels, so sorting lays pixels out by view, u in order.
  const int ts = 16;
  const auto c = make(ts, 4, 0, 3.0 * ts, 0, ts, ts);
  const auto m = build_viewpoint_matrix(c);
  const auto remap = build_remap_table(m, c);
  for (std::uint32_t r = 0; r < remap.size(); r += 3) {
    const auto a = remap.coord(r);
    EXPECT_EQ(m.at(a.x, a.y, 0), a.x);
    for (int u = 0; u < 3; ++u) {
      const auto p = remap.coord(r + u);
      EXPECT_EQ(p.x, a.x);
      EXPECT_EQ(p.y, a.y);
      EXPECT_EQ(p.u, u);
    }
  }
  // Ranks 3*(4v)..: view v across the four rows, rows in order.
  EXPECT_EQ(remap.coord(0).y, 0);
  EXPECT_EQ(remap.coord(3).y, 1);
  EXPECT_EQ(remap.coord(12).x, 1);
}

TEST(Remap, BijectiveMonotoneAndStable) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const auto c = random_config(rng);
    const auto m = build_viewpoint_matrix(c);
    const auto remap = build_remap_table(m, c);
    const auto raster = build_raster_table(c);
    ASSERT_EQ(remap.size(), c.num_subpixels());
    for (int t = 0; t < c.num_tiles(); ++t) {
      const auto ranks = remap.tile(t);
      std::vector<std::uint32_t> local;
      for (std::size_t r = 0; r < ranks.size(); ++r) {
        local.push_back(remap.local_index(t, ranks[r]));
        if (r + 1 < ranks.size()) {
          ASSERT_LE(m[ranks[r]], m[ranks[r + 1]]);
          if (m[ranks[r]] == m[ranks[r + 1]]) {
            ASSERT_LT(ranks[r], ranks[r + 1]);
          }
        }
      }
      std::sort(local.begin(), local.end());
      for (std::size_t r = 0; r < local.size(); ++r) ASSERT_EQ(local[r], r);
      EXPECT_EQ(ranks.size(), raster.tile(t).size());
    }
  }
}

TEST(Remap, ConfigMismatch) {
  const auto c = make(20, 20, 0, 3, 0, 3);
  auto other = c;
  other.num_views = 4;
  try {
    build_remap_table(build_viewpoint_matrix(c), other);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfigMismatch);
  }
}

TEST(Interlace, SingleViewPassThrough) {
  const auto c = make(9, 7, 3, 5, 0, 1);
  Image img(9, 7);
  std::iota(img.data.begin(), img.data.end(), 0.0f);
  const auto out = interlace(std::vector<Image>{img}, build_viewpoint_matrix(c));
  EXPECT_EQ(out.pixels.data, img.data);
}

TEST(Interlace, ConstantViewsEncodeIndex) {
  const auto c = test::desk_display(40, 30, 6);
  const auto m = build_viewpoint_matrix(c);
  std::vector<Image> views;
  for (int j = 0; j < 6; ++j) views.emplace_back(40, 30, j / 5.0f);
  const auto out = interlace(views, m);
  std::vector<int> covered(c.num_subpixels(), 0);
  for (std::size_t s = 0; s < c.num_subpixels(); ++s) {
    EXPECT_FLOAT_EQ(out.pixels.data[s], m[s] / 5.0f);
  }
  for (int j = 0; j < 6; ++j) {
    const auto d = deinterlace(out, m, j);
    for (std::size_t s = 0; s < c.num_subpixels(); ++s) {
      covered[s] += d.mask[s];
      if (d.mask[s]) {
        EXPECT_EQ(m[s], j);
        EXPECT_EQ(d.image.data[s], views[j].data[s]);
      } else {
        EXPECT_EQ(d.image.data[s], 0.0f);
      }
    }
  }
  for (int v : covered) EXPECT_EQ(v, 1);
}

TEST(Interlace, PureFunction) {
  const auto c = test::desk_display(24, 16, 3);
  const auto m = build_viewpoint_matrix(c);
  std::vector<Image> views;
  for (int j = 0; j < 3; ++j) views.emplace_back(24, 16, 0.1f * (j + 1));
  const auto a = interlace(views, m);
  std::swap(views[0], views[2]);
  std::swap(views[0], views[2]);
  EXPECT_EQ(interlace(views, m).pixels.data, a.pixels.data);
}

TEST(Interlace, Errors) {
  const auto c = make(8, 8, 0, 3, 0, 3);
  const auto m = build_viewpoint_matrix(c);
  auto code = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::kIo;
  };
  EXPECT_EQ(code([&] { interlace(std::vector<Image>(2, Image(8, 8)), m); }), ErrorCode::kCountMismatch);
  EXPECT_EQ(code([&] { interlace(std::vector<Image>(3, Image(8, 9)), m); }), ErrorCode::kSizeMismatch);
  const InterlacedImage img{c, Image(8, 8)};
  EXPECT_EQ(code([&] { deinterlace(img, m, 3); }), ErrorCode::kViewOutOfRange);
  EXPECT_EQ(code([&] { deinterlace(img, m, -1); }), ErrorCode::kViewOutOfRange);
}

TEST(Deinterlace, ChannelZeroForThreeViewPitch) {
  const auto c = make(12, 5, 0, 3, 0, 3);
  const auto m = build_viewpoint_matrix(c);
  const auto d = deinterlace(InterlacedImage{c, Image(12, 5, 1.0f)}, m, 0);
  EXPECT_EQ(d.count, 12u * 5u);
  for (std::size_t s = 0; s < c.num_subpixels(); ++s) EXPECT_EQ(d.mask[s], s % 3 == 0);
}

TEST(Export, CsvAndFalseColor) {
  const auto c = make(4, 2, 0, 3, 0, 3);
  const auto m = build_viewpoint_matrix(c);
  std::ostringstream csv;
  write_viewpoint_csv(m, csv);
  EXPECT_EQ(csv.str(), "0,1,2,0,1,2,0,1,2,0,1,2\n0,1,2,0,1,2,0,1,2,0,1,2\n");
  const auto rgb = viewpoint_false_color(m);
  ASSERT_EQ(rgb.size(), c.num_subpixels() * 3);
  EXPECT_EQ(rgb[0], 255);  // view 0 is red
  EXPECT_EQ(rgb[1], 0);
}

}  // namespace
}  // namespace lfr::display
