// Copyright The lfraster Authors
// SPDX-License-Identifier: Apache-2.0

#include "lfr/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "lfr/coalesce.hpp"
#include "lfr/error.hpp"
#include "lfr/image_io.hpp"
#include "lfr/oracle.hpp"
#include "lfr/parallel.hpp"
#include "lfr/raster.hpp"

namespace lfr::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string exact(float v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  out << doc.dump(2) << "\n";
}

void emit_json(const std::string& path, const json& doc, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << doc.dump(2) << "\n";
  } else {
    write_json(path, doc);
  }
}

Rgb to_rgb(const std::vector<float>& v) { return {v.at(0), v.at(1), v.at(2)}; }

// --- Display flags -----------------------------------------------------------

struct DisplayFlags {
  std::string file;
  std::optional<int> width, height, views, tile;
  std::optional<double> tilt_deg, line_count, offset;

  void add(CLI::App* app) {
    app->add_option("--display", file, "Display config file (key=value)");
    app->add_option("--width", width, "Panel width in pixels");
    app->add_option("--height", height, "Panel height in pixels");
    app->add_option("--tilt-deg", tilt_deg, "Lens tilt in degrees");
    app->add_option("--line-count", line_count, "Lens pitch in subpixels");
    app->add_option("--offset", offset, "Lens offset in subpixels");
    app->add_option("--views", views, "Number of views");
    app->add_option("--tile", tile, "Tile size in pixels");
  }

  bool given() const {
    return !file.empty() || width || height || views || tile || tilt_deg || line_count || offset;
  }

  // Flags win over the file.
  display::DisplayConfig resolve() const {
    display::DisplayConfig c = file.empty() ? display::DisplayConfig{}
                                            : display::load_display_config(file);
    if (width) c.width = *width;
    if (height) c.height = *height;
    if (tilt_deg) c.tilt = display::tilt_from_degrees(*tilt_deg);
    if (line_count) c.line_count = *line_count;
    if (offset) c.lens_offset = *offset;
    if (views) c.num_views = *views;
    if (tile) c.tile_size = *tile;
    c.validate();
    return c;
  }
};

std::vector<std::string> display_args(const display::DisplayConfig& c) {
  return {"--width",      std::to_string(c.width),
          "--height",     std::to_string(c.height),
          "--tilt-deg",   exact(display::tilt_to_degrees(c.tilt)),
          "--line-count", exact(c.line_count),
          "--offset",     exact(c.lens_offset),
          "--views",      std::to_string(c.num_views),
          "--tile",       std::to_string(c.tile_size)};
}

json display_json(const display::DisplayConfig& c) {
  return {{"width", c.width},
          {"height", c.height},
          {"tilt_deg", display::tilt_to_degrees(c.tilt)},
          {"line_count", c.line_count},
          {"offset", c.lens_offset},
          {"views", c.num_views},
          {"tile", c.tile_size}};
}

// --- Render inputs -----------------------------------------------------------

struct RenderFlags {
  std::string scene, rig;
  DisplayFlags display;
  int cluster_size = 8;
  bool no_reuse = false;
  bool no_remap = false;
  std::vector<float> background{0.0f, 0.0f, 0.0f};
  float tile_margin = 0.0f;

  void add(CLI::App* app, bool pipeline_options) {
    app->add_option("--scene", scene, "Gaussian scene (PLY)")->required()->check(CLI::ExistingFile);
    app->add_option("--rig", rig, "Camera rig (JSON)")->required()->check(CLI::ExistingFile);
    display.add(app);
    app->add_option("--background", background, "Background r,g,b in [0,1]")
        ->delimiter(',')
        ->expected(3);
    if (pipeline_options) {
      app->add_option("--cluster-size", cluster_size, "Views per cluster")
          ->check(CLI::PositiveNumber);
      app->add_flag("--no-reuse", no_reuse, "Disable cross-view attribute reuse");
      app->add_flag("--no-remap", no_remap, "Raster-order thread mapping");
      app->add_option("--tile-margin", tile_margin, "Grow tiles by this many pixels when culling");
    }
  }

  raster::RenderOptions options() const {
    raster::RenderOptions o;
    o.cluster_size = cluster_size;
    o.disable_reuse = no_reuse;
    o.disable_remap = no_remap;
    o.background = to_rgb(background);
    o.keys.tile_margin_px = tile_margin;
    return o;
  }

  std::vector<std::string> args(const display::DisplayConfig& c, bool pipeline_options) const {
    std::vector<std::string> a{"--scene", scene, "--rig", rig};
    const auto d = display_args(c);
    a.insert(a.end(), d.begin(), d.end());
    a.insert(a.end(), {"--background", exact(background[0]) + "," + exact(background[1]) + "," +
                                           exact(background[2])});
    if (pipeline_options) {
      a.insert(a.end(), {"--cluster-size", std::to_string(cluster_size)});
      if (no_reuse) a.push_back("--no-reuse");
      if (no_remap) a.push_back("--no-remap");
      if (tile_margin != 0.0f) a.insert(a.end(), {"--tile-margin", exact(tile_margin)});
    }
    return a;
  }
};

struct Loaded {
  scene::GaussianScene scene;
  display::DisplayConfig display;
  camera::Rig rig;
};

Loaded load_inputs(const RenderFlags& f) {
  Loaded in{scene::load_ply_file(f.scene), f.display.resolve(), camera::load_rig(f.rig)};
  if (in.rig.cameras.size() != static_cast<std::size_t>(in.display.num_views)) {
    throw Error(ErrorCode::kInconsistentInputs,
                "rig has " + std::to_string(in.rig.cameras.size()) + " cameras, display has " +
                    std::to_string(in.display.num_views) + " views");
  }
  return in;
}

json timings_json(const raster::StageTimings& t) {
  return {{"schema_version", 1},
          {"projection_ms", t.projection_ms},
          {"key_gen_ms", t.key_gen_ms},
          {"sort_ms", t.sort_ms},
          {"blend_ms", t.blend_ms},
          {"total_ms", t.total_ms()},
          {"pair_count", t.pair_count},
          {"peak_buffer_bytes", t.peak_buffer_bytes},
          {"degenerate_count", t.degenerate_count},
          {"threads", num_threads()}};
}

struct ImageOutputs {
  std::string png, raw;

  void add(CLI::App* app) {
    app->add_option("-o,--png", png, "Output PNG (8-bit)");
    app->add_option("--raw", raw, "Output float32 raw dump");
  }
  void write(const Image& img) const {
    if (!png.empty()) write_png(png, img);
    if (!raw.empty()) write_raw(raw, img);
  }
  std::vector<std::string> args() const {
    std::vector<std::string> a;
    if (!png.empty()) a.insert(a.end(), {"--png", png});
    if (!raw.empty()) a.insert(a.end(), {"--raw", raw});
    return a;
  }
};

void write_manifest(const std::string& path, const std::string& command,
                    std::vector<std::string> args, const json& resolved, const json& outputs,
                    double wall_ms) {
  if (path.empty()) return;
  args.insert(args.begin(), command);
  write_json(path, {{"schema_version", 1},
                    {"tool", "lfraster"},
                    {"version", kToolVersion},
                    {"command", command},
                    {"argv", args},
                    {"resolved", resolved},
                    {"outputs", outputs},
                    {"wall_ms", wall_ms}});
}

double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

Image read_image(const std::string& path, int width, int height) {
  if (fs::path(path).extension() == ".raw") {
    if (width < 1 || height < 1) {
      throw Error(ErrorCode::kInvalidSize, "raw input needs the panel size (--width/--height)");
    }
    return read_raw(path, width, height);
  }
  return read_png(path);
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const std::string item = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(item, &used);
    } catch (const std::logic_error&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || v < 1) {
      throw CLI::ValidationError("--cluster-sizes", "expected positive integers, got '" + item + "'");
    }
    out.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

// --- Subcommands -------------------------------------------------------------

struct GenScene {
  scene::SyntheticSceneSpec spec;
  std::string layout = "uniform-box";
  std::string output;

  void add(CLI::App* app) {
    app->add_option("--count", spec.count, "Number of Gaussians")->check(CLI::PositiveNumber);
    app->add_option("--layout", layout, "grid | sphere-shell | uniform-box");
    app->add_option("--extent", spec.extent, "Scene extent");
    app->add_option("--scale-min", spec.scale_min);
    app->add_option("--scale-max", spec.scale_max);
    app->add_option("--opacity-min", spec.opacity_min);
    app->add_option("--opacity-max", spec.opacity_max);
    app->add_option("--sh-degree", spec.sh_degree)->check(CLI::Range(0, 3));
    app->add_option("--seed", spec.seed, "RNG seed");
    app->add_option("-o,--output", output, "Output PLY")->required();
  }
  int operator()(std::ostream&) {
    spec.layout = scene::parse_layout(layout);
    scene::save_ply_file(scene::generate_synthetic_scene(spec), output);
    return 0;
  }
};

struct GenRig {
  camera::RigSpec spec;
  DisplayFlags display;
  std::vector<double> look_at{0.0, 0.0, 0.0}, up{0.0, 1.0, 0.0};
  std::string output;

  void add(CLI::App* app) {
    display.add(app);
    app->add_option("--range-deg", spec.angular_range_deg, "Total angular range of the arc");
    app->add_option("--radius", spec.orbit_radius, "Orbit radius");
    app->add_option("--fov-y-deg", spec.fov_y_deg, "Vertical field of view");
    app->add_option("--look-at", look_at, "x,y,z")->delimiter(',')->expected(3);
    app->add_option("--up", up, "x,y,z")->delimiter(',')->expected(3);
    app->add_option("-o,--output", output, "Output rig JSON")->required();
  }
  int operator()(std::ostream&) {
    // Views and resolution come from the display flags.
    const auto c = display.resolve();
    spec.num_views = c.num_views;
    spec.width = c.width;
    spec.height = c.height;
    spec.look_at = {look_at[0], look_at[1], look_at[2]};
    spec.up = {up[0], up[1], up[2]};
    camera::Rig rig{camera::generate_orbit_rig(spec), spec};
    camera::save_rig(rig, output);
    return 0;
  }
};

struct ViewMat {
  DisplayFlags display;
  std::string csv, png;

  void add(CLI::App* app) {
    display.add(app);
    app->add_option("--csv", csv, "Output CSV (stdout when neither --csv nor --png is given)");
    app->add_option("--png", png, "Output false-color PNG");
  }
  int operator()(std::ostream& out) {
    const auto c = display.resolve();
    const auto matrix = display::build_viewpoint_matrix(c);
    if (csv.empty() && png.empty()) {
      display::write_viewpoint_csv(matrix, out);
    } else if (!csv.empty()) {
      std::ofstream f(csv);
      if (!f) throw Error(ErrorCode::kIo, "cannot open " + csv);
      display::write_viewpoint_csv(matrix, f);
    }
    if (!png.empty()) {
      write_png_rgb8(png, 3 * c.width, c.height, display::viewpoint_false_color(matrix));
    }
    return 0;
  }
};

struct Render {
  RenderFlags flags;
  ImageOutputs images;
  std::string timings, manifest;

  void add(CLI::App* app) {
    flags.add(app, true);
    images.add(app);
    app->add_option("--timings", timings, "StageTimings JSON");
    app->add_option("--manifest", manifest, "Run manifest JSON");
  }
  int operator()(std::ostream&) {
    const auto start = std::chrono::steady_clock::now();
    const Loaded in = load_inputs(flags);
    const auto result = raster::render_lightfield(in.scene, in.display, in.rig.cameras,
                                                  flags.options());
    images.write(result.image.pixels);
    if (!timings.empty()) write_json(timings, timings_json(result.timings));

    auto args = flags.args(in.display, true);
    const auto outs = images.args();
    args.insert(args.end(), outs.begin(), outs.end());
    if (!timings.empty()) args.insert(args.end(), {"--timings", timings});
    if (!manifest.empty()) args.insert(args.end(), {"--manifest", manifest});
    write_manifest(manifest, "render", args,
                   {{"display", display_json(in.display)},
                    {"scene", flags.scene},
                    {"rig", flags.rig},
                    {"cluster_size", flags.no_reuse ? 1 : flags.cluster_size},
                    {"disable_reuse", flags.no_reuse},
                    {"disable_remap", flags.no_remap},
                    {"background", flags.background},
                    {"tile_margin", flags.tile_margin},
                    {"seed", 0}},
                   {{"png", images.png}, {"raw", images.raw}, {"timings", timings}},
                   ms_since(start));
    return 0;
  }
};

struct OracleRender {
  RenderFlags flags;
  ImageOutputs images;
  std::string views_out, manifest;

  void add(CLI::App* app) {
    flags.add(app, false);
    images.add(app);
    app->add_option("--views-out", views_out, "Directory for per-view PNGs");
    app->add_option("--manifest", manifest, "Run manifest JSON");
  }
  int operator()(std::ostream&) {
    const auto start = std::chrono::steady_clock::now();
    const Loaded in = load_inputs(flags);
    std::vector<Image> views;
    const auto image = oracle::render_lightfield_fullframe(in.scene, in.display, in.rig.cameras,
                                                           to_rgb(flags.background), &views);
    images.write(image.pixels);
    if (!views_out.empty()) {
      fs::create_directories(views_out);
      for (std::size_t j = 0; j < views.size(); ++j) {
        char name[32];
        std::snprintf(name, sizeof name, "view_%03zu.png", j);
        write_png(fs::path(views_out) / name, views[j]);
      }
    }
    auto args = flags.args(in.display, false);
    const auto outs = images.args();
    args.insert(args.end(), outs.begin(), outs.end());
    if (!views_out.empty()) args.insert(args.end(), {"--views-out", views_out});
    if (!manifest.empty()) args.insert(args.end(), {"--manifest", manifest});
    write_manifest(manifest, "oracle-render", args,
                   {{"display", display_json(in.display)},
                    {"scene", flags.scene},
                    {"rig", flags.rig},
                    {"background", flags.background}},
                   {{"png", images.png}, {"raw", images.raw}, {"views_out", views_out}},
                   ms_since(start));
    return 0;
  }
};

struct Deinterlace {
  DisplayFlags display;
  std::string input, png, mask_png, raw;
  int view = 0;

  void add(CLI::App* app) {
    app->add_option("input", input, "Interlaced image (.png or .raw)")
        ->required()
        ->check(CLI::ExistingFile);
    display.add(app);
    app->add_option("--view", view, "View index")->required();
    app->add_option("-o,--png", png, "Masked view PNG");
    app->add_option("--raw", raw, "Masked view float32 raw dump");
    app->add_option("--mask-png", mask_png, "Mask PNG (255 where selected)");
  }
  int operator()(std::ostream& out) {
    const auto c = display.resolve();
    const auto matrix = display::build_viewpoint_matrix(c);
    const display::InterlacedImage img{c, read_image(input, c.width, c.height)};
    const auto masked = display::deinterlace(img, matrix, view);
    if (!png.empty()) write_png(png, masked.image);
    if (!raw.empty()) write_raw(raw, masked.image);
    if (!mask_png.empty()) {
      std::vector<std::uint8_t> rgb(masked.mask.size());
      std::transform(masked.mask.begin(), masked.mask.end(), rgb.begin(),
                     [](std::uint8_t m) { return static_cast<std::uint8_t>(m ? 255 : 0); });
      write_png_rgb8(mask_png, c.width, c.height, rgb);
    }
    out << json{{"schema_version", 1}, {"view", view}, {"masked_count", masked.count}}.dump()
        << "\n";
    return 0;
  }
};

struct Metrics {
  std::string a, b, mask, output;
  DisplayFlags display;

  void add(CLI::App* app) {
    app->add_option("a", a, "First image (.png or .raw)")->required()->check(CLI::ExistingFile);
    app->add_option("b", b, "Second image (.png or .raw)")->required()->check(CLI::ExistingFile);
    app->add_option("--mask", mask, "Mask PNG; nonzero selects a subpixel")
        ->check(CLI::ExistingFile);
    display.add(app);
    app->add_option("-o,--output", output, "Metrics JSON (stdout when omitted)");
  }
  int operator()(std::ostream& out) {
    int w = 0, h = 0;
    std::optional<display::DisplayConfig> c;
    if (display.given()) {
      c = display.resolve();
      w = c->width;
      h = c->height;
    }
    const Image ia = read_image(a, w, h), ib = read_image(b, w, h);
    oracle::ImageMetricsReport report;
    if (!mask.empty()) {
      const Image m = read_png(mask);
      if (!m.same_shape(ia)) throw Error(ErrorCode::kSizeMismatch, "mask does not match images");
      std::vector<std::uint8_t> sel(m.size());
      std::transform(m.data.begin(), m.data.end(), sel.begin(),
                     [](float v) { return static_cast<std::uint8_t>(v > 0.5f); });
      report = oracle::image_metrics(ia, ib, sel);
    } else if (c) {
      const auto matrix = display::build_viewpoint_matrix(*c);
      report = oracle::lightfield_metrics({*c, ia}, {*c, ib}, matrix);
    } else {
      report = oracle::image_metrics(ia, ib);
    }
    emit_json(output, oracle::to_json(report), out);
    return 0;
  }
};

struct Bench {
  RenderFlags flags;
  std::string cluster_sizes = "1,2,4,8";
  int repeats = 3;
  bool ablations = false;
  std::string output;

  void add(CLI::App* app) {
    flags.add(app, true);
    app->add_option("--cluster-sizes", cluster_sizes, "Comma-separated cluster sizes");
    app->add_option("--repeats", repeats, "Renders per setting (median reported)")
        ->check(CLI::PositiveNumber);
    app->add_flag("--ablations", ablations,
                  "Also time --no-remap and --no-reuse --no-remap at the largest size");
    app->add_option("-o,--output", output, "Report JSON (stdout when omitted)");
  }
  int operator()(std::ostream& out) {
    const auto sizes = parse_int_list(cluster_sizes);
    const Loaded in = load_inputs(flags);
    const raster::LightFieldRenderer renderer(in.display);
    const Rgb bg = to_rgb(flags.background);

    const auto oracle_start = std::chrono::steady_clock::now();
    const auto reference =
        oracle::render_lightfield_fullframe(in.scene, in.display, in.rig.cameras, bg);
    const double oracle_ms = ms_since(oracle_start);

    struct Setting {
      int cluster_size;
      bool no_reuse, no_remap;
    };
    std::vector<Setting> settings;
    for (const int s : sizes) settings.push_back({s, flags.no_reuse, flags.no_remap});
    if (ablations) {
      const int s = *std::max_element(sizes.begin(), sizes.end());
      settings.push_back({s, false, true});
      settings.push_back({s, true, true});
    }

    json rows = json::array();
    for (const auto& st : settings) {
      raster::RenderOptions o = flags.options();
      o.cluster_size = st.cluster_size;
      o.disable_reuse = st.no_reuse;
      o.disable_remap = st.no_remap;
      std::vector<raster::RenderResult> runs;
      for (int r = 0; r < repeats; ++r) runs.push_back(renderer.render(in.scene, in.rig.cameras, o));
      std::sort(runs.begin(), runs.end(), [](const auto& x, const auto& y) {
        return x.timings.total_ms() < y.timings.total_ms();
      });
      const auto& median = runs[runs.size() / 2];
      const auto m = oracle::lightfield_metrics(median.image, reference, renderer.matrix());
      json t = timings_json(median.timings);
      t.erase("schema_version");
      rows.push_back({{"cluster_size", st.cluster_size},
                      {"disable_reuse", st.no_reuse},
                      {"disable_remap", st.no_remap},
                      {"timings", t},
                      {"psnr_db", oracle::to_json(m)["psnr_db"]},
                      {"ssim", m.ssim}});
    }
    emit_json(output,
              {{"schema_version", 1},
               {"display", display_json(in.display)},
               {"scene", flags.scene},
               {"gaussians", in.scene.size()},
               {"threads", num_threads()},
               {"repeats", repeats},
               {"oracle_ms", oracle_ms},
               {"rows", rows}},
              out);
    return 0;
  }
};

struct CoalesceSim {
  RenderFlags flags;
  coalesce::WarpModel model;
  std::string mapping = "both";
  std::string output, histogram;

  void add(CLI::App* app) {
    flags.add(app, true);
    app->add_option("--mapping", mapping, "raster | remapped | both")
        ->check(CLI::IsMember({"raster", "remapped", "both"}));
    app->add_option("--warp-size", model.warp_size)->check(CLI::PositiveNumber);
    app->add_option("--transaction-bytes", model.transaction_bytes)->check(CLI::PositiveNumber);
    app->add_option("--element-bytes", model.element_bytes)->check(CLI::PositiveNumber);
    app->add_option("-o,--output", output, "Report JSON (stdout when omitted)");
    app->add_option("--histogram-csv", histogram, "Distinct-lists-per-warp histogram CSV");
  }
  int operator()(std::ostream& out) {
    model.validate();
    const Loaded in = load_inputs(flags);
    const raster::LightFieldRenderer renderer(in.display);
    raster::RenderOptions o = flags.options();
    o.keep_artifacts = true;
    const auto result = renderer.render(in.scene, in.rig.cameras, o);
    const auto& art = *result.artifacts;
    const auto report = coalesce::compare_mappings(art.sorted.ranges, renderer.remap_table(),
                                                   renderer.matrix(), art.clustering, model);
    json doc = coalesce::to_json(report);
    doc["cluster_size"] = art.clustering.cluster_size();
    doc["pair_count"] = result.timings.pair_count;
    if (mapping != "both") {
      doc.erase(mapping == "raster" ? "remapped" : "raster");
      doc.erase("reduction_ratio");
    }
    emit_json(output, doc, out);
    if (!histogram.empty()) {
      std::ofstream f(histogram);
      if (!f) throw Error(ErrorCode::kIo, "cannot open " + histogram);
      f << coalesce::histogram_csv(report);
    }
    return 0;
  }
};

int default_threads() {
  if (const char* env = std::getenv("LFRASTER_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Light-field Gaussian splatting rasterizer", "lfraster"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kToolVersion);
  int threads = default_threads();
  app.add_option("--threads", threads, "Worker threads (0 = all cores; env LFRASTER_THREADS)")
      ->check(CLI::NonNegativeNumber);

  GenScene gen_scene;
  GenRig gen_rig;
  ViewMat viewmat;
  Render render;
  OracleRender oracle_render;
  Deinterlace deinterlace;
  Metrics metrics;
  Bench bench;
  CoalesceSim coalesce_sim;
  std::function<int(std::ostream&)> action;

  auto sub = [&](const char* name, const char* help, auto& cmd) {
    CLI::App* s = app.add_subcommand(name, help);
    cmd.add(s);
    s->callback([&action, &cmd] { action = [&cmd](std::ostream& o) { return cmd(o); }; });
  };
  sub("gen-scene", "Generate a synthetic Gaussian scene", gen_scene);
  sub("gen-rig", "Generate an orbit camera rig", gen_rig);
  sub("viewmat", "Export the viewpoint index matrix", viewmat);
  sub("render", "Render an interlaced light-field image", render);
  sub("oracle-render", "Full-frame render of every view, then interlace", oracle_render);
  sub("deinterlace", "Extract one view's subpixels", deinterlace);
  sub("metrics", "PSNR/SSIM between two images", metrics);
  sub("bench", "Sweep cluster sizes; timings and quality per setting", bench);
  sub("coalesce-sim", "Simulate warp memory coalescing of the blend stage", coalesce_sim);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "lfraster: " << e.what() << "\n";
    const auto* active = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << active->help();
    return 2;
  }

  set_num_threads(threads);
  try {
    return action(out);
  } catch (const CLI::ParseError& e) {
    err << "lfraster: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "lfraster: error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace lfr::cli
