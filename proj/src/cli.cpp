#include "lanebev/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lanebev/errors.hpp"
#include "lanebev/gradient_check.hpp"
#include "lanebev/image.hpp"
#include "lanebev/json_io.hpp"
#include "lanebev/openlane.hpp"
#include "lanebev/pipeline.hpp"
#include "lanebev/plot.hpp"
#include "lanebev/tensor_io.hpp"
#include "lanebev/view_transform.hpp"

namespace lanebev {

namespace fs = std::filesystem;

namespace {

struct UsageError {
  std::string message;
};

struct CheckFailed {
  std::string message;
};

/// Inputs that do not exist as given are looked up under LANEBEV_DATA_DIR.
fs::path resolve_input(const std::string& given) {
  fs::path p(given);
  if (fs::exists(p) || p.is_absolute()) return p;
  if (const char* root = std::getenv("LANEBEV_DATA_DIR"); root && *root) {
    fs::path candidate = fs::path(root) / p;
    if (fs::exists(candidate)) return candidate;
  }
  return p;
}

void require_flag(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError{std::string("missing required flag ") + flag};
}

/// Applies "a.b=value" overrides to a config object. Values are parsed as JSON
/// when possible and kept as strings otherwise.
void apply_overrides(Json& config, const std::vector<std::string>& overrides) {
  if (config.is_null()) config = Json::object();
  for (const std::string& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError{"--set expects key=value, got '" + item + "'"};
    const std::string key = item.substr(0, eq);
    const std::string text = item.substr(eq + 1);
    Json value = Json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;

    Json* node = &config;
    std::size_t start = 0;
    for (std::size_t dot = key.find('.'); dot != std::string::npos; dot = key.find('.', start)) {
      node = &(*node)[key.substr(start, dot - start)];
      if (!node->is_object()) *node = Json::object();
      start = dot + 1;
    }
    (*node)[key.substr(start)] = value;
  }
}

Json load_config(const std::string& path, const std::vector<std::string>& overrides) {
  Json config = path.empty() ? Json::object() : load_json(resolve_input(path));
  apply_overrides(config, overrides);
  return config;
}

Json load_optional(const std::string& path) { return path.empty() ? Json::object() : load_json(resolve_input(path)); }

void emit(const Json& j, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << dump_json(j);
  } else {
    save_json(j, out_path);
  }
}

/// Ground-truth frames are scene records, bare lane lists or OpenLane frames.
SceneRecord load_scene_like(const Json& j) {
  if (j.is_object() && j.contains("lane_lines")) return parse_openlane_frame(j).scene;
  if (j.is_object() && j.contains("rig")) return scene_from_json(j);
  SceneRecord scene;
  scene.lanes = lanes_from_json(j);
  scene.scene_tag = j.is_object() ? j.value("scene_tag", std::string()) : std::string();
  return scene;
}

Json gradient_report_json(const std::vector<GradientCheckReport>& reports, std::uint64_t seed) {
  Json terms = Json::array();
  bool all = true;
  for (const auto& r : reports) {
    terms.push_back({{"term", r.term},
                     {"batches", r.batches},
                     {"resampled", r.resampled},
                     {"max_relative_error", r.max_relative_error},
                     {"passed", r.passed}});
    all = all && r.passed;
  }
  return {{"seed", seed}, {"passed", all}, {"terms", terms}};
}

struct Command {
  CLI::App* app = nullptr;
  bool schema = false;
  std::vector<std::string> overrides;
  Json schema_doc;
  std::function<void()> action;
};

Command& add_command(std::map<std::string, Command>& commands, CLI::App& root, const std::string& name,
                     const std::string& description, Json schema_doc) {
  Command& cmd = commands[name];
  cmd.app = root.add_subcommand(name, description);
  cmd.app->add_flag("--schema", cmd.schema, "Print the JSON schema of this subcommand's inputs and outputs");
  cmd.app->add_option("--set", cmd.overrides, "Override a config field, key=value (repeatable)");
  cmd.schema_doc = std::move(schema_doc);
  return cmd;
}

const Json kCameraSchema = {
    {"intrinsics", {{"fx", "number"}, {"fy", "number"}, {"cx", "number"}, {"cy", "number"}, {"skew", "number"}}},
    {"extrinsics", {{"rotation", "3x3 road-to-camera rotation"}, {"translation", "[3] metres"}}},
    {"image_size", "[width, height]"}};
const Json kLanesSchema = {
    {"lanes",
     "[{id: int, points: [[x,y,z],...], fit?: {y_coeffs, z_coeffs, x_range: [a,b], x_center, x_scale}}]"}};
const Json kGridSchema = {{"x_min", 3.0}, {"x_max", 103.0}, {"y_min", -10.0}, {"y_max", 10.0}, {"cell", 0.5}};
const Json kDecodeSchema = {{"s_threshold", 0.5}, {"d_gap", 1.5}, {"min_points", 4}, {"fit_degree", 3}};
const Json kEvalResultSchema = {{"f_score", "number"},       {"precision", "number"}, {"recall", "number"},
                                {"x_err_near", "number?"},    {"x_err_far", "number?"}, {"z_err_near", "number?"},
                                {"z_err_far", "number?"},     {"true_positives", "int"}, {"num_pred", "int"},
                                {"num_gt", "int"}};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App root("Monocular 3D lane geometry, BEV encoding and evaluation tools", "lanebev");
  root.require_subcommand(1);
  std::map<std::string, Command> commands;

  // homography
  std::string src_cam, dst_cam, points = "default", h_out;
  {
    Command& c = add_command(commands, root, "homography", "Ground-plane homography between two cameras",
                             {{"inputs", {{"--src", kCameraSchema}, {"--dst", kCameraSchema},
                                          {"--points", "default | {\"points\": [[x, y], ...]} road-plane points"}}},
                              {"output", {{"matrix", "3x3, H(2,2) = 1, maps src pixels to dst pixels"}}}});
    c.app->add_option("--src", src_cam, "Source camera JSON");
    c.app->add_option("--dst", dst_cam, "Destination camera JSON");
    c.app->add_option("--points", points, "'default' or a JSON file of road-plane points");
    c.app->add_option("--out", h_out, "Output file (stdout when omitted)");
    c.action = [&] {
      require_flag(src_cam, "--src");
      require_flag(dst_cam, "--dst");
      const CameraRigd a = camera_from_json(load_json(resolve_input(src_cam)));
      const CameraRigd b = camera_from_json(load_json(resolve_input(dst_cam)));
      Homographyd h;
      if (points == "default") {
        h = compute_homography(a, b);
      } else {
        const Json pj = load_json(resolve_input(points));
        std::vector<Eigen::Vector2d> road;
        try {
          for (const Json& p : pj.at("points")) road.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
        } catch (const Json::exception& e) {
          fail(ErrorCode::InvalidField, std::string("bad points file: ") + e.what());
        }
        h = compute_homography(a, b, road);
      }
      emit(homography_to_json(h), h_out, out);
    };
  }

  // warp
  std::string warp_image_path, warp_h, warp_out;
  int warp_width = 0, warp_height = 0;
  {
    Command& c = add_command(commands, root, "warp", "Warp a PGM/PPM image by a homography",
                             {{"inputs", {{"--image", "binary PGM (P5) or PPM (P6), 8-bit"},
                                          {"--h", {{"matrix", "3x3 source-to-destination homography"}}}}},
                              {"output", "image of the same format, size --width x --height (default: input size)"}});
    c.app->set_help_flag("--help", "Print this help message and exit");  // -h would clash with --h
    c.app->add_option("--image", warp_image_path, "Input image");
    c.app->add_option("--h", warp_h, "Homography JSON");
    c.app->add_option("--out", warp_out, "Output image");
    c.app->add_option("--width", warp_width, "Output width");
    c.app->add_option("--height", warp_height, "Output height");
    c.action = [&] {
      require_flag(warp_image_path, "--image");
      require_flag(warp_h, "--h");
      require_flag(warp_out, "--out");
      const Image in = read_pnm(resolve_input(warp_image_path));
      const Homographyd h = homography_from_json(load_json(resolve_input(warp_h)));
      const ImageSize size{warp_width > 0 ? warp_width : in.width(), warp_height > 0 ? warp_height : in.height()};
      write_pnm(warp_image(in, h, size), warp_out);
    };
  }

  // encode
  std::string enc_scene, enc_spec, enc_out, enc_ideal;
  double enc_margin = 1.0;
  {
    Command& c = add_command(
        commands, root, "encode", "Encode scene lanes onto the BEV grid",
        {{"inputs", {{"--scene", "scene record, lanes JSON or OpenLane frame"}, {"--spec", kGridSchema}}},
         {"output", "BLDT tensor (4, rows, cols): confidence, offset, height, instance"},
         {"ideal", "optional BLDT tensor (3 + D, rows, cols): confidence, offset, height, embedding"},
         {"overrides", "--set applies to the grid spec"}});
    c.app->add_option("--scene", enc_scene, "Scene JSON");
    c.app->add_option("--spec", enc_spec, "Grid spec JSON");
    c.app->add_option("--out", enc_out, "Ground-truth tensor output");
    c.app->add_option("--ideal", enc_ideal, "Also write the oracle prediction tensor here");
    c.app->add_option("--margin-scale", enc_margin, "Simplex edge in units of 2 delta_d for the oracle prediction");
    c.action = [&, &c] {
      require_flag(enc_scene, "--scene");
      require_flag(enc_out, "--out");
      const GridSpec spec = grid_spec_from_json(load_config(enc_spec, c.overrides));
      const SceneRecord scene = load_scene_like(load_json(resolve_input(enc_scene)));
      const GridTensors gt = encode_lanes(scene.lanes, spec);
      write_tensor(ground_truth_to_tensor(gt), enc_out);
      if (!enc_ideal.empty()) {
        const int count = static_cast<int>(instance_ids(gt.instance).size());
        const GridTensors pred = ideal_prediction(gt, spec, enc_margin, std::max(4, count - 1));
        write_tensor(prediction_to_tensor(pred), enc_ideal);
      }
    };
  }

  // decode
  std::string dec_pred, dec_spec, dec_params, dec_out;
  {
    Command& c = add_command(commands, root, "decode", "Cluster a prediction tensor into 3D lanes",
                             {{"inputs", {{"--pred", "BLDT tensor (3 + D, rows, cols)"},
                                          {"--spec", kGridSchema},
                                          {"--params", kDecodeSchema}}},
                              {"output", kLanesSchema},
                              {"overrides", "--set applies to the decode params"}});
    c.app->add_option("--pred", dec_pred, "Prediction tensor");
    c.app->add_option("--spec", dec_spec, "Grid spec JSON");
    c.app->add_option("--params", dec_params, "Decode params JSON");
    c.app->add_option("--out", dec_out, "Lanes JSON output (stdout when omitted)");
    c.action = [&, &c] {
      require_flag(dec_pred, "--pred");
      const GridSpec spec = grid_spec_from_json(load_optional(dec_spec));
      const DecodeParams params = decode_params_from_json(load_config(dec_params, c.overrides));
      const GridTensors pred = prediction_from_tensor(read_tensor(resolve_input(dec_pred)));
      if (pred.rows() != spec.rows() || pred.cols() != spec.cols()) {
        fail(ErrorCode::ShapeMismatch, "prediction grid does not match the grid spec");
      }
      const auto instances = decode_grid(pred, spec, params);
      std::vector<Lane3D> lanes;
      for (const auto& inst : instances) lanes.push_back(to_lane(inst));
      emit(lanes_to_json(lanes, fit_lanes(instances, params)), dec_out, out);
    };
  }

  // eval
  std::string ev_pred, ev_gt, ev_config, ev_report;
  {
    Command& c = add_command(
        commands, root, "eval", "Score predicted lanes against ground truth",
        {{"inputs", {{"--pred", "lanes JSON, or a directory of them"},
                     {"--gt", "lanes JSON / scene record / OpenLane frame, or a directory matched by file name"},
                     {"--config", {{"sample_xs", "[x...]"}, {"match_threshold", 1.5}, {"match_ratio", 0.75},
                                   {"near_limit", 40.0}, {"x_min", 3.0}, {"x_max", 103.0}, {"y_min", -10.0},
                                   {"y_max", 10.0}}}}},
         {"output", kEvalResultSchema},
         {"directory_output", "EvalResult fields pooled over frames plus frames: int and "
                              "scenes: {scene_tag: EvalResult}"},
         {"overrides", "--set applies to the eval config"}});
    c.app->add_option("--pred", ev_pred, "Predicted lanes");
    c.app->add_option("--gt", ev_gt, "Ground-truth lanes");
    c.app->add_option("--config", ev_config, "Eval config JSON");
    c.app->add_option("--report", ev_report, "Report output (stdout when omitted)");
    c.action = [&, &c] {
      require_flag(ev_pred, "--pred");
      require_flag(ev_gt, "--gt");
      const EvalConfig cfg = eval_config_from_json(load_config(ev_config, c.overrides));
      const fs::path pred_path = resolve_input(ev_pred);
      const fs::path gt_path = resolve_input(ev_gt);
      if (!fs::is_directory(gt_path)) {
        const auto preds = lanes_from_json(load_json(pred_path));
        const SceneRecord gt = load_scene_like(load_json(gt_path));
        emit(eval_result_to_json(evaluate(preds, gt.lanes, cfg)), ev_report, out);
        return;
      }
      if (!fs::is_directory(pred_path)) fail(ErrorCode::InvalidArgument, "--gt is a directory but --pred is not");
      std::vector<fs::path> frames;
      for (const auto& entry : fs::directory_iterator(gt_path))
        if (entry.is_regular_file() && entry.path().extension() == ".json") frames.push_back(entry.path());
      std::sort(frames.begin(), frames.end());

      EvalAccumulator total(cfg);
      std::map<std::string, EvalAccumulator> by_scene;
      for (const fs::path& frame : frames) {
        const SceneRecord gt = load_scene_like(load_json(frame));
        const fs::path pred_file = pred_path / frame.filename();
        // A frame without a prediction file counts as an empty prediction.
        const std::vector<Lane3D> preds =
            fs::exists(pred_file) ? lanes_from_json(load_json(pred_file)) : std::vector<Lane3D>{};
        total.add_frame(preds, gt.lanes);
        by_scene.try_emplace(gt.scene_tag, cfg).first->second.add_frame(preds, gt.lanes);
      }
      Json report = eval_result_to_json(total.result());
      report["frames"] = frames.size();
      report["scenes"] = Json::object();
      for (const auto& [tag, acc] : by_scene) report["scenes"][tag] = eval_result_to_json(acc.result());
      emit(report, ev_report, out);
    };
  }

  // synth
  std::string syn_params, syn_out, syn_format = "record";
  std::optional<std::uint64_t> syn_seed;
  std::optional<int> syn_lanes;
  {
    Command& c = add_command(
        commands, root, "synth", "Generate a seeded synthetic road scene",
        {{"inputs", {{"--params", {{"n_lanes", 4}, {"lane_spacing", 3.5}, {"max_curvature", 0.0},
                                   {"hill_amplitude", 0.0}, {"hill_wavelength", 80.0}, {"jitter_rotation_deg", 0.0},
                                   {"jitter_translation", 0.0}, {"seed", 0}, {"scene_tag", "synthetic"}}}}},
         {"output", {{"rig", kCameraSchema}, {"lanes", kLanesSchema["lanes"]}, {"scene_tag", "string"}}},
         {"openlane_output", "with --format openlane: OpenLane-layout frame"},
         {"overrides", "--set applies to the scene params"}});
    c.app->add_option("--params", syn_params, "Scene params JSON");
    c.app->add_option("--seed", syn_seed, "Seed (overrides params)");
    c.app->add_option("--n-lanes", syn_lanes, "Lane count (overrides params)");
    c.app->add_option("--format", syn_format, "record or openlane")->check(CLI::IsMember({"record", "openlane"}));
    c.app->add_option("--out", syn_out, "Output file (stdout when omitted)");
    c.action = [&, &c] {
      Json cfg = load_config(syn_params, c.overrides);
      if (syn_seed) cfg["seed"] = *syn_seed;
      if (syn_lanes) cfg["n_lanes"] = *syn_lanes;
      const SceneParams params = scene_params_from_json(cfg);
      if (!params.lanes_separated()) {
        err << "warning: lane_spacing does not exceed 2 * max_curvature * 103^2; lanes may cross\n";
      }
      const SceneRecord scene = generate_scene(params);
      emit(syn_format == "openlane" ? export_openlane_frame(scene) : scene_to_json(scene), syn_out, out);
    };
  }

  // fit-vrm
  std::string vrm_samples, vrm_out;
  std::optional<double> vrm_ridge;
  int vrm_scale = 32;
  {
    Command& c = add_command(
        commands, root, "fit-vrm", "Fit a view relation map by least squares",
        {{"inputs", {{"--samples", "directory of <name>.fv.bldt / <name>.bev.bldt pairs, (H, W, C) feature tensors"},
                     {"--ridge", "absolute Tikhonov weight; default 1e-6 * ||X||_F^2 / front-view pixels"}}},
         {"output", "BLDT 2-D tensor (bev pixels, front-view pixels) plus <out>.json sidecar "
                    "{fv_shape, bev_shape, scale, layout}"}});
    c.app->add_option("--samples", vrm_samples, "Sample directory");
    c.app->add_option("--ridge", vrm_ridge, "Ridge weight");
    c.app->add_option("--scale", vrm_scale, "Front-view feature stride");
    c.app->add_option("--out", vrm_out, "Map output");
    c.action = [&] {
      require_flag(vrm_samples, "--samples");
      require_flag(vrm_out, "--out");
      const fs::path dir = resolve_input(vrm_samples);
      if (!fs::is_directory(dir)) fail(ErrorCode::IoError, dir.string() + " is not a directory");
      std::vector<fs::path> fronts;
      for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.size() > 8 && name.ends_with(".fv.bldt")) fronts.push_back(entry.path());
      }
      std::sort(fronts.begin(), fronts.end());
      std::vector<VrmSample> samples;
      for (const fs::path& fv : fronts) {
        const std::string stem = fv.filename().string();
        const fs::path bev = dir / (stem.substr(0, stem.size() - 8) + ".bev.bldt");
        if (!fs::exists(bev)) fail(ErrorCode::IoError, "missing " + bev.string());
        samples.emplace_back(feature_from_tensor(read_tensor(fv), vrm_scale), feature_from_tensor(read_tensor(bev), 1));
      }
      if (samples.empty()) fail(ErrorCode::EmptyInput, "no *.fv.bldt samples in " + dir.string());
      const double ridge = vrm_ridge ? *vrm_ridge : default_ridge(samples);
      write_view_relation_map(fit_vrm_least_squares(samples, ridge), vrm_out);
    };
  }

  // losscheck
  std::uint64_t lc_seed = 0;
  {
    Command& c = add_command(commands, root, "losscheck", "Check analytic loss gradients by finite differences",
                             {{"inputs", {{"--seed", "int"}}},
                              {"output", {{"seed", "int"}, {"passed", "bool"},
                                          {"terms", "[{term, batches, resampled, max_relative_error, passed}]"}}}});
    c.app->add_option("--seed", lc_seed, "Seed");
    c.action = [&] {
      const Json report = gradient_report_json(run_gradient_suite(lc_seed), lc_seed);
      out << dump_json(report);
      if (!report["passed"].get<bool>()) throw CheckFailed{"analytic gradient disagrees with finite differences"};
    };
  }

  // plot
  std::string plot_lanes, plot_out, plot_spec;
  double plot_ppm = 8.0;
  {
    Command& c = add_command(commands, root, "plot", "Render lanes as a top-down SVG",
                             {{"inputs", {{"--lanes", "lanes JSON, scene record or OpenLane frame"},
                                          {"--spec", kGridSchema}}},
                              {"output", "SVG with one <polyline data-lane-id> per lane"}});
    c.app->add_option("--lanes", plot_lanes, "Lanes JSON");
    c.app->add_option("--out", plot_out, "SVG output");
    c.app->add_option("--spec", plot_spec, "Grid spec JSON for the plot extent");
    c.app->add_option("--pixels-per-meter", plot_ppm, "Scale");
    c.action = [&] {
      require_flag(plot_lanes, "--lanes");
      require_flag(plot_out, "--out");
      const GridSpec spec = grid_spec_from_json(load_optional(plot_spec));
      const SceneRecord scene = load_scene_like(load_json(resolve_input(plot_lanes)));
      std::ofstream file(plot_out, std::ios::trunc);
      if (!file) fail(ErrorCode::IoError, "cannot write " + plot_out);
      file << render_bev_svg(scene.lanes, spec, plot_ppm);
    };
  }

  // pipeline
  std::string pipe_params, pipe_spec, pipe_decode, pipe_eval, pipe_dir;
  std::optional<std::uint64_t> pipe_seed;
  std::optional<int> pipe_lanes;
  {
    Command& c = add_command(commands, root, "pipeline", "synth -> encode -> ideal prediction -> decode -> eval",
                             {{"inputs", {{"--params", "scene params (see synth)"},
                                          {"--spec", kGridSchema},
                                          {"--decode-params", kDecodeSchema},
                                          {"--config", "eval config (see eval)"}}},
                              {"output", kEvalResultSchema},
                              {"out_dir", "scene.json, gt.bldt, pred.bldt, lanes.json, report.json"},
                              {"overrides", "--set applies to the scene params"}});
    c.app->add_option("--seed", pipe_seed, "Scene seed");
    c.app->add_option("--n-lanes", pipe_lanes, "Lane count");
    c.app->add_option("--params", pipe_params, "Scene params JSON");
    c.app->add_option("--spec", pipe_spec, "Grid spec JSON");
    c.app->add_option("--decode-params", pipe_decode, "Decode params JSON");
    c.app->add_option("--config", pipe_eval, "Eval config JSON");
    c.app->add_option("--out-dir", pipe_dir, "Also write every intermediate artifact here");
    c.action = [&, &c] {
      Json scene_cfg = load_config(pipe_params, c.overrides);
      if (pipe_seed) scene_cfg["seed"] = *pipe_seed;
      if (pipe_lanes) scene_cfg["n_lanes"] = *pipe_lanes;
      PipelineConfig cfg;
      cfg.scene = scene_params_from_json(scene_cfg);
      cfg.spec = grid_spec_from_json(load_optional(pipe_spec));
      cfg.decode = decode_params_from_json(load_optional(pipe_decode));
      cfg.eval = eval_config_from_json(load_optional(pipe_eval));
      const PipelineResult result = run_pipeline(cfg);
      const Json report = eval_result_to_json(result.eval);
      if (!pipe_dir.empty()) {
        fs::create_directories(pipe_dir);
        const fs::path dir(pipe_dir);
        save_json(scene_to_json(result.scene), dir / "scene.json");
        write_tensor(ground_truth_to_tensor(result.ground_truth), dir / "gt.bldt");
        write_tensor(prediction_to_tensor(result.prediction), dir / "pred.bldt");
        save_json(lanes_to_json(result.lanes, fit_lanes(result.instances, cfg.decode)), dir / "lanes.json");
        save_json(report, dir / "report.json");
      }
      out << dump_json(report);
    };
  }

  const auto error_line = [&](const std::string& code, const std::string& message) {
    err << Json{{"error", code}, {"message", message}}.dump() << '\n';
  };

  try {
    try {
      root.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      return root.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
      return root.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
      root.exit(e, out, err);
      return 2;
    }
    for (auto& [name, cmd] : commands) {
      if (!cmd.app->parsed()) continue;
      if (cmd.schema) {
        out << dump_json(Json{{"subcommand", name}, {"schema", cmd.schema_doc}});
        return 0;
      }
      cmd.action();
      return 0;
    }
    return 2;
  } catch (const UsageError& e) {
    err << "usage error: " << e.message << "\nRun with --help for more information.\n";
    return 2;
  } catch (const CheckFailed& e) {
    error_line("GradientCheckFailed", e.message);
    return 1;
  } catch (const Error& e) {
    const std::string code(to_string(e.code()));
    std::string message = e.what();
    if (message.starts_with(code + ": ")) message.erase(0, code.size() + 2);
    error_line(code, message);
    return 1;
  } catch (const fs::filesystem_error& e) {
    error_line(std::string(to_string(ErrorCode::IoError)), e.what());
    return 1;
  } catch (const Json::exception& e) {
    error_line(std::string(to_string(ErrorCode::InvalidField)), e.what());
    return 1;
  }
}

}  // namespace lanebev
