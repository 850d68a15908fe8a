// Acceptance suite: one pass/fail line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "lanebev/gradient_check.hpp"
#include "lanebev/json_io.hpp"
#include "lanebev/openlane.hpp"
#include "lanebev/pipeline.hpp"
#include "lanebev/tensor_io.hpp"
#include "lanebev/view_transform.hpp"
#include "test_support.hpp"
#include "warp_consistency.hpp"

using namespace lanebev;
using lanebev::testing::Gen;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

Outcome homography_fidelity() {
  const auto start = Clock::now();
  Gen gen(1001);
  double worst_reproj = 0, worst_comp = 0;
  for (int pair = 0; pair < 100; ++pair) {
    const CameraRigd a = gen.rig(), b = gen.rig();
    const Homographyd h = compute_homography(a, b);
    for (int i = 0; i < 20; ++i) {
      const double x = gen.uniform(6, 80), y = gen.uniform(-10, 10);
      const Eigen::Vector2d pa = project_ground_point(a, x, y), pb = project_ground_point(b, x, y);
      worst_reproj = std::max(worst_reproj, (h.apply(pa) - pb).norm());
    }
    const Eigen::Matrix3d comp = h.inverse().matrix * h.matrix;
    worst_comp = std::max(worst_comp, (comp / comp(2, 2) - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff());
  }
  const double t = seconds_since(start);
  return {worst_reproj < 1e-6 && worst_comp < 1e-8 && t < 1.0,
          "max reprojection " + fmt(worst_reproj) + " px, composition " + fmt(worst_comp) + ", " + fmt(t) + " s"};
}

Outcome warp_two_path() {
  Gen gen(1002);
  double worst = 0, worst_time = 0;
  for (int pair = 0; pair < 10; ++pair) {
    const CameraRigd a = gen.rig(), b = gen.rig();
    const auto start = Clock::now();
    worst = std::max(worst, lanebev::testing::two_path_difference(a, b).mean_abs_diff);
    worst_time = std::max(worst_time, seconds_since(start));
  }
  return {worst < 2.0 && worst_time < 10.0, "10 rig pairs, max interior mean abs difference " + fmt(worst) + "/255, " +
                                                fmt(worst_time) + " s per 1024x576 pair"};
}

Outcome pipeline_oracle() {
  const auto start = Clock::now();
  double x_worst = 0, z_worst = 0, f_min = 1;
  int failures = 0;
  for (int s = 0; s < 50; ++s) {
    PipelineConfig cfg;
    cfg.scene.seed = static_cast<std::uint64_t>(s);
    cfg.scene.n_lanes = 1 + s % 6;
    cfg.scene.max_curvature = 3e-4;
    cfg.scene.hill_amplitude = 0.5 * (s % 5);
    const EvalResult r = run_pipeline(cfg).eval;
    const double x = std::max(r.x_err_near.value_or(1e9), r.x_err_far.value_or(1e9));
    const double z = std::max(r.z_err_near.value_or(1e9), r.z_err_far.value_or(1e9));
    if (r.f_score != 1.0 || x >= 0.01 || z >= 0.05) ++failures;
    f_min = std::min(f_min, r.f_score);
    x_worst = std::max(x_worst, x);
    z_worst = std::max(z_worst, z);
  }
  const double t = seconds_since(start);
  return {failures == 0 && t < 30.0, "50 scenes, min F " + fmt(f_min) + ", max x err " + fmt(x_worst) +
                                         " m, max z err " + fmt(z_worst) + " m, " + fmt(t) + " s"};
}

Outcome gradient_suite() {
  const auto start = Clock::now();
  bool ok = true;
  double worst = 0;
  std::string terms;
  for (const auto& r : run_gradient_suite(0)) {
    ok = ok && r.passed && r.batches == 20 && r.max_relative_error < 1e-5;
    worst = std::max(worst, r.max_relative_error);
    terms += (terms.empty() ? "" : ",") + r.term;
  }
  const double t = seconds_since(start);
  return {ok && t < 10.0, terms + ": max relative error " + fmt(worst) + ", " + fmt(t) + " s"};
}

FeatureTensor random_features(Gen& gen, FeatureShape shape, int channels) {
  FeatureTensor f(shape, channels, 32);
  for (Eigen::Index i = 0; i < f.data.size(); ++i) f.data.data()[i] = gen.normal();
  return f;
}

Outcome vrm_recovery() {
  const auto start = Clock::now();
  Gen gen(1005);
  const FeatureShape fv{18, 32}, bev{50, 10};
  const int channels = 4;
  // Twice as many sample columns as front-view pixels.
  const int train_pairs = 2 * static_cast<int>(fv.size()) / channels;

  const ViewRelationMap truth = build_ipm_sampling_map(canonical_rig(), fv, 32, GridSpec{}, bev);
  std::vector<VrmSample> train, test;
  for (int s = 0; s < train_pairs + 20; ++s) {
    const FeatureTensor x = random_features(gen, fv, channels);
    (s < train_pairs ? train : test).emplace_back(x, apply_vrm(truth, x));
  }
  const ViewRelationMap fit = fit_vrm_least_squares(train, 0.0);
  double num = 0, den = 0;
  for (const auto& [x, y] : test) {
    num += (apply_vrm(fit, x).data - y.data).squaredNorm();
    den += y.data.squaredNorm();
  }
  const double holdout = std::sqrt(num / den);

  const Eigen::MatrixXd m0 = Eigen::MatrixXd::Random(bev.size(), fv.size());
  std::vector<VrmSample> exact;
  for (const auto& [x, y] : train) {
    FeatureTensor target(bev, channels, 1);
    target.data = m0 * x.data;
    exact.emplace_back(x, target);
  }
  const double recovery = (fit_vrm_least_squares(exact, 0.0).matrix - m0).norm() / m0.norm();
  const double t = seconds_since(start);
  return {holdout < 1e-3 && recovery < 1e-8 && t < 60.0,
          "held-out relative error " + fmt(holdout) + ", M0 recovery " + fmt(recovery) + ", " + fmt(t) + " s"};
}

Outcome decode_speed() {
  SceneParams p;
  p.n_lanes = 6;
  p.max_curvature = 3e-4;
  p.hill_amplitude = 1.0;
  p.seed = 6;
  const GridSpec spec;
  const GridTensors gt = encode_lanes(generate_scene(p).lanes, spec);
  const GridTensors pred = ideal_prediction(gt, spec, 1.0, 5);

  std::vector<double> times;
  std::string reference;
  bool deterministic = true;
  std::size_t lanes = 0;
  for (int run = 0; run < 100; ++run) {
    const auto start = Clock::now();
    const auto instances = decode_grid(pred, spec, {});
    times.push_back(seconds_since(start) * 1e3);
    std::string bytes;
    for (const auto& inst : instances) {
      bytes.append(reinterpret_cast<const char*>(&inst.cluster_id), sizeof inst.cluster_id);
      for (const auto& pt : inst.points) bytes.append(reinterpret_cast<const char*>(pt.data()), 3 * sizeof(double));
      bytes.append(reinterpret_cast<const char*>(inst.center.data()), inst.center.size() * sizeof(double));
    }
    if (run == 0) {
      reference = bytes;
      lanes = instances.size();
    }
    deterministic = deterministic && bytes == reference;
  }
  std::nth_element(times.begin(), times.begin() + 50, times.end());
  const double median = times[50];
  return {median < 5.0 && deterministic && lanes == 6,
          std::to_string(lanes) + " lanes, median " + fmt(median) + " ms, " +
              (deterministic ? "byte-identical" : "NOT deterministic")};
}

Outcome metric_sanity() {
  const std::vector<Lane3D> gts = generate_scene(SceneParams{}).lanes;
  std::vector<Lane3D> shifted = gts;
  for (auto& lane : shifted)
    for (auto& pt : lane.points) pt.y() += 0.1;
  const EvalResult same = evaluate(gts, gts);
  const EvalResult shift = evaluate(shifted, gts);
  const EvalResult empty = evaluate({}, gts);
  const double dx = std::max(std::abs(*shift.x_err_near - 0.1), std::abs(*shift.x_err_far - 0.1));
  const bool ok = same.f_score == 1.0 && shift.f_score == 1.0 && dx <= 1e-9 && empty.recall == 0.0;
  return {ok, "F(A,A) " + fmt(same.f_score) + ", shifted F " + fmt(shift.f_score) + " with |x err - 0.1| " + fmt(dx) +
                  ", empty recall " + fmt(empty.recall)};
}

Outcome format_stability() {
  Gen gen(1008);
  const auto dir = std::filesystem::temp_directory_path() / "lanebev_acceptance";
  std::filesystem::create_directories(dir);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    Tensor t;
    const int ndim = gen.integer(1, 4);
    for (int i = 0; i < ndim; ++i) t.dims.push_back(static_cast<std::uint32_t>(gen.integer(1, 12)));
    t.values.resize(t.element_count());
    for (float& v : t.values) v = std::bit_cast<float>(static_cast<std::uint32_t>(gen.engine()()));
    write_tensor(t, dir / "t.bldt");
    const Tensor back = read_tensor(dir / "t.bldt");
    if (back.dims != t.dims || std::memcmp(back.values.data(), t.values.data(), 4 * t.values.size()) != 0) {
      ++mismatches;
    }
  }
  std::filesystem::remove_all(dir);

  double worst = 0;
  for (int s = 0; s < 50; ++s) {
    SceneParams p;
    p.seed = static_cast<std::uint64_t>(s);
    p.n_lanes = 1 + s % 6;
    p.max_curvature = 3e-4;
    p.hill_amplitude = 2.0;
    p.jitter_rotation_deg = 2.0;
    p.jitter_translation = 0.3;
    const SceneRecord scene = generate_scene(p);
    const SceneRecord back = parse_openlane_frame(dump_json(export_openlane_frame(scene))).scene;
    if (back.lanes.size() != scene.lanes.size()) worst = 1e9;
    for (std::size_t k = 0; k < std::min(back.lanes.size(), scene.lanes.size()); ++k) {
      if (back.lanes[k].points.size() != scene.lanes[k].points.size()) {
        worst = 1e9;
        continue;
      }
      for (std::size_t i = 0; i < scene.lanes[k].points.size(); ++i)
        worst = std::max(worst, (back.lanes[k].points[i] - scene.lanes[k].points[i]).norm());
    }
  }
  return {mismatches == 0 && worst < 1e-9,
          "1000 tensors, " + std::to_string(mismatches) + " mismatches; OpenLane max deviation " + fmt(worst) + " m"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"AC1 homography fidelity", homography_fidelity},
      {"AC2 warp two-path consistency", warp_two_path},
      {"AC3 full-pipeline oracle", pipeline_oracle},
      {"AC4 gradient suite", gradient_suite},
      {"AC5 view relation map recovery", vrm_recovery},
      {"AC6 decode determinism and speed", decode_speed},
      {"AC7 metric sanity", metric_sanity},
      {"AC8 format stability", format_stability},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    if (!outcome.passed) ++failed;
    std::cout << (outcome.passed ? "[PASS] " : "[FAIL] ") << name << ": " << outcome.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
