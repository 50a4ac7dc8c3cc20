// Copyright 2026 The mret Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <filesystem>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "json_config.hpp"
#include "mret/beamsim.hpp"
#include "mret/ecdf.hpp"
#include "mret/errors.hpp"
#include "mret/frames.hpp"
#include "mret/io.hpp"
#include "mret/mixture.hpp"
#include "mret/mocomp.hpp"
#include "mret/monitor.hpp"
#include "mret/regimpact.hpp"

namespace mret::cli {

namespace fs = std::filesystem;

namespace {

/// Bad invocation detected after CLI11 parsing; maps to kExitUsage.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Routes named outputs either into --out or onto the console streams.
class Sink {
 public:
  Sink(const std::string& dir, std::ostream& out, std::ostream& err)
      : out_(out), err_(err) {
    if (!dir.empty()) dir_ = fs::path(dir);
  }

  bool to_directory() const { return dir_.has_value(); }

  /// Primary outputs land on stdout without --out.
  void primary(const std::string& name, const std::string& content) {
    if (dir_) write(name, content);
    else out_ << content;
  }

  /// Secondary outputs land on stderr without --out.
  void secondary(const std::string& name, const std::string& content) {
    if (dir_) write(name, content);
    else err_ << content;
  }

  /// Files that only make sense on disk; skipped without --out.
  void file(const std::string& name, const std::string& content) {
    if (dir_) write(name, content);
  }

 private:
  void write(const std::string& name, const std::string& content) {
    fs::create_directories(*dir_);
    io::write_file_atomic(*dir_ / name, content);
  }

  std::optional<fs::path> dir_;
  std::ostream& out_;
  std::ostream& err_;
};

RaypathId parse_ray(const std::string& text, std::size_t rows, std::size_t cols) {
  const auto parts = io::split(text, ',');
  double i = 0.0, j = 0.0;
  if (parts.size() != 2 || !io::parse_double(io::trim(parts[0]), i) ||
      !io::parse_double(io::trim(parts[1]), j) || i < 0.0 || j < 0.0 ||
      i != static_cast<double>(static_cast<std::size_t>(i)) ||
      j != static_cast<double>(static_cast<std::size_t>(j)))
    throw std::invalid_argument("--ray expects two nonnegative integers 'i,j', got '" + text + "'");
  const RaypathId id{static_cast<std::size_t>(i), static_cast<std::size_t>(j)};
  if (id.row >= rows || id.col >= cols)
    throw std::out_of_range("--ray " + text + " lies outside the " + std::to_string(rows) + "x" +
                            std::to_string(cols) + " image");
  return id;
}

FrameSequence load(const std::string& input, const std::string& reflectance) {
  return read_frames_file(input, reflectance.empty() ? std::nullopt
                                                     : std::optional<fs::path>(reflectance));
}

std::string stats_record(const EmpiricalCdf& cdf, const std::optional<ReflectanceStats>& refl) {
  if (cdf.sample_count() > 0) return stats_to_json(cdf_stats(cdf), refl);
  nlohmann::ordered_json j;
  j["count"] = 0;
  j["total"] = cdf.total_count();
  j["return_fraction"] = 0.0;
  return j.dump(2) + "\n";
}

// ---- tcdf -----------------------------------------------------------------------

struct TcdfArgs {
  std::string input, reflectance, ray, patch = "5x5", out;
  bool compensate = false, svg = false;
  std::size_t radius = 2, min_pairs = 6;
};

void run_tcdf(const TcdfArgs& a, Sink& sink) {
  const auto seq = load(a.input, a.reflectance);
  const auto ray = parse_ray(a.ray, seq.rows(), seq.cols());
  std::optional<EmpiricalCdf> cdf;
  if (a.compensate) {
    const MatchOptions opts{a.radius, NeighborhoodSpec::parse(a.patch), a.min_pairs};
    auto comp = compensate(seq, ray, opts);
    sink.file("match_trace.csv", match_trace_csv(comp.trace));
    cdf = std::move(comp.cdf);
  } else {
    cdf = temporal_cdf(seq, ray);
  }
  const auto curve = cdf->curve();
  sink.primary("tcdf.csv", cdf_to_csv(curve));
  sink.secondary("stats.json", stats_record(*cdf, reflectance_stats(seq, ray)));
  if (a.svg) {
    const std::vector<StepCurve> curves{curve};
    sink.file("tcdf.svg", cdf_to_svg(curves, "temporal CDF " + a.ray));
  }
}

// ---- mocomp ---------------------------------------------------------------------

struct MocompArgs {
  std::string input, ray, patch = "5x5", out;
  std::size_t radius = 2, min_pairs = 6;
};

void run_mocomp(const MocompArgs& a, Sink& sink) {
  const auto seq = load(a.input, "");
  const auto ray = parse_ray(a.ray, seq.rows(), seq.cols());
  const MatchOptions opts{a.radius, NeighborhoodSpec::parse(a.patch), a.min_pairs};
  const auto comp = compensate(seq, ray, opts);
  const auto plain = temporal_cdf(seq, ray);
  const auto ks = ks_compare(plain.curve(), comp.cdf.curve());
  std::size_t matched = 0;
  for (const auto& m : comp.trace) matched += m.has_value() ? 1 : 0;
  nlohmann::ordered_json j;
  j["frames"] = seq.size();
  j["matched_frames"] = matched;
  j["ks_distance"] = ks.distance;
  j["ks_location"] = ks.location;
  j["temporal"] = nlohmann::ordered_json::parse(stats_record(plain, std::nullopt));
  j["compensated"] = nlohmann::ordered_json::parse(stats_record(comp.cdf, std::nullopt));
  sink.primary("match_trace.csv", match_trace_csv(comp.trace));
  sink.secondary("mocomp.json", j.dump(2) + "\n");
  sink.file("tcdf.csv", cdf_to_csv(plain.curve()));
  sink.file("tcdf_compensated.csv", cdf_to_csv(comp.cdf.curve()));
}

// ---- scdf -----------------------------------------------------------------------

struct ScdfArgs {
  std::string input, ray, patch = "3x3", out;
  std::size_t frame = 0;
  bool all_frames = false, svg = false;
};

void run_scdf(const ScdfArgs& a, Sink& sink) {
  const auto seq = load(a.input, "");
  const auto ray = parse_ray(a.ray, seq.rows(), seq.cols());
  const auto spec = NeighborhoodSpec::parse(a.patch);
  if (!a.all_frames && a.frame >= seq.size())
    throw std::out_of_range("--frame " + std::to_string(a.frame) + " but the input has " +
                            std::to_string(seq.size()) + " frames");
  std::vector<StepCurve> curves;
  std::string csv;
  if (a.all_frames) {
    csv = "frame,x,F\n";
    for (std::size_t k = 0; k < seq.size(); ++k) {
      curves.push_back(spatial_cdf(seq.frame(k), ray, spec).curve());
      for (const auto& j : curves.back().jumps()) {
        const auto prefix = std::to_string(k) + ',' + io::format_double(j.x) + ',';
        csv += prefix + io::format_double(j.before) + '\n';
        csv += prefix + io::format_double(j.after) + '\n';
      }
    }
  } else {
    curves.push_back(spatial_cdf(seq.frame(a.frame), ray, spec).curve());
    csv = cdf_to_csv(curves.back());
  }
  sink.primary("scdf.csv", csv);
  if (a.svg) sink.file("scdf.svg", cdf_to_svg(curves, "spatial CDF " + a.ray));
}

// ---- compare --------------------------------------------------------------------

struct CompareArgs {
  std::string a, b, out;
};

StepCurve read_curve(const std::string& path) {
  try {
    return parse_cdf_csv(io::read_file(path));
  } catch (const ParseError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

void run_compare(const CompareArgs& a, Sink& sink) {
  const auto ks = ks_compare(read_curve(a.a), read_curve(a.b));
  nlohmann::ordered_json j;
  j["distance"] = ks.distance;
  j["location"] = ks.location;
  sink.primary("compare.json", j.dump(2) + "\n");
}

// ---- fit-gmm --------------------------------------------------------------------

struct FitArgs {
  std::string input, samples, ray, out;
  std::vector<double> thresholds;
  double min_gap = kDefaultMinGap;
  double sigma_floor = kDefaultSigmaFloor;
};

EmpiricalCdf read_samples(const std::string& path) {
  const auto text = io::read_file(path);
  std::vector<double> finite;
  std::size_t total = 0;
  std::size_t line_no = 0;
  for (auto line : io::lines(text)) {
    ++line_no;
    for (auto token : io::split(line, ',')) {
      token = io::trim(token);
      if (token.empty()) continue;
      double v = 0.0;
      if (!io::parse_double(token, v) || !(v >= 0.0 || v == kNoReturn))
        throw ParseError(line_no, "bad sample '" + std::string(token) + "'");
      ++total;
      if (v >= 0.0) finite.push_back(v);
    }
  }
  if (total == 0) throw DataError(DataErrorKind::no_data, path + " holds no samples");
  return EmpiricalCdf(std::move(finite), total);
}

void run_fit(const FitArgs& a, Sink& sink) {
  std::optional<EmpiricalCdf> cdf;
  if (!a.samples.empty()) {
    cdf = read_samples(a.samples);
  } else {
    if (a.ray.empty()) throw UsageError("--ray is required with --input");
    const auto seq = load(a.input, "");
    cdf = temporal_cdf(seq, parse_ray(a.ray, seq.rows(), seq.cols()));
  }
  const auto thresholds = a.thresholds.empty() ? auto_segment(*cdf, a.min_gap) : a.thresholds;
  const auto clusters = segment_by_thresholds(*cdf, thresholds);
  const auto gmm = fit_gmm(clusters, a.sigma_floor);
  sink.primary("gmm.json", gmm_to_json(gmm));
  sink.file("fit_report.csv", fit_report_csv(gmm, clusters));
  nlohmann::ordered_json fit;
  fit["clusters"] = gmm.size();
  fit["thresholds"] = thresholds;
  fit["model_fit_error"] = model_fit_error(gmm, *cdf);
  sink.secondary("fit.json", fit.dump(2) + "\n");
}

// ---- monitor --------------------------------------------------------------------

struct MonitorArgs {
  std::string input, labels, out, patch = "3x3";
  std::size_t frame = 0;
  MonitorConfig cfg;
};

void run_monitor(MonitorArgs a, Sink& sink) {
  a.cfg.patch = NeighborhoodSpec::parse(a.patch);
  a.cfg.validate();
  const auto seq = load(a.input, "");
  if (a.frame >= seq.size())
    throw std::out_of_range("--frame " + std::to_string(a.frame) + " but the input has " +
                            std::to_string(seq.size()) + " frames");
  const auto& img = seq.frame(a.frame);
  const auto verdicts = scan_frame(img, a.cfg);
  sink.primary("verdicts.csv", verdicts_csv(verdicts));
  sink.file("mask.pgm", mask_to_pgm(to_mask(img.rows(), img.cols(), verdicts)));
  if (!a.labels.empty()) {
    const auto labels = parse_mask_pgm(io::read_file(a.labels));
    if (labels.rows != img.rows() || labels.cols != img.cols())
      throw DataError(DataErrorKind::alignment, "label mask shape differs from the frame");
    const auto s = evaluate_monitor(verdicts, labels.cells);
    nlohmann::ordered_json j;
    j["true_positive"] = s.true_positive;
    j["false_positive"] = s.false_positive;
    j["false_negative"] = s.false_negative;
    j["true_negative"] = s.true_negative;
    j["precision"] = s.precision;
    j["recall"] = s.recall;
    sink.secondary("score.json", j.dump(2) + "\n");
  }
}

// ---- simulate -------------------------------------------------------------------

struct SimulateArgs {
  std::string scene, preset, out, policy;
  std::uint64_t seed = 0;
  std::size_t frames = 50;
  std::optional<std::size_t> subrays;
  std::optional<double> range_sigma, half_angle;
};

void run_simulate(const SimulateArgs& a, Sink& sink) {
  SceneFile file = a.preset.empty() ? parse_scene_json(io::read_file(a.scene))
                                    : preset_scene(a.preset, a.seed);
  file.scene.seed = a.seed;
  if (!file.beam) throw DataError(DataErrorKind::no_data, "scene file has no \"beam\" section");
  auto& beam = *file.beam;
  if (!a.policy.empty())
    beam.policy = a.policy == "last" ? DetectorPolicy::last : DetectorPolicy::strongest;
  if (a.subrays) beam.subrays = *a.subrays;
  if (a.range_sigma) beam.range_sigma = *a.range_sigma;
  if (a.half_angle) beam.half_angle = *a.half_angle;
  const auto sim = simulate_sequence(file.scene, beam, a.frames);
  sink.primary("frames.rif", write_frames(sim.frames));
  if (auto refl = write_reflectance(sim.frames)) sink.file("reflectance.rif", *refl);
  sink.file("labels.pgm", mask_to_pgm(sim.labels));
  sink.file("scene.json", scene_to_json(file.scene, file.beam));
}

// ---- reg-experiment -------------------------------------------------------------

struct RegArgs {
  std::string sweep, out;
  std::uint64_t seed = 0;
  std::vector<double> gaps;
  std::vector<std::string> algorithms, references;
  std::optional<double> fraction, r_max, voxel, noise;
  std::optional<std::size_t> trials, rays;
};

void run_reg(const RegArgs& a, Sink& sink) {
  SweepConfig s = a.sweep.empty() ? SweepConfig{} : parse_sweep_json(io::read_file(a.sweep));
  s.base.seed = a.seed;
  if (!a.gaps.empty()) s.gaps = a.gaps;
  if (!a.algorithms.empty()) {
    s.algorithms.clear();
    for (const auto& n : a.algorithms) s.algorithms.push_back(n == "icp" ? Algorithm::icp : Algorithm::ndt);
  }
  if (!a.references.empty()) {
    s.references.clear();
    for (const auto& n : a.references)
      s.references.push_back(n == "map" ? ReferenceKind::map : ReferenceKind::scan);
  }
  if (a.fraction) s.base.fraction = *a.fraction;
  if (a.r_max) s.base.icp.max_radius = *a.r_max;
  if (a.voxel) s.base.ndt.voxel_size = *a.voxel;
  if (a.noise) s.base.noise_sigma = *a.noise;
  if (a.trials) s.trials = *a.trials;
  if (a.rays) s.base.room.rays = *a.rays;
  s.base.validate();
  sink.primary("bias.csv", bias_report_csv(bias_report(s)));
  sink.file("sweep.json", sweep_to_json(s));
}

// ---- convert --------------------------------------------------------------------

struct ConvertArgs {
  std::string input, reflectance, to = "rif", out;
  std::optional<std::size_t> frame;
};

void run_convert(const ConvertArgs& a, Sink& sink) {
  const auto seq = load(a.input, a.reflectance);
  if (a.to == "rif") {
    sink.primary("frames.rif", write_frames(seq));
    if (auto refl = write_reflectance(seq)) sink.file("reflectance.rif", *refl);
    return;
  }
  if (a.frame && *a.frame >= seq.size())
    throw std::out_of_range("--frame " + std::to_string(*a.frame) + " but the input has " +
                            std::to_string(seq.size()) + " frames");
  std::string csv = "frame,x,y,z,reflectance\n";
  const std::size_t first = a.frame.value_or(0);
  const std::size_t last = a.frame ? *a.frame + 1 : seq.size();
  for (std::size_t k = first; k < last; ++k)
    for (const auto& p : to_point_cloud(seq.frame(k))) {
      csv += std::to_string(k) + ',' + io::format_double(p.x) + ',' + io::format_double(p.y) +
             ',' + io::format_double(p.z) + ',' +
             (p.reflectance ? io::format_double(*p.reflectance) : std::string()) + '\n';
    }
  sink.primary("points.csv", csv);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multiple-return lidar range statistics toolkit", "mret"};
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON file mirroring the command-line flags");
  app.set_version_flag("--version", "mret 1.0.0");
  app.require_subcommand(1, 1);

  TcdfArgs tcdf;
  auto* t = app.add_subcommand("tcdf", "Temporal CDF of one raypath across frames");
  t->add_option("--input", tcdf.input, "RIF range document")->required()->check(CLI::ExistingFile);
  t->add_option("--reflectance", tcdf.reflectance, "RIF reflectance sidecar")
      ->check(CLI::ExistingFile);
  t->add_option("--ray", tcdf.ray, "Raypath as row,col")->required();
  t->add_flag("--compensate", tcdf.compensate, "Follow the raypath with patch matching");
  t->add_option("--radius", tcdf.radius, "Search radius in pixels")->capture_default_str();
  t->add_option("--patch", tcdf.patch, "Matching patch, rows x cols")->capture_default_str();
  t->add_option("--min-pairs", tcdf.min_pairs, "Minimum comparable pairs per candidate")
      ->capture_default_str();
  t->add_option("--out", tcdf.out, "Output directory (default: CSV on stdout, stats on stderr)");
  t->add_flag("--svg", tcdf.svg, "Also write an SVG step plot (needs --out)");

  MocompArgs moc;
  auto* mc = app.add_subcommand("mocomp", "Patch-matching trace and compensated temporal CDF");
  mc->add_option("--input", moc.input, "RIF range document")->required()->check(CLI::ExistingFile);
  mc->add_option("--ray", moc.ray, "Raypath as row,col")->required();
  mc->add_option("--radius", moc.radius, "Search radius in pixels")->capture_default_str();
  mc->add_option("--patch", moc.patch, "Matching patch, rows x cols")->capture_default_str();
  mc->add_option("--min-pairs", moc.min_pairs, "Minimum comparable pairs per candidate")
      ->capture_default_str();
  mc->add_option("--out", moc.out, "Output directory (default: trace on stdout, summary on stderr)");

  ScdfArgs scdf;
  auto* sc = app.add_subcommand("scdf", "Spatial CDF of a raypath's neighborhood in one frame");
  sc->add_option("--input", scdf.input, "RIF range document")->required()->check(CLI::ExistingFile);
  sc->add_option("--frame", scdf.frame, "Frame index")->capture_default_str();
  sc->add_option("--ray", scdf.ray, "Raypath as row,col")->required();
  sc->add_option("--patch", scdf.patch, "Neighborhood, rows x cols")->capture_default_str();
  sc->add_flag("--all-frames", scdf.all_frames, "One CDF per frame, long format frame,x,F");
  sc->add_option("--out", scdf.out, "Output directory (default: stdout)");
  sc->add_flag("--svg", scdf.svg, "Also write an SVG step plot (needs --out)");

  CompareArgs cmp;
  auto* c = app.add_subcommand("compare", "Kolmogorov-Smirnov distance between two CDF CSVs");
  c->add_option("--a", cmp.a, "First x,F CSV")->required()->check(CLI::ExistingFile);
  c->add_option("--b", cmp.b, "Second x,F CSV")->required()->check(CLI::ExistingFile);
  c->add_option("--out", cmp.out, "Output directory (default: stdout)");

  FitArgs fit;
  auto* f = app.add_subcommand("fit-gmm", "Threshold-segmented Gaussian mixture fit");
  auto* fin = f->add_option("--input", fit.input, "RIF range document")->check(CLI::ExistingFile);
  auto* fsm = f->add_option("--samples", fit.samples,
                            "Range samples, comma or newline separated; -1 marks a non-return")
                  ->check(CLI::ExistingFile);
  fin->excludes(fsm);
  f->add_option("--ray", fit.ray, "Raypath as row,col (with --input)");
  f->add_option("--thresholds", fit.thresholds, "Ascending CDF thresholds, e.g. 0.14,0.38,0.68")
      ->delimiter(',');
  f->add_option("--min-gap", fit.min_gap, "Range gap for automatic thresholds, meters")
      ->capture_default_str();
  f->add_option("--sigma-floor", fit.sigma_floor, "Lower bound on cluster sigma, meters")
      ->capture_default_str();
  f->add_option("--out", fit.out, "Output directory (default: JSON on stdout, fit on stderr)");
  f->require_option(1, 0);

  MonitorArgs mon;
  auto* m = app.add_subcommand("monitor", "Flag multi-return raypaths from spatial CDFs");
  m->add_option("--input", mon.input, "RIF range document")->required()->check(CLI::ExistingFile);
  m->add_option("--frame", mon.frame, "Frame index")->capture_default_str();
  m->add_option("--patch", mon.patch, "Neighborhood, rows x cols")->capture_default_str();
  m->add_option("--span", mon.cfg.span_threshold, "Span threshold, meters")->capture_default_str();
  m->add_option("--min-gap", mon.cfg.min_gap, "Cluster gap, meters")->capture_default_str();
  m->add_option("--min-clusters", mon.cfg.min_cluster_count, "Cluster count that flags")
      ->capture_default_str();
  m->add_option("--max-nonreturn", mon.cfg.max_nonreturn_fraction,
                "Non-return fraction above which a raypath is flagged")
      ->capture_default_str();
  m->add_option("--labels", mon.labels, "PGM ground-truth mask for precision/recall")
      ->check(CLI::ExistingFile);
  m->add_option("--out", mon.out, "Output directory (default: CSV on stdout, score on stderr)");

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Render a synthetic scene into RIF frames");
  auto* ss = s->add_option("--scene", sim.scene, "Scene JSON")->check(CLI::ExistingFile);
  auto* sp = s->add_option("--preset", sim.preset, "Built-in scene")
                 ->check(CLI::IsMember(preset_names()));
  ss->excludes(sp);
  s->add_option("--seed", sim.seed, "Random seed")->required();
  s->add_option("--frames", sim.frames, "Number of frames K")->capture_default_str();
  s->add_option("--policy", sim.policy, "Detector policy override")
      ->check(CLI::IsMember({"strongest", "last"}));
  s->add_option("--subrays", sim.subrays, "Sub-rays per pulse override");
  s->add_option("--range-sigma", sim.range_sigma, "Range noise override, meters");
  s->add_option("--half-angle", sim.half_angle, "Divergence half-angle override, radians");
  s->add_option("--out", sim.out, "Output directory")->required();
  s->require_option(1, 0);

  RegArgs reg;
  auto* r = app.add_subcommand("reg-experiment", "Registration bias sweep over injected gaps");
  r->add_option("--sweep", reg.sweep, "Sweep JSON")->check(CLI::ExistingFile);
  r->add_option("--seed", reg.seed, "Random seed")->required();
  r->add_option("--gaps", reg.gaps, "Gap values, meters")->delimiter(',');
  r->add_option("--fraction", reg.fraction, "Expected multi-return share of points");
  r->add_option("--algorithms", reg.algorithms, "icp,ndt")
      ->delimiter(',')
      ->check(CLI::IsMember({"icp", "ndt"}));
  r->add_option("--references", reg.references, "scan,map")
      ->delimiter(',')
      ->check(CLI::IsMember({"scan", "map"}));
  r->add_option("--trials", reg.trials, "Trials per cell");
  r->add_option("--r-max", reg.r_max, "ICP matching radius, meters");
  r->add_option("--voxel", reg.voxel, "NDT voxel size, meters");
  r->add_option("--noise", reg.noise, "Point noise sigma, meters");
  r->add_option("--rays", reg.rays, "Rays in the room fan");
  r->add_option("--out", reg.out, "Output directory (default: CSV on stdout)");

  ConvertArgs conv;
  auto* cv = app.add_subcommand("convert", "Rewrite RIF canonically or export point clouds");
  cv->add_option("--input", conv.input, "RIF range document")->required()->check(CLI::ExistingFile);
  cv->add_option("--reflectance", conv.reflectance, "RIF reflectance sidecar")
      ->check(CLI::ExistingFile);
  cv->add_option("--to", conv.to, "Target format")
      ->check(CLI::IsMember({"rif", "points"}))
      ->capture_default_str();
  cv->add_option("--frame", conv.frame, "Single frame for --to points");
  cv->add_option("--out", conv.out, "Output directory (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "mret: " << e.what() << "\nRun with --help for usage.\n";
    return kExitUsage;
  }

  try {
    if (t->parsed()) {
      Sink sink(tcdf.out, out, err);
      run_tcdf(tcdf, sink);
    } else if (mc->parsed()) {
      Sink sink(moc.out, out, err);
      run_mocomp(moc, sink);
    } else if (sc->parsed()) {
      Sink sink(scdf.out, out, err);
      run_scdf(scdf, sink);
    } else if (c->parsed()) {
      Sink sink(cmp.out, out, err);
      run_compare(cmp, sink);
    } else if (f->parsed()) {
      Sink sink(fit.out, out, err);
      run_fit(fit, sink);
    } else if (m->parsed()) {
      Sink sink(mon.out, out, err);
      run_monitor(mon, sink);
    } else if (s->parsed()) {
      Sink sink(sim.out, out, err);
      run_simulate(sim, sink);
    } else if (r->parsed()) {
      Sink sink(reg.out, out, err);
      run_reg(reg, sink);
    } else if (cv->parsed()) {
      Sink sink(conv.out, out, err);
      run_convert(conv, sink);
    }
  } catch (const UsageError& e) {
    err << "mret: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "mret: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    err << "mret: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "mret: " << e.what() << "\n";
    return kExitData;
  }
  return kExitOk;
}

}  // namespace mret::cli
