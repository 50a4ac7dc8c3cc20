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

#include "mret/regimpact.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

#include <json.hpp>

#include "mret/errors.hpp"
#include "mret/io.hpp"
#include "mret/rng.hpp"

namespace mret {

// ---- rigid transforms -----------------------------------------------------------

Vec2 Rigid2::apply(const Vec2& p) const {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * p.x() - s * p.y() + translation.x(), s * p.x() + c * p.y() + translation.y()};
}

Rigid2 Rigid2::inverse() const {
  const double c = std::cos(angle), s = std::sin(angle);
  const Vec2 t = translation;
  return {-angle, Vec2(-(c * t.x() + s * t.y()), -(-s * t.x() + c * t.y()))};
}

Rigid2 Rigid2::compose(const Rigid2& other) const {
  const Rigid2 rot_only{angle, Vec2::Zero()};
  return {angle + other.angle, rot_only.apply(other.translation) + translation};
}

Cloud transform(const Cloud& cloud, const Rigid2& t) {
  Cloud out;
  out.reserve(cloud.size());
  for (const auto& p : cloud) out.push_back(t.apply(p));
  return out;
}

namespace {

Rigid2 weighted_procrustes(const Cloud& from, const Cloud& to, const std::vector<double>& w) {
  double wsum = 0.0;
  Vec2 cf = Vec2::Zero(), ct = Vec2::Zero();
  for (std::size_t i = 0; i < from.size(); ++i) {
    wsum += w[i];
    cf += w[i] * from[i];
    ct += w[i] * to[i];
  }
  if (!(wsum > 0.0)) throw DataError(DataErrorKind::degenerate, "no pairs to align");
  cf /= wsum;
  ct /= wsum;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < from.size(); ++i) {
    const Vec2 a = from[i] - cf;
    const Vec2 b = to[i] - ct;
    sxx += w[i] * (a.x() * b.x() + a.y() * b.y());
    sxy += w[i] * (a.x() * b.y() - a.y() * b.x());
  }
  Rigid2 r;
  r.angle = (sxx == 0.0 && sxy == 0.0) ? 0.0 : std::atan2(sxy, sxx);
  r.translation = ct - Rigid2{r.angle, Vec2::Zero()}.apply(cf);
  return r;
}

std::int64_t cell_key(std::int64_t ix, std::int64_t iy) {
  return (ix << 32) ^ (iy & 0xffffffffLL);
}

std::int64_t cell_of(double v, double size) {
  return static_cast<std::int64_t>(std::floor(v / size));
}

/// Uniform grid over a cloud for fixed-radius nearest-neighbour queries.
class GridIndex {
 public:
  GridIndex(const Cloud& cloud, double cell) : cloud_(cloud), cell_(cell) {
    for (std::size_t i = 0; i < cloud.size(); ++i)
      cells_[cell_key(cell_of(cloud[i].x(), cell), cell_of(cloud[i].y(), cell))].push_back(i);
  }

  /// Index of the nearest point within `radius` (<= cell size), or npos.
  std::size_t nearest(const Vec2& q, double radius) const {
    const auto cx = cell_of(q.x(), cell_);
    const auto cy = cell_of(q.y(), cell_);
    double best = radius * radius;
    std::size_t best_i = npos;
    for (std::int64_t dx = -1; dx <= 1; ++dx)
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        auto it = cells_.find(cell_key(cx + dx, cy + dy));
        if (it == cells_.end()) continue;
        for (std::size_t i : it->second) {
          const double d2 = (cloud_[i] - q).squaredNorm();
          if (d2 < best || (d2 == best && i < best_i && best_i != npos)) {
            best = d2;
            best_i = i;
          }
        }
      }
    return best_i;
  }

  static constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

 private:
  const Cloud& cloud_;
  double cell_;
  std::unordered_map<std::int64_t, std::vector<std::size_t>> cells_;
};

struct VoxelStats {
  Vec2 sum = Vec2::Zero();
  std::size_t count = 0;
};

/// Voxel statistics keyed by cell; std::map keeps iteration order stable.
std::map<std::pair<std::int64_t, std::int64_t>, VoxelStats> voxelize(const Cloud& cloud,
                                                                     double size) {
  std::map<std::pair<std::int64_t, std::int64_t>, VoxelStats> out;
  for (const auto& p : cloud) {
    auto& v = out[{cell_of(p.x(), size), cell_of(p.y(), size)}];
    v.sum += p;
    ++v.count;
  }
  return out;
}

RegistrationResult finish(Rigid2 estimate, const Rigid2& truth,
                          std::vector<IterationTrace> trace) {
  RegistrationResult r;
  r.estimate = estimate;
  r.truth = truth;
  r.translation_error = (estimate.translation - truth.translation).norm();
  r.trace = std::move(trace);
  return r;
}

bool converged(const Rigid2& step, double tol) {
  return std::abs(step.angle) <= tol && step.translation.norm() <= tol;
}

}  // namespace

Rigid2 procrustes(const Cloud& from, const Cloud& to) {
  if (from.size() != to.size()) throw std::invalid_argument("procrustes needs paired clouds");
  return weighted_procrustes(from, to, std::vector<double>(from.size(), 1.0));
}

std::string_view to_string(ReferenceKind kind) noexcept {
  return kind == ReferenceKind::scan ? "scan" : "map";
}

std::string_view to_string(Algorithm algo) noexcept {
  return algo == Algorithm::icp ? "icp" : "ndt";
}

double RegistrationResult::bias_along(const Vec2& direction) const {
  return (truth.translation - estimate.translation).dot(direction);
}

// ---- experiments ------------------------------------------------------------------

void RegistrationConfig::validate() const {
  if (!(gap >= 0.0)) throw std::invalid_argument("gap must be >= 0");
  if (!(fraction >= 0.0 && fraction <= 1.0))
    throw std::invalid_argument("multi-return fraction must lie in [0, 1]");
  if (!(icp.max_radius > 0.0)) throw std::invalid_argument("ICP max radius must be positive");
  if (!(ndt.voxel_size > 0.0)) throw std::invalid_argument("voxel size must be positive");
  if (!(noise_sigma >= 0.0)) throw std::invalid_argument("noise sigma must be >= 0");
  if (!(room.half_x > 0.0 && room.half_y > 0.0) || room.rays < 3)
    throw std::invalid_argument("room template is degenerate");
  if (!(room.panel_pitch > 0.0 && room.panel_width > 0.0 && room.panel_width <= room.panel_pitch))
    throw std::invalid_argument("panel width must lie in (0, panel_pitch]");
}

Experiment make_experiment(const RegistrationConfig& cfg, std::uint64_t trial) {
  cfg.validate();
  auto rng = Rng::stream(cfg.seed, {trial});
  const std::size_t n = cfg.room.rays;

  auto on_panel = [&](double along) {
    const double cell = along / cfg.room.panel_pitch;
    const double offset = (cell - std::floor(cell) - 0.5) * cfg.room.panel_pitch;
    return std::abs(offset) <= 0.5 * cfg.room.panel_width;
  };
  Cloud base;
  std::vector<std::size_t> candidates;
  for (std::size_t r = 0; r < n; ++r) {
    const double theta = 2.0 * std::numbers::pi * (static_cast<double>(r) + 0.5) /
                         static_cast<double>(n);
    const double c = std::cos(theta), s = std::sin(theta);
    const double tx = c != 0.0 ? cfg.room.half_x / std::abs(c) : std::numeric_limits<double>::infinity();
    const double ty = s != 0.0 ? cfg.room.half_y / std::abs(s) : std::numeric_limits<double>::infinity();
    const Vec2 p = std::min(tx, ty) * Vec2(c, s);
    const bool x_wall = tx <= ty;
    if (!on_panel(x_wall ? p.y() : p.x())) continue;
    if (x_wall && c > 0.0) candidates.push_back(base.size());
    base.push_back(p);
  }
  const std::size_t n_points = base.size();

  // Stochastic rounding keeps the expected multi-return share exactly at
  // `fraction` for any cloud size.
  const double target = cfg.fraction * static_cast<double>(n_points);
  auto wanted = static_cast<std::size_t>(std::floor(target));
  if (rng.bernoulli(target - std::floor(target))) ++wanted;
  if (wanted > candidates.size())
    throw std::invalid_argument("multi-return fraction exceeds the rays hitting the +x wall");
  // Partial Fisher-Yates: the first `wanted` candidates become multi-return.
  for (std::size_t i = 0; i < wanted; ++i) {
    const auto span = candidates.size() - i;
    const auto pick = i + std::min(span - 1, static_cast<std::size_t>(rng.uniform() * span));
    std::swap(candidates[i], candidates[pick]);
  }
  std::vector<bool> multi(n_points, false);
  for (std::size_t i = 0; i < wanted; ++i) multi[candidates[i]] = true;

  Experiment ex;
  ex.multi_return_rays = wanted;
  ex.truth.angle = rng.uniform(-cfg.max_truth_rotation, cfg.max_truth_rotation);
  ex.truth.translation = {rng.uniform(-cfg.max_truth_translation, cfg.max_truth_translation),
                          rng.uniform(-cfg.max_truth_translation, cfg.max_truth_translation)};
  const Vec2 far_offset = cfg.gap * injection_direction();
  auto noisy = [&](const Vec2& p) {
    return Vec2(rng.normal(p.x(), cfg.noise_sigma), rng.normal(p.y(), cfg.noise_sigma));
  };

  const Rigid2 to_current = ex.truth.inverse();
  for (std::size_t r = 0; r < n_points; ++r) {
    Vec2 cur = base[r];
    if (multi[r] && rng.bernoulli(0.5)) {
      cur += far_offset;
      ++ex.far_in_current;
    }
    ex.current.push_back(to_current.apply(noisy(cur)));
    ex.reference.push_back(noisy(base[r]));
    if (multi[r] && cfg.reference == ReferenceKind::map)
      ex.reference.push_back(noisy(base[r] + far_offset));
  }
  return ex;
}

// ---- registration ------------------------------------------------------------------

RegistrationResult run_icp(const Cloud& current, const Cloud& reference, const IcpParams& params,
                           const Rigid2& truth) {
  if (current.empty() || reference.empty())
    throw std::invalid_argument("ICP needs two nonempty clouds");
  if (!(params.max_radius > 0.0)) throw std::invalid_argument("max_radius must be positive");
  const GridIndex index(reference, params.max_radius);
  Rigid2 est;
  std::vector<IterationTrace> trace;
  Cloud from, to;
  for (std::size_t it = 0; it < params.iterations; ++it) {
    from.clear();
    to.clear();
    double ss = 0.0;
    for (const auto& p : current) {
      const Vec2 q = est.apply(p);
      const auto nn = index.nearest(q, params.max_radius);
      if (nn == GridIndex::npos) continue;
      from.push_back(q);
      to.push_back(reference[nn]);
      ss += (reference[nn] - q).squaredNorm();
    }
    if (from.empty())
      throw DataError(DataErrorKind::degenerate, "ICP found no pairs within the matching radius");
    trace.push_back({from.size(), std::sqrt(ss / static_cast<double>(from.size()))});
    const Rigid2 step = procrustes(from, to);
    est = step.compose(est);
    if (converged(step, params.tolerance)) break;
  }
  return finish(est, truth, std::move(trace));
}

RegistrationResult run_ndt_lite(const Cloud& current, const Cloud& reference,
                                const NdtParams& params, const Rigid2& truth) {
  if (current.empty() || reference.empty())
    throw std::invalid_argument("NDT needs two nonempty clouds");
  if (!(params.voxel_size > 0.0)) throw std::invalid_argument("voxel_size must be positive");
  const auto ref_voxels = voxelize(reference, params.voxel_size);
  Rigid2 est;
  std::vector<IterationTrace> trace;
  Cloud from, to;
  std::vector<double> weights;
  for (std::size_t it = 0; it < params.iterations; ++it) {
    const auto cur_voxels = voxelize(transform(current, est), params.voxel_size);
    from.clear();
    to.clear();
    weights.clear();
    double ss = 0.0;
    std::size_t matched = 0;
    for (const auto& [key, cv] : cur_voxels) {
      auto rv = ref_voxels.find(key);
      if (rv == ref_voxels.end()) continue;
      const Vec2 a = cv.sum / static_cast<double>(cv.count);
      const Vec2 b = rv->second.sum / static_cast<double>(rv->second.count);
      from.push_back(a);
      to.push_back(b);
      // Weighting by point count makes the update a per-point least squares.
      weights.push_back(static_cast<double>(cv.count));
      ss += static_cast<double>(cv.count) * (b - a).squaredNorm();
      matched += cv.count;
    }
    if (from.empty())
      throw DataError(DataErrorKind::degenerate, "NDT found no voxels populated in both clouds");
    trace.push_back({matched, std::sqrt(ss / static_cast<double>(matched))});
    const Rigid2 step = weighted_procrustes(from, to, weights);
    est = step.compose(est);
    if (converged(step, params.tolerance)) break;
  }
  return finish(est, truth, std::move(trace));
}

// ---- sweeps -------------------------------------------------------------------------

std::vector<RegistrationResult> run_trials(const RegistrationConfig& cfg, Algorithm algo,
                                           std::size_t trials) {
  cfg.validate();
  std::vector<RegistrationResult> out(trials);
  std::vector<std::exception_ptr> errors(trials);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t t = 0; t < static_cast<std::ptrdiff_t>(trials); ++t) {
    const auto idx = static_cast<std::size_t>(t);
    try {
      const auto ex = make_experiment(cfg, idx);
      out[idx] = algo == Algorithm::icp ? run_icp(ex.current, ex.reference, cfg.icp, ex.truth)
                                        : run_ndt_lite(ex.current, ex.reference, cfg.ndt, ex.truth);
    } catch (...) {
      errors[idx] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<BiasRow> bias_report(const SweepConfig& sweep) {
  if (sweep.trials == 0) throw std::invalid_argument("bias_report needs at least one trial");
  std::vector<BiasRow> rows;
  for (double gap : sweep.gaps)
    for (auto algo : sweep.algorithms)
      for (auto ref : sweep.references) {
        auto cfg = sweep.base;
        cfg.gap = gap;
        cfg.reference = ref;
        const auto results = run_trials(cfg, algo, sweep.trials);
        BiasRow row{gap, algo, ref, 0.0, 0.0, 0.0, results.size()};
        for (const auto& r : results) {
          row.mean_bias += r.translation_error;
          row.max_bias = std::max(row.max_bias, r.translation_error);
        }
        row.mean_bias /= static_cast<double>(results.size());
        double ss = 0.0;
        for (const auto& r : results)
          ss += (r.translation_error - row.mean_bias) * (r.translation_error - row.mean_bias);
        row.std_bias = std::sqrt(ss / static_cast<double>(results.size()));
        rows.push_back(row);
      }
  return rows;
}

std::string bias_report_csv(const std::vector<BiasRow>& rows) {
  std::string out = "delta,algorithm,reference,mean_bias,std_bias,max_bias,trials\n";
  for (const auto& r : rows)
    out += io::format_double(r.gap) + ',' + std::string(to_string(r.algorithm)) + ',' +
           std::string(to_string(r.reference)) + ',' + io::format_double(r.mean_bias) + ',' +
           io::format_double(r.std_bias) + ',' + io::format_double(r.max_bias) + ',' +
           std::to_string(r.trials) + '\n';
  return out;
}

// ---- JSON ------------------------------------------------------------------------------

SweepConfig parse_sweep_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    SweepConfig s;
    auto& b = s.base;
    if (j.contains("room")) {
      const auto& r = j.at("room");
      b.room.half_x = r.value("half_x", b.room.half_x);
      b.room.half_y = r.value("half_y", b.room.half_y);
      b.room.rays = r.value("rays", b.room.rays);
      b.room.panel_pitch = r.value("panel_pitch", b.room.panel_pitch);
      b.room.panel_width = r.value("panel_width", b.room.panel_width);
    }
    b.fraction = j.value("fraction", b.fraction);
    b.gap = j.value("gap", b.gap);
    b.noise_sigma = j.value("noise_sigma", b.noise_sigma);
    b.max_truth_translation = j.value("max_truth_translation", b.max_truth_translation);
    b.max_truth_rotation = j.value("max_truth_rotation", b.max_truth_rotation);
    b.seed = j.value("seed", b.seed);
    if (j.contains("reference"))
      b.reference = j.at("reference").get<std::string>() == "map" ? ReferenceKind::map
                                                                   : ReferenceKind::scan;
    if (j.contains("icp")) {
      b.icp.max_radius = j.at("icp").value("max_radius", b.icp.max_radius);
      b.icp.iterations = j.at("icp").value("iterations", b.icp.iterations);
    }
    if (j.contains("ndt")) {
      b.ndt.voxel_size = j.at("ndt").value("voxel_size", b.ndt.voxel_size);
      b.ndt.iterations = j.at("ndt").value("iterations", b.ndt.iterations);
    }
    if (j.contains("gaps")) s.gaps = j.at("gaps").get<std::vector<double>>();
    if (j.contains("algorithms")) {
      s.algorithms.clear();
      for (const auto& a : j.at("algorithms")) {
        const auto name = a.get<std::string>();
        if (name == "icp") s.algorithms.push_back(Algorithm::icp);
        else if (name == "ndt") s.algorithms.push_back(Algorithm::ndt);
        else throw ParseError(0, "unknown algorithm '" + name + "'");
      }
    }
    if (j.contains("references")) {
      s.references.clear();
      for (const auto& r : j.at("references")) {
        const auto name = r.get<std::string>();
        if (name == "scan") s.references.push_back(ReferenceKind::scan);
        else if (name == "map") s.references.push_back(ReferenceKind::map);
        else throw ParseError(0, "unknown reference kind '" + name + "'");
      }
    }
    s.trials = j.value("trials", s.trials);
    b.validate();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("experiment JSON: ") + e.what());
  }
}

std::string sweep_to_json(const SweepConfig& s) {
  nlohmann::ordered_json j;
  const auto& b = s.base;
  j["room"] = {{"half_x", b.room.half_x},           {"half_y", b.room.half_y},
               {"rays", b.room.rays},               {"panel_pitch", b.room.panel_pitch},
               {"panel_width", b.room.panel_width}};
  j["fraction"] = b.fraction;
  j["noise_sigma"] = b.noise_sigma;
  j["max_truth_translation"] = b.max_truth_translation;
  j["max_truth_rotation"] = b.max_truth_rotation;
  j["seed"] = b.seed;
  j["icp"] = {{"max_radius", b.icp.max_radius}, {"iterations", b.icp.iterations}};
  j["ndt"] = {{"voxel_size", b.ndt.voxel_size}, {"iterations", b.ndt.iterations}};
  j["gaps"] = s.gaps;
  auto algos = nlohmann::ordered_json::array();
  for (auto a : s.algorithms) algos.push_back(std::string(to_string(a)));
  j["algorithms"] = algos;
  auto refs = nlohmann::ordered_json::array();
  for (auto r : s.references) refs.push_back(std::string(to_string(r)));
  j["references"] = refs;
  j["trials"] = s.trials;
  return j.dump(2) + "\n";
}

}  // namespace mret
