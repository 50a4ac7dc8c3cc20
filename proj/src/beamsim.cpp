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

#include "mret/beamsim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "mret/errors.hpp"

namespace mret {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

struct Hit {
  std::size_t surface;
  double t;
  double cos_incidence;
};

struct Intersection {
  std::size_t surface;
  double t;
};

void orthonormal_basis(const Eigen::Vector3d& axis, Eigen::Vector3d& e1, Eigen::Vector3d& e2) {
  const Eigen::Vector3d helper =
      std::abs(axis.z()) < 0.9 ? Eigen::Vector3d::UnitZ() : Eigen::Vector3d::UnitX();
  e1 = axis.cross(helper).normalized();
  e2 = axis.cross(e1);
}

/// Intersections along a sub-ray, nearest first.
std::vector<Intersection> intersections(const Scene& scene, const Eigen::Vector3d& origin,
                                        const Eigen::Vector3d& dir) {
  std::vector<Intersection> out;
  for (std::size_t s = 0; s < scene.surfaces.size(); ++s)
    if (auto t = scene.surfaces[s].intersect(origin, dir)) out.push_back({s, *t});
  std::sort(out.begin(), out.end(), [](const Intersection& a, const Intersection& b) {
    return a.t < b.t || (a.t == b.t && a.surface < b.surface);
  });
  return out;
}

bool is_opaque(const Surface& s) {
  return s.kind != SurfaceKind::porous || s.hit_probability >= 1.0;
}

/// First surface that stops the sub-ray; porous screens pass with 1 - p.
std::optional<Hit> trace_subray(const Scene& scene, const Eigen::Vector3d& origin,
                                const Eigen::Vector3d& dir, Rng& rng) {
  for (const auto& x : intersections(scene, origin, dir)) {
    const auto& s = scene.surfaces[x.surface];
    if (!is_opaque(s) && !rng.bernoulli(s.hit_probability)) continue;
    return Hit{x.surface, x.t, std::abs(dir.dot(s.normal))};
  }
  return std::nullopt;
}

/// Equal-area deterministic points on the unit disk (Vogel spiral).
Eigen::Vector2d sunflower(std::size_t n, std::size_t count) {
  static const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  const double r = std::sqrt((static_cast<double>(n) + 0.5) / static_cast<double>(count));
  const double phi = static_cast<double>(n) * golden;
  return {r * std::cos(phi), r * std::sin(phi)};
}

Eigen::Vector3d subray_direction(const Ray& axis, const Eigen::Vector3d& e1,
                                 const Eigen::Vector3d& e2, double radius,
                                 const Eigen::Vector2d& disk) {
  return (axis.direction + radius * (disk.x() * e1 + disk.y() * e2)).normalized();
}

Eigen::Vector3d unit(const Eigen::Vector3d& v, const char* what) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw std::invalid_argument(std::string(what) + " is zero");
  // Already-unit input is kept bit-exact so scene files round trip.
  return std::abs(n - 1.0) <= 1e-12 ? v : Eigen::Vector3d(v / n);
}

}  // namespace

// ---- Surface ------------------------------------------------------------------

Surface Surface::plane(Eigen::Vector3d point, Eigen::Vector3d normal, double reflectivity) {
  Surface s;
  s.kind = SurfaceKind::plane;
  s.point = point;
  s.normal = unit(normal, "normal");
  s.reflectivity = reflectivity;
  s.validate();
  return s;
}

Surface Surface::rectangle(Eigen::Vector3d center, Eigen::Vector3d normal, Eigen::Vector3d u_axis,
                           double half_u, double half_v, double reflectivity) {
  Surface s;
  s.kind = SurfaceKind::rectangle;
  s.point = center;
  s.normal = unit(normal, "normal");
  s.u_axis = unit(u_axis - u_axis.dot(s.normal) * s.normal, "u_axis");
  s.half_u = half_u;
  s.half_v = half_v;
  s.reflectivity = reflectivity;
  s.validate();
  return s;
}

Surface Surface::porous(Eigen::Vector3d center, Eigen::Vector3d normal, Eigen::Vector3d u_axis,
                        double half_u, double half_v, double reflectivity,
                        double hit_probability) {
  Surface s = rectangle(center, normal, u_axis, half_u, half_v, reflectivity);
  s.kind = SurfaceKind::porous;
  s.hit_probability = hit_probability;
  s.validate();
  return s;
}

void Surface::validate() const {
  if (std::abs(normal.norm() - 1.0) > 1e-9) throw std::invalid_argument("normal must be unit");
  if (!(reflectivity >= 0.0) || !std::isfinite(reflectivity))
    throw std::invalid_argument("reflectivity must be >= 0");
  if (kind != SurfaceKind::plane) {
    if (std::abs(u_axis.norm() - 1.0) > 1e-9 || std::abs(u_axis.dot(normal)) > 1e-9)
      throw std::invalid_argument("u_axis must be a unit vector in the surface plane");
    if (!(half_u > 0.0) || !(half_v > 0.0))
      throw std::invalid_argument("rectangle half extents must be positive");
  }
  if (!(hit_probability >= 0.0 && hit_probability <= 1.0))
    throw std::invalid_argument("hit_probability must lie in [0, 1]");
}

std::optional<double> Surface::intersect(const Eigen::Vector3d& origin,
                                         const Eigen::Vector3d& direction) const {
  const double denom = direction.dot(normal);
  if (std::abs(denom) < 1e-12) return std::nullopt;
  const double t = (point - origin).dot(normal) / denom;
  if (!(t > 1e-9)) return std::nullopt;
  if (kind == SurfaceKind::plane) return t;
  const Eigen::Vector3d local = origin + t * direction - point;
  const Eigen::Vector3d v_axis = normal.cross(u_axis);
  if (std::abs(local.dot(u_axis)) > half_u || std::abs(local.dot(v_axis)) > half_v)
    return std::nullopt;
  return t;
}

void BeamSpec::validate() const {
  if (!(half_angle > 0.0) || half_angle >= std::numbers::pi / 2)
    throw std::invalid_argument("divergence half-angle must lie in (0, pi/2)");
  if (subrays == 0) throw std::invalid_argument("subrays must be >= 1");
  if (!(range_sigma >= 0.0)) throw std::invalid_argument("range_sigma must be >= 0");
  if (rows == 0 || cols == 0) throw std::invalid_argument("beam grid must be at least 1x1");
  if (!(rate_hz > 0.0)) throw std::invalid_argument("rate_hz must be positive");
}

Ray beam_axis(const BeamSpec& spec, RaypathId ray) {
  const double el = spec.calibration.elevation_deg(ray.row) * kDeg;
  const double az = spec.calibration.azimuth_deg(ray.col) * kDeg;
  return {spec.origin, Eigen::Vector3d(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az),
                                       std::sin(el))};
}

// ---- pulses ----------------------------------------------------------------------

Pulse fire_pulse(const Scene& scene, const Ray& axis, const BeamSpec& spec, Rng& rng) {
  Eigen::Vector3d e1, e2;
  orthonormal_basis(axis.direction, e1, e2);
  const double radius = std::tan(spec.half_angle);

  const std::size_t n = scene.surfaces.size();
  std::vector<double> power(n, 0.0), range_sum(n, 0.0);
  std::vector<std::size_t> count(n, 0);
  for (std::size_t m = 0; m < spec.subrays; ++m) {
    const double r = std::sqrt(rng.uniform());
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    const auto dir = subray_direction(axis, e1, e2, radius,
                                      {r * std::cos(phi), r * std::sin(phi)});
    if (auto hit = trace_subray(scene, axis.origin, dir, rng)) {
      power[hit->surface] += scene.surfaces[hit->surface].reflectivity * hit->cos_incidence;
      range_sum[hit->surface] += hit->t;
      ++count[hit->surface];
    }
  }

  double total = 0.0;
  for (double p : power) total += p;
  if (!(total > 0.0)) return {};

  std::size_t chosen = n;
  if (spec.policy == DetectorPolicy::strongest) {
    const double u = rng.uniform() * total;
    double acc = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      if (power[s] <= 0.0) continue;
      acc += power[s];
      chosen = s;
      if (u < acc) break;
    }
  } else {
    double farthest = -1.0;
    for (std::size_t s = 0; s < n; ++s) {
      if (power[s] <= 0.0) continue;
      const double mean = range_sum[s] / static_cast<double>(count[s]);
      if (mean > farthest) farthest = mean, chosen = s;
    }
  }

  const double mean_range = range_sum[chosen] / static_cast<double>(count[chosen]);
  Pulse p;
  p.surface = chosen;
  p.ret.range = std::max(0.0, rng.normal(mean_range, spec.range_sigma));
  p.ret.reflectance = power[chosen] / static_cast<double>(spec.subrays) * 100.0;
  return p;
}

std::vector<double> analytic_cluster_weights(const Scene& scene, const Ray& axis,
                                             const BeamSpec& spec, std::size_t dense) {
  for (const auto& s : scene.surfaces)
    if (!is_opaque(s))
      throw DataError(DataErrorKind::unsupported,
                      "analytic weights are defined for opaque scenes only");
  if (dense == 0) throw std::invalid_argument("dense quadrature needs at least one point");
  Eigen::Vector3d e1, e2;
  orthonormal_basis(axis.direction, e1, e2);
  const double radius = std::tan(spec.half_angle);
  const std::size_t n = scene.surfaces.size();
  std::vector<double> power(n, 0.0), area(n, 0.0), range_sum(n, 0.0);
  for (std::size_t q = 0; q < dense; ++q) {
    const auto dir = subray_direction(axis, e1, e2, radius, sunflower(q, dense));
    const auto xs = intersections(scene, axis.origin, dir);
    if (xs.empty()) continue;
    const auto& s = scene.surfaces[xs.front().surface];
    if (s.reflectivity <= 0.0) continue;
    power[xs.front().surface] += s.reflectivity * std::abs(dir.dot(s.normal));
    area[xs.front().surface] += 1.0 / static_cast<double>(dense);
    range_sum[xs.front().surface] += xs.front().t;
  }

  std::vector<double> w(n, 0.0);
  if (spec.policy == DetectorPolicy::strongest) {
    double total = 0.0;
    for (double p : power) total += p;
    if (total > 0.0)
      for (std::size_t s = 0; s < n; ++s) w[s] = power[s] / total;
    return w;
  }

  // Last return: surface g is reported when no sub-ray lands on anything
  // farther and at least one lands on g. Sub-rays are independent draws.
  std::vector<std::size_t> order;
  for (std::size_t s = 0; s < n; ++s)
    if (area[s] > 0.0) order.push_back(s);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return range_sum[a] / area[a] > range_sum[b] / area[b];
  });
  const double m = static_cast<double>(spec.subrays);
  double farther = 0.0;
  double any = 0.0;
  for (std::size_t g : order) {
    w[g] = std::pow(1.0 - farther, m) - std::pow(1.0 - farther - area[g], m);
    farther += area[g];
    any += w[g];
  }
  if (any > 0.0)
    for (double& v : w) v /= any;
  return w;
}

bool multi_surface_label(const Scene& scene, const Ray& axis, const BeamSpec& spec) {
  constexpr std::size_t kInterior = 1024;
  constexpr std::size_t kRim = 64;
  Eigen::Vector3d e1, e2;
  orthonormal_basis(axis.direction, e1, e2);
  const double radius = std::tan(spec.half_angle);
  std::vector<bool> seen(scene.surfaces.size(), false);
  std::size_t distinct = 0;
  auto probe = [&](const Eigen::Vector2d& disk) {
    const auto dir = subray_direction(axis, e1, e2, radius, disk);
    for (const auto& x : intersections(scene, axis.origin, dir)) {
      const auto& s = scene.surfaces[x.surface];
      const bool can_return = s.reflectivity > 0.0 &&
                              (s.kind != SurfaceKind::porous || s.hit_probability > 0.0);
      if (can_return && !seen[x.surface]) {
        seen[x.surface] = true;
        ++distinct;
      }
      if (is_opaque(s)) break;
    }
  };
  for (std::size_t q = 0; q < kInterior && distinct < 2; ++q) probe(sunflower(q, kInterior));
  for (std::size_t q = 0; q < kRim && distinct < 2; ++q) {
    const double phi = 2.0 * std::numbers::pi * static_cast<double>(q) / kRim;
    probe({std::cos(phi), std::sin(phi)});
  }
  return distinct >= 2;
}

// ---- sequences ---------------------------------------------------------------------

Mask label_grid(const Scene& scene, const BeamSpec& spec) {
  spec.validate();
  Mask labels{spec.rows, spec.cols, std::vector<std::uint8_t>(spec.rows * spec.cols, 0)};
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(spec.rows); ++i)
    for (std::size_t j = 0; j < spec.cols; ++j) {
      const RaypathId id{static_cast<std::size_t>(i), j};
      labels.cells[id.row * spec.cols + j] =
          multi_surface_label(scene, beam_axis(spec, id), spec) ? 1 : 0;
    }
  return labels;
}

Simulation simulate_sequence(const Scene& scene, const BeamSpec& spec, std::size_t frames) {
  spec.validate();
  if (frames == 0) throw std::invalid_argument("simulate_sequence needs K >= 1");
  for (const auto& s : scene.surfaces) s.validate();
  const std::size_t rows = spec.rows;
  const std::size_t cols = spec.cols;
  std::vector<std::vector<Return>> cells(frames, std::vector<Return>(rows * cols));
  const auto work = static_cast<std::ptrdiff_t>(frames * rows);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t w = 0; w < work; ++w) {
    const auto k = static_cast<std::size_t>(w) / rows;
    const auto i = static_cast<std::size_t>(w) % rows;
    for (std::size_t j = 0; j < cols; ++j) {
      auto rng = pulse_stream(scene.seed, {i, j}, k);
      cells[k][i * cols + j] = fire_pulse(scene, beam_axis(spec, {i, j}), spec, rng).ret;
    }
  }
  std::vector<RangeImage> images;
  images.reserve(frames);
  for (auto& c : cells) images.emplace_back(rows, cols, spec.calibration, std::move(c));
  return {FrameSequence(std::move(images), spec.rate_hz), label_grid(scene, spec)};
}

}  // namespace mret
