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

#include "mret/ecdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "mret/errors.hpp"
#include "mret/io.hpp"

namespace mret {

// ---- StepCurve --------------------------------------------------------------

StepCurve::StepCurve(std::vector<CdfJump> jumps) : jumps_(std::move(jumps)) {
  double prev_after = 0.0;
  double prev_x = -std::numeric_limits<double>::infinity();
  for (const auto& j : jumps_) {
    if (!std::isfinite(j.x) || !(j.x > prev_x))
      throw std::invalid_argument("step curve jumps must have strictly increasing finite x");
    if (j.before != prev_after || j.after < j.before || j.after > 1.0)
      throw std::invalid_argument("step curve jumps must chain and stay within [0, 1]");
    prev_after = j.after;
    prev_x = j.x;
  }
}

double StepCurve::eval(double x) const noexcept {
  auto it = std::upper_bound(jumps_.begin(), jumps_.end(), x,
                             [](double v, const CdfJump& j) { return v < j.x; });
  return it == jumps_.begin() ? 0.0 : std::prev(it)->after;
}

double StepCurve::eval_below(double x) const noexcept {
  auto it = std::lower_bound(jumps_.begin(), jumps_.end(), x,
                             [](const CdfJump& j, double v) { return j.x < v; });
  return it == jumps_.begin() ? 0.0 : std::prev(it)->after;
}

// ---- EmpiricalCdf -----------------------------------------------------------

EmpiricalCdf::EmpiricalCdf(std::vector<double> samples, std::size_t total_count,
                           CdfSource source)
    : samples_(std::move(samples)), total_(total_count), source_(source) {
  if (total_ == 0) throw std::invalid_argument("empirical CDF needs N >= 1");
  if (samples_.size() > total_) throw std::invalid_argument("more samples than N");
  for (double s : samples_)
    if (!std::isfinite(s)) throw std::invalid_argument("CDF samples must be finite");
  std::sort(samples_.begin(), samples_.end());
}

double EmpiricalCdf::eval(double x) const noexcept {
  const auto n = std::upper_bound(samples_.begin(), samples_.end(), x) - samples_.begin();
  return static_cast<double>(n) / static_cast<double>(total_);
}

double EmpiricalCdf::eval_below(double x) const noexcept {
  const auto n = std::lower_bound(samples_.begin(), samples_.end(), x) - samples_.begin();
  return static_cast<double>(n) / static_cast<double>(total_);
}

StepCurve EmpiricalCdf::curve() const {
  std::vector<CdfJump> jumps;
  const double n = static_cast<double>(total_);
  std::size_t i = 0;
  while (i < samples_.size()) {
    std::size_t j = i;
    while (j < samples_.size() && samples_[j] == samples_[i]) ++j;
    jumps.push_back({samples_[i], static_cast<double>(i) / n, static_cast<double>(j) / n});
    i = j;
  }
  return StepCurve(std::move(jumps));
}

// ---- construction -------------------------------------------------------------

EmpiricalCdf temporal_cdf(const FrameSequence& seq, RaypathId ray) {
  if (!seq.contains(ray)) throw std::out_of_range("raypath out of range");
  std::vector<double> samples;
  samples.reserve(seq.size());
  for (const auto& f : seq.frames()) {
    const auto& cell = f.at(ray);
    if (cell.has_range()) samples.push_back(cell.range);
  }
  return EmpiricalCdf(std::move(samples), seq.size(),
                      {CdfSource::Kind::temporal, ray, 0});
}

EmpiricalCdf spatial_cdf(const RangeImage& image, RaypathId ray, NeighborhoodSpec spec) {
  const auto hood = neighborhood(image, ray, spec);
  std::vector<double> samples;
  samples.reserve(hood.cells.size());
  for (const auto& c : hood.cells)
    if (c.has_range()) samples.push_back(c.range);
  return EmpiricalCdf(std::move(samples), hood.cells.size(), {CdfSource::Kind::spatial, ray, 0});
}

// ---- comparison ------------------------------------------------------------------

KsResult ks_compare(const StepCurve& a, const StepCurve& b) {
  KsResult best;
  auto consider = [&](double x) {
    const double below = std::abs(a.eval_below(x) - b.eval_below(x));
    const double at = std::abs(a.eval(x) - b.eval(x));
    const double d = std::max(below, at);
    if (d > best.distance) best = {d, x};
  };
  for (const auto& j : a.jumps()) consider(j.x);
  for (const auto& j : b.jumps()) consider(j.x);
  return best;
}

double ks_distance(const EmpiricalCdf& a, const EmpiricalCdf& b) {
  return ks_compare(a.curve(), b.curve()).distance;
}

// ---- statistics --------------------------------------------------------------------

CdfStats cdf_stats(const EmpiricalCdf& cdf) {
  const auto s = cdf.samples();
  if (s.empty()) throw DataError(DataErrorKind::no_data, "CDF has no finite samples");
  CdfStats st;
  st.count = s.size();
  st.total = cdf.total_count();
  st.return_fraction = cdf.return_fraction();
  double sum = 0.0;
  for (double v : s) sum += v;
  st.mean = sum / static_cast<double>(s.size());
  double ss = 0.0;
  for (double v : s) ss += (v - st.mean) * (v - st.mean);
  st.std = std::sqrt(ss / static_cast<double>(s.size()));
  st.min = s.front();
  st.max = s.back();
  st.span = st.max - st.min;
  return st;
}

std::vector<std::optional<CdfStats>> temporal_stats_map(const FrameSequence& seq) {
  const std::size_t rows = seq.rows();
  const std::size_t cols = seq.cols();
  std::vector<std::optional<CdfStats>> out(rows * cols);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(rows); ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      const auto cdf = temporal_cdf(seq, {static_cast<std::size_t>(i), j});
      if (cdf.sample_count() > 0) out[static_cast<std::size_t>(i) * cols + j] = cdf_stats(cdf);
    }
  }
  return out;
}

// ---- export --------------------------------------------------------------------------

std::string cdf_to_csv(const StepCurve& curve) {
  std::string out = "x,F\n";
  for (const auto& j : curve.jumps()) {
    const auto x = io::format_double(j.x);
    out += x + ',' + io::format_double(j.before) + '\n';
    out += x + ',' + io::format_double(j.after) + '\n';
  }
  return out;
}

StepCurve parse_cdf_csv(std::string_view text) {
  const auto all = io::lines(text);
  std::size_t l = 0;
  while (l < all.size() && io::trim(all[l]).empty()) ++l;
  if (l == all.size() || io::trim(all[l]) != "x,F") throw ParseError(l + 1, "expected header x,F");
  ++l;
  std::vector<std::pair<double, double>> rows;
  std::vector<std::size_t> line_of;
  for (; l < all.size(); ++l) {
    const auto line = io::trim(all[l]);
    if (line.empty() || line.front() == '#') continue;
    const auto f = io::split(line, ',');
    double x = 0, v = 0;
    if (f.size() != 2 || !io::parse_double(f[0], x) || !io::parse_double(f[1], v) ||
        !std::isfinite(x) || !std::isfinite(v))
      throw ParseError(l + 1, "expected two numeric columns");
    rows.emplace_back(x, v);
    line_of.push_back(l + 1);
  }
  if (rows.size() % 2 != 0) throw ParseError(0, "jump rows must come in pre/post pairs");
  std::vector<CdfJump> jumps;
  for (std::size_t r = 0; r < rows.size(); r += 2) {
    if (rows[r].first != rows[r + 1].first)
      throw ParseError(line_of[r + 1], "pre/post jump rows disagree on x");
    jumps.push_back({rows[r].first, rows[r].second, rows[r + 1].second});
  }
  try {
    return StepCurve(std::move(jumps));
  } catch (const std::invalid_argument& e) {
    throw ParseError(0, e.what());
  }
}

std::optional<ReflectanceStats> reflectance_stats(const FrameSequence& seq, RaypathId ray) {
  if (!seq.contains(ray)) throw std::out_of_range("raypath out of range");
  std::vector<double> values;
  for (const auto& f : seq.frames()) {
    const auto& cell = f.at(ray);
    if (cell.has_range() && cell.reflectance) values.push_back(*cell.reflectance);
  }
  if (values.empty()) return std::nullopt;
  ReflectanceStats r;
  r.count = values.size();
  r.min = *std::min_element(values.begin(), values.end());
  r.max = *std::max_element(values.begin(), values.end());
  for (double v : values) r.mean += v;
  r.mean /= static_cast<double>(values.size());
  for (double v : values) r.std += (v - r.mean) * (v - r.mean);
  r.std = std::sqrt(r.std / static_cast<double>(values.size()));
  return r;
}

std::string stats_to_json(const CdfStats& s, const std::optional<ReflectanceStats>& refl) {
  nlohmann::ordered_json j;
  j["count"] = s.count;
  j["total"] = s.total;
  j["return_fraction"] = s.return_fraction;
  j["mean"] = s.mean;
  j["std"] = s.std;
  j["min"] = s.min;
  j["max"] = s.max;
  j["span"] = s.span;
  if (refl)
    j["reflectance"] = {{"count", refl->count}, {"mean", refl->mean}, {"std", refl->std},
                        {"min", refl->min},     {"max", refl->max}};
  return j.dump(2) + "\n";
}

std::string cdf_to_svg(std::span<const StepCurve> curves, std::string_view title) {
  constexpr double W = 640, H = 400, M = 40;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& c : curves)
    for (const auto& j : c.jumps()) {
      lo = std::min(lo, j.x);
      hi = std::max(hi, j.x);
    }
  if (!std::isfinite(lo)) lo = 0, hi = 1;
  if (hi - lo < 1e-9) lo -= 0.5, hi += 0.5;
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  auto px = [&](double x) { return M + (x - lo) / (hi - lo) * (W - 2 * M); };
  auto py = [&](double f) { return H - M - f * (H - 2 * M); };
  static constexpr const char* kColors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728"};

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\">\n";
  svg += "<text x=\"40\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" +
         std::string(title) + "</text>\n";
  svg += "<rect x=\"40\" y=\"40\" width=\"560\" height=\"320\" fill=\"none\" stroke=\"#888\"/>\n";
  for (std::size_t c = 0; c < curves.size(); ++c) {
    std::string d = "M" + io::format_double(px(lo)) + "," + io::format_double(py(0));
    for (const auto& j : curves[c].jumps()) {
      d += " H" + io::format_double(px(j.x));
      d += " V" + io::format_double(py(j.after));
    }
    d += " H" + io::format_double(px(hi));
    svg += "<path fill=\"none\" stroke=\"" + std::string(kColors[c % 4]) + "\" d=\"" + d +
           "\"/>\n";
  }
  svg += "<text x=\"40\" y=\"380\" font-size=\"11\">" + io::format_double(lo) +
         " m</text><text x=\"560\" y=\"380\" font-size=\"11\">" + io::format_double(hi) +
         " m</text>\n</svg>\n";
  return svg;
}

}  // namespace mret
