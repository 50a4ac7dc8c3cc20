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

#include "mret/reference.hpp"

#include <cstdlib>
#include <stdexcept>
#include <tuple>

#include "mret/errors.hpp"

namespace mret::reference {

std::vector<MonitorVerdict> scan_frame(const RangeImage& image, const MonitorConfig& cfg) {
  cfg.validate();
  std::vector<MonitorVerdict> out;
  out.reserve(image.cells().size());
  for (std::size_t i = 0; i < image.rows(); ++i)
    for (std::size_t j = 0; j < image.cols(); ++j) out.push_back(classify_raypath(image, {i, j}, cfg));
  return out;
}

Simulation simulate_sequence(const Scene& scene, const BeamSpec& spec, std::size_t frames) {
  spec.validate();
  if (frames == 0) throw std::invalid_argument("simulate_sequence needs K >= 1");
  std::vector<RangeImage> images;
  for (std::size_t k = 0; k < frames; ++k) {
    std::vector<Return> cells;
    for (std::size_t i = 0; i < spec.rows; ++i)
      for (std::size_t j = 0; j < spec.cols; ++j) {
        auto rng = pulse_stream(scene.seed, {i, j}, k);
        cells.push_back(fire_pulse(scene, beam_axis(spec, {i, j}), spec, rng).ret);
      }
    images.emplace_back(spec.rows, spec.cols, spec.calibration, std::move(cells));
  }
  Mask labels{spec.rows, spec.cols, {}};
  for (std::size_t i = 0; i < spec.rows; ++i)
    for (std::size_t j = 0; j < spec.cols; ++j)
      labels.cells.push_back(multi_surface_label(scene, beam_axis(spec, {i, j}), spec) ? 1 : 0);
  return {FrameSequence(std::move(images), spec.rate_hz), std::move(labels)};
}

Compensation compensate(const FrameSequence& seq, RaypathId anchor, const MatchOptions& options) {
  if (!seq.contains(anchor)) throw std::out_of_range("anchor out of range");
  const auto r = static_cast<std::ptrdiff_t>(options.radius);
  std::vector<std::optional<PatchMatch>> trace(seq.size());
  std::vector<double> samples;
  for (std::size_t k = 0; k < seq.size(); ++k) {
    std::optional<PatchMatch> best;
    std::tuple<double, std::ptrdiff_t, std::ptrdiff_t, std::ptrdiff_t> best_key{};
    for (std::ptrdiff_t dp = (k == 0 ? 0 : -r); dp <= (k == 0 ? 0 : r); ++dp)
      for (std::ptrdiff_t dq = (k == 0 ? 0 : -r); dq <= (k == 0 ? 0 : r); ++dq) {
        const auto row = static_cast<std::ptrdiff_t>(anchor.row) + dp;
        if (row < 0 || row >= static_cast<std::ptrdiff_t>(seq.rows())) continue;
        const RaypathId cand{static_cast<std::size_t>(row),
                             seq.frame(k).wrap_col(static_cast<std::ptrdiff_t>(anchor.col) + dq)};
        PatchCost c;
        try {
          c = patch_cost(seq, cand, anchor, k, options.patch,
                         k == 0 ? 1 : options.min_valid_pairs);
        } catch (const DataError&) {
          continue;
        }
        const std::tuple key{c.cost, std::max(std::abs(dp), std::abs(dq)), dp, dq};
        if (!best || key < best_key) {
          best_key = key;
          best = PatchMatch{k, dp, dq, c.cost, c.valid_pairs, cand};
        }
      }
    if (best) {
      const auto& cell = seq.frame(k).at(best->matched);
      if (cell.has_range()) samples.push_back(cell.range);
    }
    trace[k] = best;
  }
  return {EmpiricalCdf(std::move(samples), seq.size(), {CdfSource::Kind::compensated, anchor, 0}),
          std::move(trace)};
}

std::vector<std::optional<CdfStats>> temporal_stats_map(const FrameSequence& seq) {
  std::vector<std::optional<CdfStats>> out;
  for (std::size_t i = 0; i < seq.rows(); ++i)
    for (std::size_t j = 0; j < seq.cols(); ++j) {
      const auto cdf = temporal_cdf(seq, {i, j});
      out.push_back(cdf.sample_count() > 0 ? std::optional(cdf_stats(cdf)) : std::nullopt);
    }
  return out;
}

std::vector<RegistrationResult> run_trials(const RegistrationConfig& cfg, Algorithm algo,
                                           std::size_t trials) {
  std::vector<RegistrationResult> out;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto ex = make_experiment(cfg, t);
    out.push_back(algo == Algorithm::icp ? run_icp(ex.current, ex.reference, cfg.icp, ex.truth)
                                         : run_ndt_lite(ex.current, ex.reference, cfg.ndt, ex.truth));
  }
  return out;
}

}  // namespace mret::reference
