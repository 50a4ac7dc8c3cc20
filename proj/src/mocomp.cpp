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

#include "mret/mocomp.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

#include "mret/errors.hpp"
#include "mret/io.hpp"

namespace mret {

namespace {

std::size_t effective_min_pairs(NeighborhoodSpec patch, std::size_t min_valid_pairs) {
  return std::max<std::size_t>(1, std::min(min_valid_pairs, patch.cells()));
}

struct Offset {
  std::ptrdiff_t d_row;
  std::ptrdiff_t d_col;
};

/// Candidate offsets in tie-break order.
std::vector<Offset> search_order(std::size_t radius) {
  const auto r = static_cast<std::ptrdiff_t>(radius);
  std::vector<Offset> offsets;
  for (std::ptrdiff_t dp = -r; dp <= r; ++dp)
    for (std::ptrdiff_t dq = -r; dq <= r; ++dq) offsets.push_back({dp, dq});
  std::stable_sort(offsets.begin(), offsets.end(), [](const Offset& a, const Offset& b) {
    return std::max(std::abs(a.d_row), std::abs(a.d_col)) <
           std::max(std::abs(b.d_row), std::abs(b.d_col));
  });
  return offsets;
}

PatchCost raw_distance(const RangeImage& a, RaypathId a_center, const RangeImage& b,
                       RaypathId b_center, NeighborhoodSpec patch) {
  const auto hr = static_cast<std::ptrdiff_t>(patch.half_rows);
  const auto hc = static_cast<std::ptrdiff_t>(patch.half_cols);
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::ptrdiff_t m = -hr; m <= hr; ++m) {
    const auto ra = static_cast<std::ptrdiff_t>(a_center.row) + m;
    const auto rb = static_cast<std::ptrdiff_t>(b_center.row) + m;
    if (ra < 0 || rb < 0 || ra >= static_cast<std::ptrdiff_t>(a.rows()) ||
        rb >= static_cast<std::ptrdiff_t>(b.rows()))
      continue;
    for (std::ptrdiff_t n = -hc; n <= hc; ++n) {
      const double da = a.range_wrapped(static_cast<std::size_t>(ra),
                                        static_cast<std::ptrdiff_t>(a_center.col) + n);
      const double db = b.range_wrapped(static_cast<std::size_t>(rb),
                                        static_cast<std::ptrdiff_t>(b_center.col) + n);
      if (da < 0.0 || db < 0.0) continue;
      sum += (da - db) * (da - db);
      ++pairs;
    }
  }
  return {pairs == 0 ? 0.0 : sum / static_cast<double>(pairs), pairs};
}

std::optional<PatchMatch> try_match(const FrameSequence& seq, RaypathId anchor, std::size_t k,
                                    const MatchOptions& options,
                                    const std::vector<Offset>& order) {
  const auto& f0 = seq.frame(0);
  if (k == 0) {
    const auto self = raw_distance(f0, anchor, f0, anchor, options.patch);
    if (self.valid_pairs == 0) return std::nullopt;
    return PatchMatch{0, 0, 0, 0.0, self.valid_pairs, anchor};
  }
  const auto& fk = seq.frame(k);
  const auto min_pairs = effective_min_pairs(options.patch, options.min_valid_pairs);
  std::optional<PatchMatch> best;
  for (const auto& off : order) {
    const auto row = static_cast<std::ptrdiff_t>(anchor.row) + off.d_row;
    if (row < 0 || row >= static_cast<std::ptrdiff_t>(fk.rows())) continue;
    const RaypathId cand{static_cast<std::size_t>(row),
                         fk.wrap_col(static_cast<std::ptrdiff_t>(anchor.col) + off.d_col)};
    const auto c = raw_distance(fk, cand, f0, anchor, options.patch);
    if (c.valid_pairs < min_pairs) continue;
    if (!best || c.cost < best->cost)
      best = PatchMatch{k, off.d_row, off.d_col, c.cost, c.valid_pairs, cand};
  }
  return best;
}

}  // namespace

PatchCost patch_distance(const RangeImage& a, RaypathId a_center, const RangeImage& b,
                         RaypathId b_center, NeighborhoodSpec patch,
                         std::size_t min_valid_pairs) {
  if (!a.contains(a_center) || !b.contains(b_center))
    throw std::out_of_range("patch center out of range");
  const auto c = raw_distance(a, a_center, b, b_center, patch);
  if (c.valid_pairs == 0 || c.valid_pairs < min_valid_pairs)
    throw DataError(DataErrorKind::incomparable_patch,
                    "patches share only " + std::to_string(c.valid_pairs) + " comparable pairs");
  return c;
}

PatchCost patch_cost(const FrameSequence& seq, RaypathId candidate, RaypathId anchor,
                     std::size_t k, NeighborhoodSpec patch, std::size_t min_valid_pairs) {
  return patch_distance(seq.frame(k), candidate, seq.frame(0), anchor, patch,
                        effective_min_pairs(patch, min_valid_pairs));
}

PatchMatch best_match(const FrameSequence& seq, RaypathId anchor, std::size_t k,
                      const MatchOptions& options) {
  if (!seq.contains(anchor)) throw std::out_of_range("anchor out of range");
  if (k >= seq.size()) throw std::out_of_range("frame index out of range");
  auto m = try_match(seq, anchor, k, options, search_order(options.radius));
  if (!m)
    throw DataError(DataErrorKind::no_match,
                    "no comparable candidate patch in frame " + std::to_string(k));
  return *m;
}

Compensation compensate(const FrameSequence& seq, RaypathId anchor,
                        const MatchOptions& options) {
  if (!seq.contains(anchor)) throw std::out_of_range("anchor out of range");
  const auto order = search_order(options.radius);
  const auto frames = static_cast<std::ptrdiff_t>(seq.size());
  std::vector<std::optional<PatchMatch>> trace(seq.size());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t k = 0; k < frames; ++k) {
    trace[static_cast<std::size_t>(k)] =
        try_match(seq, anchor, static_cast<std::size_t>(k), options, order);
  }
  std::vector<double> samples;
  for (std::size_t k = 0; k < trace.size(); ++k) {
    if (!trace[k]) continue;
    const auto& cell = seq.frame(k).at(trace[k]->matched);
    if (cell.has_range()) samples.push_back(cell.range);
  }
  return {EmpiricalCdf(std::move(samples), seq.size(), {CdfSource::Kind::compensated, anchor, 0}),
          std::move(trace)};
}

std::string match_trace_csv(const std::vector<std::optional<PatchMatch>>& trace) {
  std::string out = "k,dp,dq,J,valid_pairs\n";
  for (std::size_t k = 0; k < trace.size(); ++k) {
    out += std::to_string(k);
    if (trace[k]) {
      const auto& m = *trace[k];
      out += ',' + std::to_string(m.d_row) + ',' + std::to_string(m.d_col) + ',' +
             io::format_double(m.cost) + ',' + std::to_string(m.valid_pairs);
    } else {
      out += ",,,,";
    }
    out += '\n';
  }
  return out;
}

}  // namespace mret
