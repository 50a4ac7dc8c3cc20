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

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mret/ecdf.hpp"
#include "mret/frames.hpp"

namespace mret {

struct PatchCost {
  double cost = 0.0;            ///< mean squared range difference, m^2
  std::size_t valid_pairs = 0;  ///< pairs where both cells returned
};

struct PatchMatch {
  std::size_t frame = 0;
  std::ptrdiff_t d_row = 0;
  std::ptrdiff_t d_col = 0;
  double cost = 0.0;
  std::size_t valid_pairs = 0;
  RaypathId matched{};  ///< the optimal pixel, columns wrapped

  friend bool operator==(const PatchMatch&, const PatchMatch&) = default;
};

struct MatchOptions {
  std::size_t radius = 2;
  NeighborhoodSpec patch{2, 2};
  /// Fewer valid pairs than this makes a candidate incomparable. Clamped to
  /// the patch size so 1x1 patches remain usable.
  std::size_t min_valid_pairs = 6;
};

/// Mean squared difference between the patch around `a_center` in `a` and the
/// patch around `b_center` in `b`. Pairs with a non-return on either side, or
/// with a row outside either image, are skipped.
PatchCost patch_distance(const RangeImage& a, RaypathId a_center, const RangeImage& b,
                         RaypathId b_center, NeighborhoodSpec patch,
                         std::size_t min_valid_pairs = 6);

/// Cost of `candidate` in frame k against `anchor` in frame 0.
/// Throws DataError(incomparable_patch) below the minimum pair count.
PatchCost patch_cost(const FrameSequence& seq, RaypathId candidate, RaypathId anchor,
                     std::size_t k, NeighborhoodSpec patch, std::size_t min_valid_pairs = 6);

/// Argmin of patch_cost over the (2r+1)^2 offsets around the anchor. Ties go to
/// the smallest Chebyshev offset, then row-major (d_row, d_col).
PatchMatch best_match(const FrameSequence& seq, RaypathId anchor, std::size_t k,
                      const MatchOptions& options = {});

struct Compensation {
  EmpiricalCdf cdf;
  std::vector<std::optional<PatchMatch>> trace;  ///< nullopt where no match existed
};

/// Motion-compensated temporal CDF plus the per-frame match trace.
/// OpenMP-parallel across frames.
Compensation compensate(const FrameSequence& seq, RaypathId anchor,
                        const MatchOptions& options = {});

inline EmpiricalCdf compensated_temporal_cdf(const FrameSequence& seq, RaypathId anchor,
                                             const MatchOptions& options = {}) {
  return compensate(seq, anchor, options).cdf;
}

/// CSV `k,dp,dq,J,valid_pairs`; unmatched frames print empty fields.
std::string match_trace_csv(const std::vector<std::optional<PatchMatch>>& trace);

}  // namespace mret
