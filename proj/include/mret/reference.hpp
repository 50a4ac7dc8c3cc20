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

// Single-threaded versions of the parallel kernels. They share no loop code
// with the OpenMP paths and exist so tests and benchmarks can compare them.

#include <optional>
#include <vector>

#include "mret/beamsim.hpp"
#include "mret/ecdf.hpp"
#include "mret/mocomp.hpp"
#include "mret/monitor.hpp"
#include "mret/regimpact.hpp"

namespace mret::reference {

std::vector<MonitorVerdict> scan_frame(const RangeImage& image, const MonitorConfig& cfg);

Simulation simulate_sequence(const Scene& scene, const BeamSpec& spec, std::size_t frames);

/// Exhaustive search over the window using patch_cost, ranking candidates
/// by (cost, Chebyshev offset, row-major offset).
Compensation compensate(const FrameSequence& seq, RaypathId anchor,
                        const MatchOptions& options = {});

std::vector<std::optional<CdfStats>> temporal_stats_map(const FrameSequence& seq);

std::vector<RegistrationResult> run_trials(const RegistrationConfig& cfg, Algorithm algo,
                                           std::size_t trials);

}  // namespace mret::reference
