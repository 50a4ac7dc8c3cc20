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

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "mret/frames.hpp"
#include "mret/rng.hpp"

namespace mret::test {

inline RangeImage image_of(std::size_t rows, std::size_t cols, const std::vector<double>& ranges,
                           Calibration cal = {}) {
  std::vector<Return> cells;
  cells.reserve(ranges.size());
  for (double r : ranges) cells.push_back({r, std::nullopt});
  return RangeImage(rows, cols, cal, std::move(cells));
}

inline FrameSequence sequence_of(std::vector<RangeImage> frames, double rate_hz = 10.0) {
  return FrameSequence(std::move(frames), rate_hz);
}

/// Uniform ranges in [lo, hi) with NO_RETURN at probability `p_none`.
inline RangeImage random_image(Rng& rng, std::size_t rows, std::size_t cols, double p_none,
                               double lo = 1.0, double hi = 50.0, bool reflectance = false,
                               Calibration cal = {}) {
  std::vector<Return> cells(rows * cols);
  for (auto& c : cells) {
    if (rng.bernoulli(p_none)) continue;
    c.range = rng.uniform(lo, hi);
    if (reflectance) c.reflectance = rng.uniform(0.0, 255.0);
  }
  return RangeImage(rows, cols, cal, std::move(cells));
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::atomic<unsigned> counter{0};
    const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
    path_ = std::filesystem::temp_directory_path() /
            ("mret-test-" + std::to_string(stamp) + "-" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace mret::test
