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

#include "mret/monitor.hpp"

#include <cmath>
#include <stdexcept>

#include "mret/ecdf.hpp"
#include "mret/errors.hpp"
#include "mret/io.hpp"

namespace mret {

void MonitorConfig::validate() const {
  if (!(span_threshold > 0.0)) throw std::invalid_argument("span_threshold must be positive");
  if (!(min_gap > 0.0)) throw std::invalid_argument("min_gap must be positive");
  if (min_cluster_count < 2) throw std::invalid_argument("min_cluster_count must be >= 2");
  if (!(max_nonreturn_fraction >= 0.0 && max_nonreturn_fraction <= 1.0))
    throw std::invalid_argument("max_nonreturn_fraction must lie in [0, 1]");
}

std::string_view to_string(Reason reason) noexcept {
  switch (reason) {
    case Reason::span: return "SPAN";
    case Reason::clusters: return "CLUSTERS";
    case Reason::nonreturn: return "NONRETURN";
    case Reason::clear: return "CLEAR";
  }
  return "CLEAR";
}

MonitorVerdict classify_raypath(const RangeImage& image, RaypathId ray,
                                const MonitorConfig& cfg) {
  const auto cdf = spatial_cdf(image, ray, cfg.patch);
  MonitorVerdict v;
  v.ray = ray;
  v.nonreturn_fraction = 1.0 - cdf.return_fraction();
  if (cdf.sample_count() == 0) {
    v.flagged = true;
    v.reason = Reason::nonreturn;
    return v;
  }
  const auto s = cdf.samples();
  v.span = s.back() - s.front();
  v.cluster_count = auto_segment(cdf, cfg.min_gap).size() + 1;
  if (v.span > cfg.span_threshold)
    v.reason = Reason::span;
  else if (v.cluster_count >= cfg.min_cluster_count)
    v.reason = Reason::clusters;
  else if (v.nonreturn_fraction > cfg.max_nonreturn_fraction)
    v.reason = Reason::nonreturn;
  v.flagged = v.reason != Reason::clear;
  return v;
}

std::vector<MonitorVerdict> scan_frame(const RangeImage& image, const MonitorConfig& cfg) {
  cfg.validate();
  const std::size_t rows = image.rows();
  const std::size_t cols = image.cols();
  std::vector<MonitorVerdict> out(rows * cols);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(rows); ++i)
    for (std::size_t j = 0; j < cols; ++j)
      out[static_cast<std::size_t>(i) * cols + j] =
          classify_raypath(image, {static_cast<std::size_t>(i), j}, cfg);
  return out;
}

Mask to_mask(std::size_t rows, std::size_t cols, std::span<const MonitorVerdict> verdicts) {
  if (verdicts.size() != rows * cols)
    throw DataError(DataErrorKind::alignment, "verdict count does not match the mask shape");
  Mask m{rows, cols, std::vector<std::uint8_t>(rows * cols, 0)};
  for (std::size_t p = 0; p < verdicts.size(); ++p) m.cells[p] = verdicts[p].flagged ? 1 : 0;
  return m;
}

std::string mask_to_pgm(const Mask& mask) {
  std::string out = "P2\n" + std::to_string(mask.cols) + " " + std::to_string(mask.rows) + "\n1\n";
  for (std::size_t i = 0; i < mask.rows; ++i) {
    for (std::size_t j = 0; j < mask.cols; ++j) {
      if (j > 0) out += ' ';
      out += mask.cells[i * mask.cols + j] ? '1' : '0';
    }
    out += '\n';
  }
  return out;
}

Mask parse_mask_pgm(std::string_view text) {
  std::vector<std::string_view> tokens;
  std::size_t line_no = 0;
  for (auto line : io::lines(text)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    for (auto t : io::split(line, ' '))
      if (!io::trim(t).empty()) tokens.push_back(io::trim(t));
  }
  if (tokens.size() < 4 || tokens[0] != "P2") throw ParseError(1, "mask must be a P2 PGM");
  double cols = 0, rows = 0, maxval = 0;
  if (!io::parse_double(tokens[1], cols) || !io::parse_double(tokens[2], rows) ||
      !io::parse_double(tokens[3], maxval) || cols < 1 || rows < 1 || maxval != 1)
    throw ParseError(0, "bad PGM mask header");
  Mask m{static_cast<std::size_t>(rows), static_cast<std::size_t>(cols), {}};
  if (tokens.size() - 4 != m.rows * m.cols)
    throw ParseError(0, "mask holds " + std::to_string(tokens.size() - 4) + " cells, expected " +
                            std::to_string(m.rows * m.cols));
  m.cells.reserve(m.rows * m.cols);
  for (std::size_t t = 4; t < tokens.size(); ++t) {
    if (tokens[t] != "0" && tokens[t] != "1") throw ParseError(0, "mask cells must be 0 or 1");
    m.cells.push_back(tokens[t] == "1" ? 1 : 0);
  }
  return m;
}

std::string verdicts_csv(std::span<const MonitorVerdict> verdicts) {
  std::string out = "i,j,flagged,reason,span,clusters,nonreturn_fraction\n";
  for (const auto& v : verdicts) {
    out += std::to_string(v.ray.row) + ',' + std::to_string(v.ray.col) + ',' +
           (v.flagged ? "1" : "0") + ',' + std::string(to_string(v.reason)) + ',' +
           io::format_double(v.span) + ',' + std::to_string(v.cluster_count) + ',' +
           io::format_double(v.nonreturn_fraction) + '\n';
  }
  return out;
}

namespace {

void finish(MonitorScore& s) {
  const auto flagged = s.true_positive + s.false_positive;
  const auto positives = s.true_positive + s.false_negative;
  s.precision = flagged == 0 ? 1.0 : static_cast<double>(s.true_positive) / flagged;
  s.recall = positives == 0 ? 1.0 : static_cast<double>(s.true_positive) / positives;
}

}  // namespace

MonitorScore& MonitorScore::operator+=(const MonitorScore& o) {
  true_positive += o.true_positive;
  false_positive += o.false_positive;
  false_negative += o.false_negative;
  true_negative += o.true_negative;
  finish(*this);
  return *this;
}

MonitorScore evaluate_monitor(std::span<const MonitorVerdict> verdicts,
                              std::span<const std::uint8_t> labels) {
  if (verdicts.size() != labels.size())
    throw DataError(DataErrorKind::alignment,
                    "verdicts (" + std::to_string(verdicts.size()) + ") and labels (" +
                        std::to_string(labels.size()) + ") are not aligned");
  MonitorScore s;
  for (std::size_t p = 0; p < verdicts.size(); ++p) {
    const bool flagged = verdicts[p].flagged;
    const bool positive = labels[p] != 0;
    if (flagged && positive) ++s.true_positive;
    else if (flagged) ++s.false_positive;
    else if (positive) ++s.false_negative;
    else ++s.true_negative;
  }
  finish(s);
  return s;
}

}  // namespace mret
