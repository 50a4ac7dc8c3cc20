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

#include <cmath>
#include <map>
#include <string>

#include "mret/errors.hpp"
#include "mret/frames.hpp"
#include "mret/io.hpp"

namespace mret {

namespace {

struct RifHeader {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t frames = 0;
  double rate_hz = 0.0;
  Calibration calibration;
};

constexpr const char* kKeys[] = {"rows",      "cols",     "frames",   "rate_hz",
                                 "elev_start", "elev_step", "az_start", "az_step"};

RifHeader parse_header(std::string_view line) {
  auto tokens = io::split(io::trim(line), ' ');
  if (tokens.empty() || tokens.front() != "RIF1")
    throw ParseError(1, "document must begin with a RIF1 header");
  std::map<std::string, double, std::less<>> values;
  for (std::size_t t = 1; t < tokens.size(); ++t) {
    if (tokens[t].empty()) continue;
    const auto eq = tokens[t].find('=');
    if (eq == std::string_view::npos)
      throw ParseError(1, "malformed header field '" + std::string(tokens[t]) + "'");
    const auto key = tokens[t].substr(0, eq);
    double v = 0;
    if (!io::parse_double(tokens[t].substr(eq + 1), v) || !std::isfinite(v))
      throw ParseError(1, "bad value for header field '" + std::string(key) + "'");
    if (!values.emplace(std::string(key), v).second)
      throw ParseError(1, "duplicate header field '" + std::string(key) + "'");
  }
  for (const char* k : kKeys)
    if (!values.contains(k)) throw ParseError(1, std::string("missing header field '") + k + "'");
  if (values.size() != std::size(kKeys)) throw ParseError(1, "unknown header field");

  auto count = [&](const char* key) {
    const double v = values.at(key);
    if (v < 1 || v != std::floor(v))
      throw ParseError(1, std::string("header field '") + key + "' must be a positive integer");
    return static_cast<std::size_t>(v);
  };
  RifHeader h;
  h.rows = count("rows");
  h.cols = count("cols");
  h.frames = count("frames");
  h.rate_hz = values.at("rate_hz");
  if (h.rate_hz <= 0) throw ParseError(1, "rate_hz must be positive");
  h.calibration = {values.at("elev_start"), values.at("elev_step"), values.at("az_start"),
                   values.at("az_step")};
  return h;
}

/// Reads the K*R data rows. `-1` becomes `sentinel_value` (nullopt).
std::vector<std::vector<std::optional<double>>> parse_grid(std::string_view text,
                                                           RifHeader& header) {
  const auto all = io::lines(text);
  if (all.empty()) throw ParseError(1, "empty document");
  header = parse_header(all.front());

  const std::size_t expected_rows = header.frames * header.rows;
  std::vector<std::vector<std::optional<double>>> grid;
  grid.reserve(expected_rows);
  std::size_t line_no = 1;
  for (std::size_t l = 1; l < all.size(); ++l) {
    line_no = l + 1;
    const auto line = io::trim(all[l]);
    if (line.empty()) continue;
    if (grid.size() == expected_rows)
      throw ParseError(line_no, "more data rows than declared by the header");
    const auto fields = io::split(line, ',');
    if (fields.size() != header.cols)
      throw ParseError(line_no, "expected " + std::to_string(header.cols) + " values, found " +
                                    std::to_string(fields.size()));
    std::vector<std::optional<double>> row;
    row.reserve(header.cols);
    for (const auto& f : fields) {
      double v = 0;
      if (!io::parse_double(f, v) || !std::isfinite(v))
        throw ParseError(line_no, "invalid number '" + std::string(io::trim(f)) + "'");
      if (v == kNoReturn) {
        row.emplace_back(std::nullopt);
      } else if (v < 0) {
        throw ParseError(line_no, "negative value '" + std::string(io::trim(f)) +
                                      "' (only -1 is allowed, meaning no return)");
      } else {
        row.emplace_back(v);
      }
    }
    grid.push_back(std::move(row));
  }
  if (grid.size() != expected_rows)
    throw ParseError(line_no + 1, "expected " + std::to_string(expected_rows) +
                                      " data rows, found " + std::to_string(grid.size()));
  return grid;
}

std::string header_line(const FrameSequence& seq) {
  const auto& cal = seq.calibration();
  std::string h = "RIF1 rows=" + std::to_string(seq.rows()) + " cols=" + std::to_string(seq.cols()) +
                  " frames=" + std::to_string(seq.size()) +
                  " rate_hz=" + io::format_double(seq.rate_hz()) +
                  " elev_start=" + io::format_double(cal.elev_start) +
                  " elev_step=" + io::format_double(cal.elev_step) +
                  " az_start=" + io::format_double(cal.az_start) +
                  " az_step=" + io::format_double(cal.az_step);
  h += '\n';
  return h;
}

template <typename CellValue>
std::string write_grid(const FrameSequence& seq, CellValue value) {
  std::string out = header_line(seq);
  for (std::size_t k = 0; k < seq.size(); ++k) {
    if (k > 0) out += '\n';
    const auto& f = seq.frame(k);
    for (std::size_t i = 0; i < f.rows(); ++i) {
      for (std::size_t j = 0; j < f.cols(); ++j) {
        if (j > 0) out += ',';
        const std::optional<double> v = value(f.at(i, j));
        out += v ? io::format_double(*v) : std::string("-1");
      }
      out += '\n';
    }
  }
  return out;
}

}  // namespace

FrameSequence parse_frames(std::string_view ranges, std::optional<std::string_view> reflectance) {
  RifHeader header;
  const auto range_grid = parse_grid(ranges, header);

  std::vector<std::vector<std::optional<double>>> refl_grid;
  if (reflectance) {
    RifHeader rh;
    refl_grid = parse_grid(*reflectance, rh);
    if (rh.rows != header.rows || rh.cols != header.cols || rh.frames != header.frames ||
        !(rh.calibration == header.calibration))
      throw ParseError(1, "reflectance sidecar shape does not match the range document");
  }

  std::vector<RangeImage> frames;
  frames.reserve(header.frames);
  for (std::size_t k = 0; k < header.frames; ++k) {
    std::vector<Return> cells;
    cells.reserve(header.rows * header.cols);
    for (std::size_t i = 0; i < header.rows; ++i) {
      const std::size_t r = k * header.rows + i;
      for (std::size_t j = 0; j < header.cols; ++j) {
        Return cell;
        if (range_grid[r][j]) cell.range = *range_grid[r][j];
        if (reflectance) cell.reflectance = refl_grid[r][j];
        cells.push_back(cell);
      }
    }
    try {
      frames.emplace_back(header.rows, header.cols, header.calibration, std::move(cells));
    } catch (const std::invalid_argument& e) {
      throw ParseError(1, e.what());
    }
  }
  return FrameSequence(std::move(frames), header.rate_hz);
}

std::string write_frames(const FrameSequence& seq) {
  return write_grid(seq, [](const Return& r) -> std::optional<double> {
    if (!r.has_range()) return std::nullopt;
    return r.range;
  });
}

std::optional<std::string> write_reflectance(const FrameSequence& seq) {
  if (!seq.has_reflectance()) return std::nullopt;
  return write_grid(seq, [](const Return& r) { return r.reflectance; });
}

FrameSequence read_frames_file(const std::filesystem::path& ranges,
                               const std::optional<std::filesystem::path>& reflectance) {
  const auto text = io::read_file(ranges);
  if (!reflectance) return parse_frames(text);
  const auto refl = io::read_file(*reflectance);
  return parse_frames(text, std::string_view(refl));
}

}  // namespace mret
