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

#include "mret/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "mret/errors.hpp"
#include "mret/io.hpp"

namespace mret {

namespace {

double normal_pdf(double z) noexcept {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double z) noexcept { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

}  // namespace

GaussianMixture::GaussianMixture(std::vector<GaussianComponent> components)
    : components_(std::move(components)) {
  if (components_.empty()) throw DataError(DataErrorKind::fit, "mixture needs a component");
  double total = 0.0;
  for (std::size_t l = 0; l < components_.size(); ++l) {
    const auto& c = components_[l];
    if (!(c.weight > 0.0) || !std::isfinite(c.weight))
      throw DataError(DataErrorKind::fit, "mixture weights must be positive");
    if (!(c.sigma > 0.0) || !std::isfinite(c.sigma))
      throw DataError(DataErrorKind::fit, "mixture sigmas must be positive");
    if (!std::isfinite(c.mean)) throw DataError(DataErrorKind::fit, "mixture mean not finite");
    if (l > 0 && !(c.mean > components_[l - 1].mean))
      throw DataError(DataErrorKind::fit, "mixture means must strictly increase");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw DataError(DataErrorKind::fit, "mixture weights must sum to one");
}

double GaussianMixture::pdf(double x) const noexcept {
  double f = 0.0;
  for (const auto& c : components_) f += c.weight * normal_pdf((x - c.mean) / c.sigma) / c.sigma;
  return f;
}

double GaussianMixture::cdf(double x) const noexcept {
  double F = 0.0;
  for (const auto& c : components_) F += c.weight * normal_cdf((x - c.mean) / c.sigma);
  return std::min(F, 1.0);
}

SampleClusters segment_by_thresholds(const EmpiricalCdf& cdf, std::span<const double> thresholds) {
  const auto samples = cdf.samples();
  if (samples.empty()) throw DataError(DataErrorKind::no_data, "CDF has no finite samples");
  const double n = static_cast<double>(cdf.total_count());
  const double top = cdf.return_fraction();
  for (std::size_t t = 0; t < thresholds.size(); ++t) {
    if (!(thresholds[t] > 0.0) || !(thresholds[t] < top))
      throw DataError(DataErrorKind::infeasible_threshold,
                      "threshold " + io::format_double(thresholds[t]) +
                          " outside (0, return fraction " + io::format_double(top) + ")");
    if (t > 0 && !(thresholds[t] > thresholds[t - 1]))
      throw DataError(DataErrorKind::infeasible_threshold, "thresholds must strictly ascend");
  }
  SampleClusters clusters;
  std::size_t begin = 0;
  std::size_t s = 0;
  for (double t : thresholds) {
    // Sample s carries cumulative fraction (s+1)/N.
    while (s < samples.size() && !(static_cast<double>(s + 1) / n > t)) ++s;
    clusters.emplace_back(samples.begin() + static_cast<std::ptrdiff_t>(begin),
                          samples.begin() + static_cast<std::ptrdiff_t>(s));
    begin = s;
  }
  clusters.emplace_back(samples.begin() + static_cast<std::ptrdiff_t>(begin), samples.end());
  return clusters;
}

std::vector<double> auto_segment(const EmpiricalCdf& cdf, double min_gap) {
  if (!(min_gap > 0.0)) throw std::invalid_argument("min_gap must be positive");
  const auto samples = cdf.samples();
  const double n = static_cast<double>(cdf.total_count());
  std::vector<double> thresholds;
  for (std::size_t s = 0; s + 1 < samples.size(); ++s)
    if (samples[s + 1] - samples[s] > min_gap)
      thresholds.push_back(static_cast<double>(s + 1) / n);
  return thresholds;
}

GaussianMixture fit_gmm(const SampleClusters& clusters, double sigma_floor) {
  if (!(sigma_floor > 0.0)) throw std::invalid_argument("sigma_floor must be positive");
  if (clusters.empty()) throw DataError(DataErrorKind::fit, "no clusters to fit");
  std::size_t total = 0;
  for (std::size_t l = 0; l < clusters.size(); ++l) {
    if (clusters[l].empty())
      throw DataError(DataErrorKind::fit, "cluster " + std::to_string(l) + " is empty");
    total += clusters[l].size();
  }
  std::vector<GaussianComponent> comps;
  comps.reserve(clusters.size());
  for (const auto& c : clusters) {
    // Sorting first makes the moments independent of input order.
    std::vector<double> v(c);
    std::sort(v.begin(), v.end());
    double sum = 0.0;
    for (double x : v) sum += x;
    const double mean = sum / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sigma = std::sqrt(ss / static_cast<double>(v.size()));
    comps.push_back({static_cast<double>(v.size()) / static_cast<double>(total), mean,
                     std::max(sigma, sigma_floor)});
  }
  return GaussianMixture(std::move(comps));
}

double model_fit_error(const GaussianMixture& g, const EmpiricalCdf& cdf) {
  if (cdf.sample_count() == 0) throw DataError(DataErrorKind::no_data, "CDF has no samples");
  const double rf = cdf.return_fraction();
  double worst = 0.0;
  const auto curve = cdf.curve();
  for (const auto& j : curve.jumps()) {
    const double model = g.cdf(j.x) * rf;
    worst = std::max({worst, std::abs(model - j.after), std::abs(model - j.before)});
  }
  return worst;
}

std::string gmm_to_json(const GaussianMixture& g) {
  nlohmann::ordered_json j;
  j["clusters"] = nlohmann::ordered_json::array();
  for (const auto& c : g.components())
    j["clusters"].push_back({{"alpha", c.weight}, {"mu", c.mean}, {"sigma", c.sigma}});
  return j.dump(2) + "\n";
}

GaussianMixture gmm_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("GMM JSON: ") + e.what());
  }
  if (!j.contains("clusters") || !j["clusters"].is_array())
    throw ParseError(0, "GMM JSON needs a clusters array");
  std::vector<GaussianComponent> comps;
  for (const auto& c : j["clusters"]) {
    try {
      comps.push_back(
          {c.at("alpha").get<double>(), c.at("mu").get<double>(), c.at("sigma").get<double>()});
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(0, std::string("GMM cluster: ") + e.what());
    }
  }
  return GaussianMixture(std::move(comps));
}

std::string fit_report_csv(const GaussianMixture& g, const SampleClusters& clusters) {
  if (clusters.size() != g.size())
    throw std::invalid_argument("cluster count does not match mixture size");
  std::string out = "cluster,count,alpha,mu,sigma,min,max\n";
  for (std::size_t l = 0; l < clusters.size(); ++l) {
    const auto& c = g.components()[l];
    const auto [lo, hi] = std::minmax_element(clusters[l].begin(), clusters[l].end());
    out += std::to_string(l) + ',' + std::to_string(clusters[l].size()) + ',' +
           io::format_double(c.weight) + ',' + io::format_double(c.mean) + ',' +
           io::format_double(c.sigma) + ',' + io::format_double(*lo) + ',' +
           io::format_double(*hi) + '\n';
  }
  return out;
}

}  // namespace mret
