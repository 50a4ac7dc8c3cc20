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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mret/ecdf.hpp"

namespace mret {

/// Floor applied to per-cluster standard deviations (singleton clusters).
inline constexpr double kDefaultSigmaFloor = 0.005;
/// Default range gap that separates clusters in auto_segment.
inline constexpr double kDefaultMinGap = 0.3;

struct GaussianComponent {
  double weight = 0.0;
  double mean = 0.0;
  double sigma = 0.0;

  friend bool operator==(const GaussianComponent&, const GaussianComponent&) = default;
};

/// Weights positive and summing to one, sigmas positive, means strictly
/// increasing. The constructor enforces all of it (DataError(fit)).
class GaussianMixture {
 public:
  explicit GaussianMixture(std::vector<GaussianComponent> components);

  std::span<const GaussianComponent> components() const noexcept { return components_; }
  std::size_t size() const noexcept { return components_.size(); }

  double pdf(double x) const noexcept;
  double cdf(double x) const noexcept;

 private:
  std::vector<GaussianComponent> components_;
};

using SampleClusters = std::vector<std::vector<double>>;

/// Splits the sorted finite samples wherever the cumulative fraction first
/// exceeds each threshold. Thresholds must be strictly ascending in
/// (0, return_fraction); otherwise DataError(infeasible_threshold).
SampleClusters segment_by_thresholds(const EmpiricalCdf& cdf, std::span<const double> thresholds);

/// One threshold per gap wider than `min_gap` between consecutive samples,
/// placed at the cumulative fraction of the lower sample.
std::vector<double> auto_segment(const EmpiricalCdf& cdf, double min_gap = kDefaultMinGap);

/// Weight = share of samples, mean/sigma = population moments, sigma floored.
GaussianMixture fit_gmm(const SampleClusters& clusters, double sigma_floor = kDefaultSigmaFloor);

inline double gmm_pdf(const GaussianMixture& g, double x) noexcept { return g.pdf(x); }
inline double gmm_cdf(const GaussianMixture& g, double x) noexcept { return g.cdf(x); }

/// Max over both sides of every empirical jump of
/// |gmm_cdf(x) * return_fraction - F(x)|.
double model_fit_error(const GaussianMixture& g, const EmpiricalCdf& cdf);

/// `{"clusters":[{"alpha":..,"mu":..,"sigma":..},...]}`
std::string gmm_to_json(const GaussianMixture& g);
GaussianMixture gmm_from_json(std::string_view text);

/// `cluster,count,alpha,mu,sigma,min,max`
std::string fit_report_csv(const GaussianMixture& g, const SampleClusters& clusters);

}  // namespace mret
