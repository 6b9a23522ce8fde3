// Copyright 2026 The embstab Authors
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

#ifndef EMBSTAB_STATS_H_
#define EMBSTAB_STATS_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace embstab {

/// Ordinary least squares with an automatic intercept, reported first as
/// "Constant".
struct RegressionFit {
  std::vector<std::string> feature_names;
  std::vector<double> coefficients;
  std::vector<double> std_errors;
  std::vector<double> t_values;
  /// Two-sided, Student-t with n - p - 1 degrees of freedom.
  std::vector<double> p_values;
  std::vector<double> residuals;
  double r2 = 0.0;
  double adjusted_r2 = 0.0;
  double ss_residual = 0.0;
  double ss_total = 0.0;
  std::size_t n_observations = 0;
  std::size_t degrees_of_freedom = 0;
};

/// Fits `response` on the given feature columns (each of length n) using a
/// column-pivoted Householder QR. Throws `kInvalidArgument` unless
/// n > p + 1 and all values are finite, `kCollinearity` (naming columns)
/// when the reciprocal condition number of the design is below 1e-12, and
/// `kZeroVariance` for a constant response.
RegressionFit Ols(std::vector<std::vector<double>> const& columns,
                  std::span<double const> response,
                  std::vector<std::string> const& names);

/// 1 - (1 - r2)(n - 1)/(n - p - 1).
double AdjustedR2(double r2, std::size_t n, std::size_t p);

/// "***" for p < 0.01, "**" for p < 0.05, "*" for p < 0.1, else "".
std::string SignificanceStars(double p_value);

/// Feature / Coefficient / Std. Error table with stars, followed by
/// Observations, R² and Adjusted R² rows.
std::string FormatRegressionTable(RegressionFit const& fit,
                                  std::string const& title);

/// Column standardized to mean 0, sample sd 1 (a constant column is
/// returned centered).
std::vector<double> ZScore(std::span<double const> values);

struct Correlation {
  double pearson = 0.0;
  double spearman = 0.0;
};

/// Throws `kInvalidArgument` for n < 3 or non-finite input and
/// `kZeroVariance` if either series is constant.
Correlation Correlations(std::span<double const> x, std::span<double const> y);

/// Ranks starting at 1, ties receiving their average rank.
std::vector<double> AverageRanks(std::span<double const> values);

/// p-value of a correlation coefficient r over n pairs via
/// t = r·sqrt((n-2)/(1-r²)). `one_sided_negative` tests H1: rho < 0.
double CorrelationPValue(double r, std::size_t n, bool one_sided_negative);

/// Student-t tail probability P(T > t) with `dof` degrees of freedom.
double StudentTUpperTail(double t, double dof);

struct PairedTest {
  double mean_difference = 0.0;
  double t = 0.0;
  /// One-sided, H1: mean(a - b) > 0.
  double p_value = 1.0;
};

PairedTest PairedGreater(std::span<double const> a, std::span<double const> b);

struct Summary {
  double mean = 0.0;
  /// Sample (n - 1) standard deviation; 0 for a single value.
  double sd = 0.0;
};

/// Throws `kInvalidArgument` for empty input.
Summary Summarize(std::span<double const> values);

}  // namespace embstab

#endif  // EMBSTAB_STATS_H_
