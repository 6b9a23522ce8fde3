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

#include "embstab/stats.h"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/special_functions/beta.hpp>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>

#include "embstab/error.h"

namespace embstab {
namespace {

void RequireFinite(std::span<double const> values, char const* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument,
                  std::string("non-finite value in ") + what);
    }
  }
}

double Mean(std::span<double const> v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double Pearson(std::span<double const> x, std::span<double const> y) {
  double mx = Mean(x);
  double my = Mean(y);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorCode::kZeroVariance, "correlation of a constant series");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace

double StudentTUpperTail(double t, double dof) {
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return t > 0 ? 0.0 : 1.0;
  // P(|T| > |t|) = I_{dof/(dof+t²)}(dof/2, 1/2).
  double two_sided = boost::math::ibeta(dof / 2.0, 0.5, dof / (dof + t * t));
  return t >= 0 ? two_sided / 2.0 : 1.0 - two_sided / 2.0;
}

double AdjustedR2(double r2, std::size_t n, std::size_t p) {
  return 1.0 - (1.0 - r2) * static_cast<double>(n - 1) /
                   static_cast<double>(n - p - 1);
}

RegressionFit Ols(std::vector<std::vector<double>> const& columns,
                  std::span<double const> response,
                  std::vector<std::string> const& names) {
  auto const n = response.size();
  auto const p = columns.size();
  if (names.size() != p) {
    throw Error(ErrorCode::kInvalidArgument,
                "got " + std::to_string(p) + " columns and " +
                    std::to_string(names.size()) + " names");
  }
  if (n <= p + 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "need more than " + std::to_string(p + 1) +
                    " observations, got " + std::to_string(n));
  }
  RequireFinite(response, "response");
  Eigen::MatrixXd x(n, p + 1);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x(i, 0) = 1.0;
    y(i) = response[i];
  }
  for (std::size_t j = 0; j < p; ++j) {
    if (columns[j].size() != n) {
      throw Error(ErrorCode::kInvalidArgument,
                  "column " + names[j] + " has " +
                      std::to_string(columns[j].size()) + " rows, expected " +
                      std::to_string(n));
    }
    RequireFinite(columns[j], names[j].c_str());
    for (std::size_t i = 0; i < n; ++i) x(i, j + 1) = columns[j][i];
  }
  std::vector<std::string> all_names{"Constant"};
  all_names.insert(all_names.end(), names.begin(), names.end());

  if (y.maxCoeff() == y.minCoeff()) {
    throw Error(ErrorCode::kZeroVariance, "response is constant");
  }
  double const mean_y = y.mean();
  double const ss_total = (y.array() - mean_y).square().sum();

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(x);
  auto const& sv = svd.singularValues();
  double rcond = sv(sv.size() - 1) / sv(0);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (!(rcond >= 1e-12)) {
    // A column is dependent when it adds no rank to the columns before it.
    std::string offenders;
    std::vector<Eigen::Index> kept{0};
    for (std::size_t j = 1; j < p + 1; ++j) {
      Eigen::MatrixXd sub(n, static_cast<Eigen::Index>(kept.size() + 1));
      for (std::size_t k = 0; k < kept.size(); ++k) {
        sub.col(static_cast<Eigen::Index>(k)) = x.col(kept[k]);
      }
      sub.col(sub.cols() - 1) = x.col(static_cast<Eigen::Index>(j));
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> step(sub);
      step.setThreshold(1e-10);
      if (step.rank() == sub.cols()) {
        kept.push_back(static_cast<Eigen::Index>(j));
      } else {
        offenders += (offenders.empty() ? "" : ", ") + all_names[j];
      }
    }
    if (offenders.empty()) offenders = "(numerically ill-conditioned)";
    throw Error(ErrorCode::kCollinearity,
                "design is rank deficient (rcond " + std::to_string(rcond) +
                    "); dependent column(s): " + offenders);
  }

  Eigen::VectorXd beta = qr.solve(y);
  Eigen::VectorXd resid = y - x * beta;

  RegressionFit fit;
  fit.feature_names = all_names;
  fit.n_observations = n;
  fit.degrees_of_freedom = n - p - 1;
  fit.ss_total = ss_total;
  fit.ss_residual = resid.squaredNorm();
  fit.r2 = 1.0 - fit.ss_residual / ss_total;
  fit.adjusted_r2 = AdjustedR2(fit.r2, n, p);

  // (XᵀX)⁻¹ = P R⁻¹ R⁻ᵀ Pᵀ.
  Eigen::MatrixXd r = qr.matrixR()
                          .topLeftCorner(p + 1, p + 1)
                          .triangularView<Eigen::Upper>();
  Eigen::MatrixXd r_inv = r.triangularView<Eigen::Upper>().solve(
      Eigen::MatrixXd::Identity(p + 1, p + 1));
  Eigen::MatrixXd inner = r_inv * r_inv.transpose();
  Eigen::MatrixXd cov_unit = qr.colsPermutation() * inner *
                             qr.colsPermutation().transpose();
  double sigma2 = fit.ss_residual / static_cast<double>(fit.degrees_of_freedom);
  auto dof = static_cast<double>(fit.degrees_of_freedom);
  for (std::size_t j = 0; j < p + 1; ++j) {
    auto jj = static_cast<Eigen::Index>(j);
    double b = beta(jj);
    double se = std::sqrt(sigma2 * cov_unit(jj, jj));
    double t = 0.0;
    double pv = 1.0;
    if (se > 0.0) {
      t = b / se;
      pv = 2.0 * StudentTUpperTail(std::fabs(t), dof);
    } else if (b != 0.0) {
      t = std::copysign(std::numeric_limits<double>::infinity(), b);
      pv = 0.0;
    }
    fit.coefficients.push_back(b);
    fit.std_errors.push_back(se);
    fit.t_values.push_back(t);
    fit.p_values.push_back(std::clamp(pv, 0.0, 1.0));
  }
  fit.residuals.assign(resid.data(), resid.data() + resid.size());
  return fit;
}

std::string SignificanceStars(double p_value) {
  if (p_value < 0.01) return "***";
  if (p_value < 0.05) return "**";
  if (p_value < 0.1) return "*";
  return "";
}

std::string FormatRegressionTable(RegressionFit const& fit,
                                  std::string const& title) {
  std::size_t width = 14;
  for (auto const& name : fit.feature_names) width = std::max(width, name.size() + 2);
  char buf[256];
  std::string out = title + "\n";
  std::snprintf(buf, sizeof buf, "%-*s %14s %14s %-4s %10s\n",
                static_cast<int>(width), "Feature", "Coefficient", "Std. Error",
                "", "p-value");
  out += buf;
  for (std::size_t j = 0; j < fit.feature_names.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%-*s %14.6f %14.6f %-4s %10.4g\n",
                  static_cast<int>(width), fit.feature_names[j].c_str(),
                  fit.coefficients[j], fit.std_errors[j],
                  SignificanceStars(fit.p_values[j]).c_str(), fit.p_values[j]);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "%-*s %14zu\n", static_cast<int>(width),
                "Observations", fit.n_observations);
  out += buf;
  std::snprintf(buf, sizeof buf, "%-*s %14.4f\n", static_cast<int>(width), "R2",
                fit.r2);
  out += buf;
  std::snprintf(buf, sizeof buf, "%-*s %14.4f\n", static_cast<int>(width),
                "Adjusted R2", fit.adjusted_r2);
  out += buf;
  out += "Note: * p<0.1; ** p<0.05; *** p<0.01\n";
  return out;
}

std::vector<double> ZScore(std::span<double const> values) {
  auto s = Summarize(values);
  std::vector<double> out(values.begin(), values.end());
  for (auto& v : out) {
    v -= s.mean;
    if (s.sd > 0.0) v /= s.sd;
  }
  return out;
}

std::vector<double> AverageRanks(std::span<double const> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    double rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

Correlation Correlations(std::span<double const> x, std::span<double const> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kInvalidArgument, "series lengths differ");
  }
  if (x.size() < 3) {
    throw Error(ErrorCode::kInvalidArgument, "correlation needs n >= 3");
  }
  RequireFinite(x, "x");
  RequireFinite(y, "y");
  Correlation c;
  c.pearson = Pearson(x, y);
  auto rx = AverageRanks(x);
  auto ry = AverageRanks(y);
  c.spearman = Pearson(rx, ry);
  return c;
}

double CorrelationPValue(double r, std::size_t n, bool one_sided_negative) {
  if (n < 3) return 1.0;
  auto dof = static_cast<double>(n - 2);
  double t;
  if (std::fabs(r) >= 1.0) {
    t = std::copysign(std::numeric_limits<double>::infinity(), r);
  } else {
    t = r * std::sqrt(dof / (1.0 - r * r));
  }
  if (one_sided_negative) return StudentTUpperTail(-t, dof);
  return std::min(1.0, 2.0 * StudentTUpperTail(std::fabs(t), dof));
}

PairedTest PairedGreater(std::span<double const> a, std::span<double const> b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "paired test needs two equal-length series of n >= 2");
  }
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  auto s = Summarize(diff);
  PairedTest test;
  test.mean_difference = s.mean;
  if (s.sd == 0.0) {
    test.t = s.mean == 0.0 ? 0.0
                           : std::copysign(std::numeric_limits<double>::infinity(),
                                           s.mean);
  } else {
    test.t = s.mean / (s.sd / std::sqrt(static_cast<double>(diff.size())));
  }
  test.p_value = s.mean == 0.0 && s.sd == 0.0
                     ? 1.0
                     : StudentTUpperTail(test.t,
                                         static_cast<double>(diff.size() - 1));
  return test;
}

Summary Summarize(std::span<double const> values) {
  if (values.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "summary of no values");
  }
  Summary s;
  s.mean = Mean(values);
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

}  // namespace embstab
