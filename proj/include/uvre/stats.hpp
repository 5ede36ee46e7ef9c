#pragma once

// Sample Pearson correlation and the least-squares log fit used by the
// scaling analysis.

#include <cmath>
#include <string>
#include <vector>

#include "uvre/errors.hpp"

namespace uvre {

// Textbook sample Pearson coefficient. The sample/population distinction in
// the denominator cancels; this is the plain estimator.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) {
    throw LengthMismatchError("pearson: " + std::to_string(x.size()) + " vs " +
                              std::to_string(y.size()) + " points");
  }
  if (x.size() < 3) throw LengthMismatchError("pearson: need at least 3 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw ConstantInputError("pearson: constant input sequence");
  return sxy / std::sqrt(sxx * syy);
}

struct ScalingFit {
  double a = 0.0;  // slope of y = a ln x + b
  double b = 0.0;
  double gain_per_decade = 0.0;       // a * ln 10
  double relative_gain = 0.0;         // gain / fitted y at the smallest x
  double residual_sum_squares = 0.0;
};

// Least squares for y = a ln x + b over (x, y) points with x > 0.
inline ScalingFit fit_log_scaling(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw DegenerateXError("fit_log_scaling: need at least 2 points");
  std::vector<double> lx(points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].first > 0.0)) {
      throw DegenerateXError("fit_log_scaling: x must be positive, got " +
                             std::to_string(points[i].first));
    }
    lx[i] = std::log(points[i].first);
  }
  bool distinct = false;
  for (size_t i = 1; i < lx.size(); ++i) distinct = distinct || lx[i] != lx[0];
  if (!distinct) throw DegenerateXError("fit_log_scaling: all x equal");

  const double n = static_cast<double>(points.size());
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < points.size(); ++i) {
    mx += lx[i];
    my += points[i].second;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (size_t i = 0; i < points.size(); ++i) {
    const double dx = lx[i] - mx;
    sxx += dx * dx;
    sxy += dx * (points[i].second - my);
  }

  ScalingFit fit;
  fit.a = sxy / sxx;
  fit.b = my - fit.a * mx;
  fit.gain_per_decade = fit.a * std::log(10.0);

  double min_x = points[0].first;
  for (const auto& [x, y] : points) min_x = std::min(min_x, x);
  const double y_at_min = fit.a * std::log(min_x) + fit.b;
  fit.relative_gain = y_at_min != 0.0 ? fit.gain_per_decade / y_at_min : 0.0;

  for (size_t i = 0; i < points.size(); ++i) {
    const double r = points[i].second - (fit.a * lx[i] + fit.b);
    fit.residual_sum_squares += r * r;
  }
  return fit;
}

}  // namespace uvre
