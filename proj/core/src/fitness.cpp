#include "gpg/fitness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gpg {

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double variance(std::span<const double> v) {
  double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

LinearScale linear_scale(std::span<const double> y, std::span<const double> p) {
  const std::size_t n = y.size();
  double sum_p = 0.0;
  bool finite = true;
  for (double v : p) {
    sum_p += v;
    if (!std::isfinite(v)) {
      finite = false;
      break;
    }
  }
  double mean_y = mean(y);
  if (!finite || !std::isfinite(sum_p)) return {mean_y, 0.0};

  double mean_p = sum_p / static_cast<double>(n);
  double var_p = 0.0;
  double cov = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dp = p[i] - mean_p;
    var_p += dp * dp;
    cov += dp * (y[i] - mean_y);
  }
  if (var_p == 0.0 || !std::isfinite(var_p) || !std::isfinite(cov)) return {mean_y, 0.0};
  double b = cov / var_p;
  return {mean_y - b * mean_p, b};
}

double scaled_mse(std::span<const double> y, std::span<const double> p, LinearScale* scale_out) {
  LinearScale s = linear_scale(y, p);
  if (scale_out) *scale_out = s;

  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    double r = y[i] - (s.intercept + s.slope * p[i]);
    acc += r * r;
  }
  double mse = acc / static_cast<double>(y.size());
  // Non-finite predictions poison acc (0 * inf = NaN), so they land here.
  if (!std::isfinite(mse)) return kWorstFitness;
  return mse;
}

double scaled_mse_fast(const TargetMoments& ym, std::span<const double> y,
                       std::span<const double> p, LinearScale* scale_out) {
  const std::size_t n = y.size();
  double sum_p = 0.0, sum_pp = 0.0, sum_py = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum_p += p[i];
    sum_pp += p[i] * p[i];
    sum_py += p[i] * y[i];
  }
  if (scale_out) *scale_out = {ym.mean, 0.0};
  if (!std::isfinite(sum_p) || !std::isfinite(sum_pp) || !std::isfinite(sum_py))
    return kWorstFitness;

  double mean_p = sum_p / static_cast<double>(n);
  double var_p = sum_pp / static_cast<double>(n) - mean_p * mean_p;
  double cov = sum_py / static_cast<double>(n) - ym.mean * mean_p;
  if (var_p <= 0.0) return ym.variance;  // mean predictor

  double b = cov / var_p;
  if (scale_out) *scale_out = {ym.mean - b * mean_p, b};
  double mse = ym.variance - b * cov;
  if (!std::isfinite(mse)) return kWorstFitness;
  return std::max(mse, 0.0);
}

double nmse(std::span<const double> y, std::span<const double> p) {
  double var_y = variance(y);
  if (var_y <= 0.0) throw std::invalid_argument("nmse: constant target");
  return 100.0 * scaled_mse(y, p) / var_y;
}

}  // namespace gpg
