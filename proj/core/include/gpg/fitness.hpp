#pragma once

#include <limits>
#include <span>

namespace gpg {

inline constexpr double kWorstFitness = std::numeric_limits<double>::infinity();

struct LinearScale {
  double intercept = 0.0;  // a
  double slope = 0.0;      // b
};

// Least-squares intercept/slope for y ~ a + b*p (population statistics):
// b = cov(y,p)/var(p), a = mean(y) - b*mean(p). Degenerate p (zero variance
// or non-finite entries) falls back to the mean predictor (a = mean(y), b = 0).
LinearScale linear_scale(std::span<const double> y, std::span<const double> p);

// MSE of y against a + b*p with (a, b) from linear_scale. Non-finite
// predictions yield the worst-fitness sentinel. If scale_out is given it
// receives the coefficients used.
double scaled_mse(std::span<const double> y, std::span<const double> p,
                  LinearScale* scale_out = nullptr);

// 100 * scaled_mse / var(y). Throws if y has zero variance.
double nmse(std::span<const double> y, std::span<const double> p);

double mean(std::span<const double> v);
double variance(std::span<const double> v);  // population (divide-by-n)

struct TargetMoments {
  double mean = 0.0;
  double variance = 0.0;
};

inline TargetMoments target_moments(std::span<const double> y) {
  return {mean(y), variance(y)};
}

// Single-pass fitness path for the inner loops: same quantity as
// scaled_mse via the normal-equations identity mse = var(y) - b*cov(y,p),
// with the target moments precomputed once per training split.
double scaled_mse_fast(const TargetMoments& ym, std::span<const double> y,
                       std::span<const double> p, LinearScale* scale_out = nullptr);

}  // namespace gpg
