#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>

#include <Eigen/Dense>

namespace pawclock {

struct OscillationFit {
  double angular_frequency = 0.0;
  double offset = 0.0;
  double amplitude = 0.0;
  double rms_residual = 0.0;
};

namespace detail {

// Least-squares fit of c0 + c1 cos(w t) + c2 sin(w t) at fixed w.
inline OscillationFit fit_at(std::span<const double> t, std::span<const double> y, double w) {
  const auto n = static_cast<Eigen::Index>(t.size());
  Eigen::MatrixXd a(n, 3);
  Eigen::VectorXd b(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    a(k, 0) = 1.0;
    a(k, 1) = std::cos(w * t[static_cast<std::size_t>(k)]);
    a(k, 2) = std::sin(w * t[static_cast<std::size_t>(k)]);
    b(k) = y[static_cast<std::size_t>(k)];
  }
  const Eigen::VectorXd c = a.colPivHouseholderQr().solve(b);
  OscillationFit f;
  f.angular_frequency = w;
  f.offset = c(0);
  f.amplitude = std::hypot(c(1), c(2));
  f.rms_residual = std::sqrt((a * c - b).squaredNorm() / static_cast<double>(n));
  return f;
}

}  // namespace detail

/// Fits y(t) ~ c0 + A cos(w t + phase) by scanning w up to the Nyquist limit
/// of the (uniform) sample spacing and refining the best scan point by
/// golden-section search.
inline OscillationFit fit_oscillation(std::span<const double> t, std::span<const double> y,
                                      std::size_t scan_points = 4000) {
  if (t.size() != y.size() || t.size() < 8) throw std::invalid_argument("fit_oscillation: need >= 8 paired samples");
  const double span = t.back() - t.front();
  const double dt = span / static_cast<double>(t.size() - 1);
  const double w_min = std::numbers::pi / span;
  const double w_max = std::numbers::pi / dt;
  const double step = (w_max - w_min) / static_cast<double>(scan_points);
  OscillationFit best;
  best.rms_residual = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= scan_points; ++k) {
    const auto f = detail::fit_at(t, y, w_min + step * static_cast<double>(k));
    if (f.rms_residual < best.rms_residual) best = f;
  }
  double lo = std::max(w_min, best.angular_frequency - step);
  double hi = std::min(w_max, best.angular_frequency + step);
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  auto f1 = detail::fit_at(t, y, x1), f2 = detail::fit_at(t, y, x2);
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    if (f1.rms_residual < f2.rms_residual) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = detail::fit_at(t, y, x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = detail::fit_at(t, y, x2);
    }
  }
  const auto refined = f1.rms_residual < f2.rms_residual ? f1 : f2;
  return refined.rms_residual < best.rms_residual ? refined : best;
}

}  // namespace pawclock
