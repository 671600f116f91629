#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace fptlab {

/// A density sampled on strictly increasing knots.
struct DensityGrid {
  std::vector<double> knots;
  std::vector<double> values;
  std::string method;
  double total_mass = 0.0;  // trapezoidal integral over the knots

  static DensityGrid make(std::vector<double> knots, std::vector<double> values,
                          std::string method);
  static DensityGrid from_function(const std::function<double(double)>& density,
                                   std::span<const double> knots, std::string method);

  std::size_t size() const noexcept { return knots.size(); }
  /// Linear interpolation; zero outside [knots.front(), knots.back()].
  double interpolate(double t) const;

  // Header "t,g", 17 significant digits.
  void write_csv(std::ostream& os) const;
  static DensityGrid read_csv(std::istream& is, std::string method);
};

double trapezoid(std::span<const double> x, std::span<const double> y);

/// t0, t0 + h, ..., t0 + n h.
std::vector<double> uniform_knots(double t0, double h, std::size_t n);

}  // namespace fptlab
