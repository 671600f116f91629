#include "fptlab/density.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "fptlab/error.hpp"

namespace fptlab {

double trapezoid(std::span<const double> x, std::span<const double> y) {
  double sum = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) sum += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
  return sum;
}

std::vector<double> uniform_knots(double t0, double h, std::size_t n) {
  std::vector<double> out(n + 1);
  for (std::size_t k = 0; k <= n; ++k) out[k] = t0 + double(k) * h;
  return out;
}

DensityGrid DensityGrid::make(std::vector<double> knots, std::vector<double> values,
                              std::string method) {
  if (knots.size() != values.size())
    fail(ErrorKind::InvalidArgument, "density grid: knots and values differ in length");
  if (knots.empty()) fail(ErrorKind::InvalidArgument, "density grid: no knots");
  for (std::size_t i = 1; i < knots.size(); ++i)
    if (!(knots[i] > knots[i - 1]))
      fail(ErrorKind::InvalidArgument, "density grid: knots must be strictly increasing");
  for (double v : values)
    if (!(v >= 0.0) || !std::isfinite(v))
      fail(ErrorKind::InvalidArgument, fmt::format("density grid: invalid ordinate {}", v));
  DensityGrid g;
  g.total_mass = trapezoid(knots, values);
  g.knots = std::move(knots);
  g.values = std::move(values);
  g.method = std::move(method);
  return g;
}

DensityGrid DensityGrid::from_function(const std::function<double(double)>& density,
                                       std::span<const double> knots, std::string method) {
  std::vector<double> values(knots.size());
  std::transform(knots.begin(), knots.end(), values.begin(), density);
  return make({knots.begin(), knots.end()}, std::move(values), std::move(method));
}

double DensityGrid::interpolate(double t) const {
  if (t < knots.front() || t > knots.back()) return 0.0;
  const auto it = std::upper_bound(knots.begin(), knots.end(), t);
  if (it == knots.end()) return values.back();
  const std::size_t i = std::size_t(it - knots.begin());
  if (i == 0) return values.front();
  const double w = (t - knots[i - 1]) / (knots[i] - knots[i - 1]);
  return (1.0 - w) * values[i - 1] + w * values[i];
}

void DensityGrid::write_csv(std::ostream& os) const {
  os << "t,g\n";
  for (std::size_t i = 0; i < knots.size(); ++i)
    fmt::print(os, "{:.17g},{:.17g}\n", knots[i], values[i]);
}

DensityGrid DensityGrid::read_csv(std::istream& is, std::string method) {
  std::string line;
  if (!std::getline(is, line) || line != "t,g")
    fail(ErrorKind::Io, "density csv: expected header 't,g'");
  std::vector<double> t;
  std::vector<double> g;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) fail(ErrorKind::Io, "density csv: malformed row " + line);
    t.push_back(std::stod(line.substr(0, comma)));
    g.push_back(std::stod(line.substr(comma + 1)));
  }
  return make(std::move(t), std::move(g), std::move(method));
}

}  // namespace fptlab
