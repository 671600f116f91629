#include "fptlab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "fptlab/error.hpp"
#include "fptlab/parallel.hpp"

namespace fptlab {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

FptSampleSet assemble(std::vector<double> path_times, double horizon, double dt,
                      std::uint64_t seed) {
  FptSampleSet out;
  out.total = path_times.size();
  out.horizon = horizon;
  out.dt = dt;
  out.master_seed = seed;
  for (double t : path_times) {
    if (std::isnan(t))
      ++out.censored;
    else
      out.crossing_times.push_back(t);
  }
  std::sort(out.crossing_times.begin(), out.crossing_times.end());
  out.path_times = std::move(path_times);
  return out;
}

double quantile(const std::vector<double>& sorted, double p) {
  const double pos = p * double(sorted.size() - 1);
  const auto lo = std::size_t(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double w = pos - double(lo);
  return (1.0 - w) * sorted[lo] + w * sorted[hi];
}

void require_crossings(const FptSampleSet& samples) {
  if (samples.crossed() == 0)
    fail(ErrorKind::AllCensored,
         fmt::format("all {} paths are censored at horizon {}", samples.total, samples.horizon));
}

}  // namespace

CrossingDetector::CrossingDetector(const BoundarySpec& boundary, double dt, std::size_t steps,
                                   double diffusion, CrossingRule rule)
    : levels_(steps + 1), dt_(dt), diffusion_(diffusion), rule_(rule) {
  for (std::size_t k = 0; k <= steps; ++k) levels_[k] = boundary(double(k) * dt);
}

std::optional<double> CrossingDetector::step(std::size_t k, double previous, double current,
                                             double uniform) const {
  const double start = double(k - 1) * dt_;
  const double gap0 = levels_[k - 1] - previous;
  const double gap1 = levels_[k] - current;
  if (gap1 < 0.0) return start + dt_ * gap0 / (gap0 - gap1);
  if (rule_ == CrossingRule::BrownianBridge && diffusion_ > 0.0) {
    const double p = std::exp(-2.0 * gap0 * gap1 / (diffusion_ * dt_));
    if (uniform < p) {
      const double sum = gap0 + gap1;
      return start + dt_ * (sum > 0.0 ? gap0 / sum : 0.5);
    }
  }
  return std::nullopt;
}

FptSampleSet detect_crossings(const PathEnsemble& ensemble, const BoundarySpec& boundary,
                              CrossingRule rule) {
  const CrossingDetector detector(boundary, ensemble.dt, ensemble.steps, ensemble.diffusion, rule);
  std::vector<double> times(ensemble.paths, kNaN);
  for (std::size_t i = 0; i < ensemble.paths; ++i) {
    const auto row = ensemble.path(i);
    if (!(row[0] < detector.boundary_at(0)))
      fail(ErrorKind::StartsAboveBoundary,
           fmt::format("path {} starts at {} >= S(0) = {}", i, row[0], detector.boundary_at(0)));
  }
  for (std::size_t i = 0; i < ensemble.paths; ++i) {
    const auto row = ensemble.path(i);
    std::mt19937_64 engine = path_engine(ensemble.master_seed, i, kCrossingStream);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::size_t k = 1; k <= ensemble.steps; ++k) {
      if (!std::isfinite(row[k]))
        fail(ErrorKind::InvalidArgument, fmt::format("path {} has a non-finite value", i));
      if (const auto t = detector.step(k, row[k - 1], row[k], unit(engine))) {
        times[i] = *t;
        break;
      }
    }
  }
  return assemble(std::move(times), ensemble.dt * double(ensemble.steps), ensemble.dt,
                  ensemble.master_seed);
}

FptSampleSet simulate_first_passage(const StateSpaceFilter& filter, const BoundarySpec& boundary,
                                    double x0, std::size_t paths, std::size_t steps,
                                    std::uint64_t master_seed, unsigned workers,
                                    CrossingRule rule) {
  if (paths < 1 || steps < 1)
    fail(ErrorKind::InvalidArgument, "simulate_first_passage: need paths >= 1 and steps >= 1");
  const CrossingDetector detector(boundary, filter.dt, steps, filter.diffusion, rule);
  if (!(x0 < detector.boundary_at(0)))
    fail(ErrorKind::StartsAboveBoundary,
         fmt::format("x0 = {} is not below S(0) = {}", x0, detector.boundary_at(0)));
  const FilterSampler sampler(filter, x0);
  std::vector<double> times(paths, kNaN);
  parallel_for(paths, workers, [&](std::size_t i) {
    FilterSampler::Path path(sampler, master_seed, i);
    std::mt19937_64 engine = path_engine(master_seed, i, kCrossingStream);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double previous = x0;
    for (std::size_t k = 1; k <= steps; ++k) {
      const double current = path.advance();
      if (const auto t = detector.step(k, previous, current, unit(engine))) {
        times[i] = *t;
        return;
      }
      previous = current;
    }
  });
  return assemble(std::move(times), filter.dt * double(steps), filter.dt, master_seed);
}

void FptSampleSet::write_csv(std::ostream& os) const {
  os << "path_id,crossing_time,censored\n";
  for (std::size_t i = 0; i < path_times.size(); ++i) {
    if (std::isnan(path_times[i]))
      fmt::print(os, "{},,1\n", i);
    else
      fmt::print(os, "{},{:.17g},0\n", i, path_times[i]);
  }
}

std::vector<double> histogram_edges(const FptSampleSet& samples, const BinSpec& bins) {
  require_crossings(samples);
  const double horizon = samples.horizon;
  std::size_t count = 1;
  if (const auto* c = std::get_if<BinCount>(&bins)) {
    count = std::max<std::size_t>(1, c->count);
  } else if (const auto* w = std::get_if<BinWidth>(&bins)) {
    if (!(w->width > 0.0)) fail(ErrorKind::InvalidArgument, "bin width must be > 0");
    count = std::max<std::size_t>(1, std::size_t(std::llround(horizon / w->width)));
  } else {
    const auto& x = samples.crossing_times;
    const double iqr = quantile(x, 0.75) - quantile(x, 0.25);
    const double n = double(x.size());
    double width = 2.0 * iqr / std::cbrt(n);
    if (!(width > 0.0)) width = horizon / std::ceil(std::sqrt(n));
    count = std::max<std::size_t>(1, std::size_t(std::ceil(horizon / width)));
  }
  std::vector<double> edges(count + 1);
  for (std::size_t i = 0; i <= count; ++i) edges[i] = horizon * double(i) / double(count);
  return edges;
}

Histogram estimate_density(const FptSampleSet& samples, const BinSpec& bins) {
  Histogram h;
  h.edges = histogram_edges(samples, bins);
  const std::size_t nb = h.edges.size() - 1;
  const double width = samples.horizon / double(nb);
  h.counts.assign(nb, 0);
  h.total = samples.total;
  for (double t : samples.crossing_times) {
    // Bins are (lo, hi].
    auto i = std::ptrdiff_t(std::ceil(t / width)) - 1;
    i = std::clamp<std::ptrdiff_t>(i, 0, std::ptrdiff_t(nb) - 1);
    ++h.counts[std::size_t(i)];
  }
  std::vector<double> mids(nb);
  std::vector<double> values(nb);
  for (std::size_t i = 0; i < nb; ++i) {
    mids[i] = 0.5 * (h.edges[i] + h.edges[i + 1]);
    values[i] = double(h.counts[i]) / (double(samples.total) * width);
  }
  h.density = DensityGrid::make(std::move(mids), std::move(values), "histogram");
  h.density.total_mass = samples.crossing_fraction();
  return h;
}

double Histogram::standard_error(std::size_t i) const {
  const double n = double(total);
  const double p = double(counts[i]) / n;
  const double width = edges[i + 1] - edges[i];
  return std::sqrt(p * (1.0 - p) / n) / width;
}

SampleStatistics sample_statistics(const FptSampleSet& samples, const BinSpec& bins) {
  require_crossings(samples);
  const auto& x = samples.crossing_times;
  const double n = double(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const Histogram h = estimate_density(samples, bins);
  const auto tallest = std::max_element(h.counts.begin(), h.counts.end()) - h.counts.begin();
  return {mean,
          x.size() > 1 ? ss / (n - 1.0) : 0.0,
          h.density.knots[std::size_t(tallest)],
          quantile(x, 0.25),
          quantile(x, 0.5),
          quantile(x, 0.75)};
}

DensityDistance compare_densities(const DensityGrid& a, const DensityGrid& b) {
  const double lo = std::max(a.knots.front(), b.knots.front());
  const double hi = std::min(a.knots.back(), b.knots.back());
  std::vector<double> t;
  std::vector<double> va;
  std::vector<double> vb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.knots[i] < lo || a.knots[i] > hi) continue;
    t.push_back(a.knots[i]);
    va.push_back(a.values[i]);
    vb.push_back(b.interpolate(a.knots[i]));
  }
  if (!(lo < hi) || t.size() < 2)
    fail(ErrorKind::DisjointSupports,
         fmt::format("densities '{}' and '{}' have no common support", a.method, b.method));
  DensityDistance d{0.0, 0.0, 0.0};
  double cdf_a = 0.0;
  double cdf_b = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double diff = std::abs(va[i] - vb[i]);
    d.sup = std::max(d.sup, diff);
    if (i > 0) {
      const double step = t[i] - t[i - 1];
      d.l1 += 0.5 * step * (diff + std::abs(va[i - 1] - vb[i - 1]));
      cdf_a += 0.5 * step * (va[i] + va[i - 1]);
      cdf_b += 0.5 * step * (vb[i] + vb[i - 1]);
      d.ks = std::max(d.ks, std::abs(cdf_a - cdf_b));
    }
  }
  return d;
}

}  // namespace fptlab
