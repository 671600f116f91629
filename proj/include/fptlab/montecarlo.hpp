#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <variant>
#include <vector>

#include "fptlab/boundary.hpp"
#include "fptlab/density.hpp"
#include "fptlab/simulator.hpp"

namespace fptlab {

enum class CrossingRule {
  // Only crossings observed at grid points count.
  GridOnly,
  // Also counts excursions between grid points, with the Brownian-bridge
  // probability exp(-2 g1 g2 / (sigma^2 dt)) for gaps g1, g2 below the boundary.
  BrownianBridge,
};

struct FptSampleSet {
  std::vector<double> crossing_times;  // sorted
  std::vector<double> path_times;      // per path, NaN when censored
  std::size_t censored = 0;
  std::size_t total = 0;
  double horizon = 0.0;
  double dt = 0.0;
  std::uint64_t master_seed = 0;

  std::size_t crossed() const noexcept { return crossing_times.size(); }
  double crossing_fraction() const noexcept { return double(crossed()) / double(total); }

  // Header "path_id,crossing_time,censored".
  void write_csv(std::ostream& os) const;
};

/// Crossing test for one step of one path.
class CrossingDetector {
 public:
  CrossingDetector(const BoundarySpec& boundary, double dt, std::size_t steps, double diffusion,
                   CrossingRule rule);

  /// Crossing time within ((k-1) dt, k dt], if any. `uniform` feeds the
  /// inter-step test and must be drawn once per step.
  std::optional<double> step(std::size_t k, double previous, double current, double uniform) const;
  double boundary_at(std::size_t k) const { return levels_[k]; }

 private:
  std::vector<double> levels_;  // S(k dt), k = 0..steps
  double dt_;
  double diffusion_;
  CrossingRule rule_;
};

FptSampleSet detect_crossings(const PathEnsemble& ensemble, const BoundarySpec& boundary,
                              CrossingRule rule = CrossingRule::BrownianBridge);

/// Streams paths of `filter` from x0 through `boundary`, stopping each path at
/// its first crossing. Equal to detect_crossings(simulate_ensemble(...)).
FptSampleSet simulate_first_passage(const StateSpaceFilter& filter, const BoundarySpec& boundary,
                                    double x0, std::size_t paths, std::size_t steps,
                                    std::uint64_t master_seed, unsigned workers = 1,
                                    CrossingRule rule = CrossingRule::BrownianBridge);

struct BinCount {
  std::size_t count;
};
struct BinWidth {
  double width;
};
struct FreedmanDiaconis {};
using BinSpec = std::variant<FreedmanDiaconis, BinCount, BinWidth>;

struct Histogram {
  DensityGrid density;  // knots at bin midpoints; total_mass = crossed / N
  std::vector<double> edges;
  std::vector<std::size_t> counts;
  std::size_t total = 0;

  /// Standard error of the density ordinate in bin i.
  double standard_error(std::size_t i) const;
};

std::vector<double> histogram_edges(const FptSampleSet& samples, const BinSpec& bins);
Histogram estimate_density(const FptSampleSet& samples, const BinSpec& bins = FreedmanDiaconis{});

struct SampleStatistics {
  double mean;
  double variance;  // unbiased
  double mode;      // midpoint of the tallest histogram bin
  double q1;
  double median;
  double q3;
};

SampleStatistics sample_statistics(const FptSampleSet& samples,
                                   const BinSpec& bins = FreedmanDiaconis{});

struct DensityDistance {
  double l1;
  double sup;
  double ks;
};

/// Distances between `a` and `b` resampled onto a's knots by linear
/// interpolation, over the common support.
DensityDistance compare_densities(const DensityGrid& a, const DensityGrid& b);

}  // namespace fptlab
