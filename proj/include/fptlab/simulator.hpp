#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "fptlab/spectral.hpp"

namespace fptlab {

/// Paths sampled at 0, dt, ..., steps*dt, stored row-major (one row per path).
struct PathEnsemble {
  double dt = 0.0;
  std::size_t steps = 0;
  std::size_t paths = 0;
  double x0 = 0.0;
  std::uint64_t master_seed = 0;
  // Local variance rate of the paths; used for inter-step crossing tests.
  double diffusion = 0.0;
  std::vector<double> values;

  std::span<const double> path(std::size_t i) const {
    return {values.data() + i * (steps + 1), steps + 1};
  }

  // Rows = paths, columns = time steps. Refuses ensembles above max_values.
  void write_csv(std::ostream& os, std::size_t max_values) const;
};

/// Random stream owned by one path: keyed by (master seed, path index,
/// purpose), independent of scheduling.
std::mt19937_64 path_engine(std::uint64_t master_seed, std::uint64_t path, std::uint32_t stream);

inline constexpr std::uint32_t kPathStream = 0;
inline constexpr std::uint32_t kCrossingStream = 1;

/// Precomputed start law and per-step matrices for sampling one filter from x0.
class FilterSampler {
 public:
  static constexpr std::size_t kMaxDimension = 8;

  FilterSampler(const StateSpaceFilter& filter, double x0);

  std::size_t dimension() const noexcept { return n_; }
  double x0() const noexcept { return x0_; }
  double diffusion() const noexcept { return diffusion_; }

  /// Sequential generator for a single path.
  class Path {
   public:
    Path(const FilterSampler& sampler, std::uint64_t master_seed, std::uint64_t index);
    /// Advances one step and returns the new observation.
    double advance();

   private:
    const FilterSampler& sampler_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
    std::array<double, kMaxDimension> state_{};
  };

 private:
  std::size_t n_;
  double x0_;
  double diffusion_;
  std::vector<double> transition_;   // row-major n x n
  std::vector<double> step_factor_;  // row-major n x n
  std::vector<double> start_mean_;
  std::vector<double> start_factor_;  // row-major n x n
  std::vector<double> observation_;
};

PathEnsemble simulate_ensemble(const StateSpaceFilter& filter, double x0, std::size_t paths,
                               std::size_t steps, std::uint64_t master_seed,
                               unsigned workers = 1);

/// Brute-force sampler: dense Cholesky of the correlation matrix
/// [gamma(|i-j| dt)] conditioned on X(0) = x0. Limited to 2000 steps.
PathEnsemble simulate_oracle_cholesky(const std::function<double(double)>& gamma, double x0,
                                      double dt, std::size_t steps, std::size_t paths,
                                      std::uint64_t master_seed);

}  // namespace fptlab
