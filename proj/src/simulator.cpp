#include "fptlab/simulator.hpp"

#include <cmath>
#include <ostream>

#include <Eigen/Cholesky>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "fptlab/error.hpp"
#include "fptlab/parallel.hpp"

namespace fptlab {
namespace {

std::vector<double> row_major(const Eigen::MatrixXd& m) {
  std::vector<double> out(std::size_t(m.rows() * m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[std::size_t(i * m.cols() + j)] = m(i, j);
  return out;
}

}  // namespace

std::mt19937_64 path_engine(std::uint64_t master_seed, std::uint64_t path, std::uint32_t stream) {
  std::seed_seq seq{std::uint32_t(master_seed), std::uint32_t(master_seed >> 32),
                    std::uint32_t(path), std::uint32_t(path >> 32), stream};
  return std::mt19937_64(seq);
}

FilterSampler::FilterSampler(const StateSpaceFilter& filter, double x0)
    : n_(filter.dimension()), x0_(x0), diffusion_(filter.diffusion) {
  if (n_ == 0 || n_ > kMaxDimension)
    fail(ErrorKind::InvalidArgument,
         fmt::format("sampler supports state dimension 1..{}, got {}", kMaxDimension, n_));
  transition_ = row_major(filter.transition);
  step_factor_ = row_major(filter.step_factor);
  observation_.assign(filter.observation.data(), filter.observation.data() + n_);
  const auto dim = Eigen::Index(n_);
  if (!filter.stationary) {
    // Pinned start: the observed coordinate carries x0, the rest are zero.
    start_mean_.assign(n_, 0.0);
    start_mean_[0] = x0 / filter.observation(0);
    start_factor_.assign(n_ * n_, 0.0);
    return;
  }
  const Eigen::VectorXd cross = filter.stationary_cov * filter.observation.transpose();
  const double obs_var = filter.observation.dot(cross);
  if (!(obs_var > 0.0))
    fail(ErrorKind::DegenerateObservation,
         fmt::format("observation variance C Sigma C^T = {} is not positive", obs_var));
  const Eigen::VectorXd mean = cross * (x0 / obs_var);
  const Eigen::MatrixXd cond = filter.stationary_cov - cross * cross.transpose() / obs_var;
  start_mean_.assign(mean.data(), mean.data() + dim);
  start_factor_ = row_major(psd_factor(cond));
}

FilterSampler::Path::Path(const FilterSampler& sampler, std::uint64_t master_seed,
                          std::uint64_t index)
    : sampler_(sampler), engine_(path_engine(master_seed, index, kPathStream)) {
  const std::size_t n = sampler.n_;
  std::array<double, kMaxDimension> z{};
  for (std::size_t i = 0; i < n; ++i) z[i] = normal_(engine_);
  for (std::size_t i = 0; i < n; ++i) {
    double v = sampler.start_mean_[i];
    for (std::size_t j = 0; j < n; ++j) v += sampler.start_factor_[i * n + j] * z[j];
    state_[i] = v;
  }
}

double FilterSampler::Path::advance() {
  const std::size_t n = sampler_.n_;
  std::array<double, kMaxDimension> z{};
  for (std::size_t i = 0; i < n; ++i) z[i] = normal_(engine_);
  std::array<double, kMaxDimension> next{};
  double obs = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double v = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      v += sampler_.transition_[i * n + j] * state_[j] + sampler_.step_factor_[i * n + j] * z[j];
    next[i] = v;
    obs += sampler_.observation_[i] * v;
  }
  state_ = next;
  return obs;
}

PathEnsemble simulate_ensemble(const StateSpaceFilter& filter, double x0, std::size_t paths,
                               std::size_t steps, std::uint64_t master_seed, unsigned workers) {
  if (paths < 1 || steps < 1)
    fail(ErrorKind::InvalidArgument, "simulate_ensemble: need paths >= 1 and steps >= 1");
  const FilterSampler sampler(filter, x0);
  PathEnsemble out;
  out.dt = filter.dt;
  out.steps = steps;
  out.paths = paths;
  out.x0 = x0;
  out.master_seed = master_seed;
  out.diffusion = filter.diffusion;
  out.values.resize(paths * (steps + 1));
  parallel_for(paths, workers, [&](std::size_t i) {
    FilterSampler::Path path(sampler, master_seed, i);
    double* row = out.values.data() + i * (steps + 1);
    row[0] = x0;
    for (std::size_t k = 1; k <= steps; ++k) row[k] = path.advance();
  });
  return out;
}

PathEnsemble simulate_oracle_cholesky(const std::function<double(double)>& gamma, double x0,
                                      double dt, std::size_t steps, std::size_t paths,
                                      std::uint64_t master_seed) {
  if (steps < 1 || steps > 2000)
    fail(ErrorKind::InvalidArgument, "cholesky oracle: steps must be in [1, 2000]");
  if (paths < 1) fail(ErrorKind::InvalidArgument, "cholesky oracle: need paths >= 1");
  if (!(dt > 0.0)) fail(ErrorKind::InvalidArgument, "cholesky oracle: dt must be > 0");
  const auto m = Eigen::Index(steps);
  Eigen::VectorXd lag(m + 1);
  for (Eigen::Index k = 0; k <= m; ++k) lag(k) = gamma(double(k) * dt);
  Eigen::VectorXd mean(m);
  Eigen::MatrixXd cov(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    mean(i) = lag(i + 1) * x0;
    for (Eigen::Index j = 0; j < m; ++j)
      cov(i, j) = lag(std::abs(i - j)) - lag(i + 1) * lag(j + 1);
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    fail(ErrorKind::NotPositiveDefinite, "cholesky oracle: conditional covariance is not positive definite");
  const Eigen::MatrixXd factor = llt.matrixL();

  PathEnsemble out;
  out.dt = dt;
  out.steps = steps;
  out.paths = paths;
  out.x0 = x0;
  out.master_seed = master_seed;
  out.values.resize(paths * (steps + 1));
  Eigen::VectorXd z(m);
  for (std::size_t p = 0; p < paths; ++p) {
    std::mt19937_64 engine = path_engine(master_seed, p, kPathStream);
    std::normal_distribution<double> normal;
    for (Eigen::Index i = 0; i < m; ++i) z(i) = normal(engine);
    const Eigen::VectorXd x = mean + factor * z;
    double* row = out.values.data() + p * (steps + 1);
    row[0] = x0;
    for (Eigen::Index i = 0; i < m; ++i) row[i + 1] = x(i);
  }
  return out;
}

void PathEnsemble::write_csv(std::ostream& os, std::size_t max_values) const {
  if (values.size() > max_values)
    fail(ErrorKind::InvalidArgument,
         fmt::format("path dump of {} values exceeds the limit of {}", values.size(), max_values));
  for (std::size_t i = 0; i < paths; ++i) {
    const auto row = path(i);
    for (std::size_t k = 0; k < row.size(); ++k)
      fmt::print(os, "{}{:.17g}", k == 0 ? "" : ",", row[k]);
    os << '\n';
  }
}

}  // namespace fptlab
