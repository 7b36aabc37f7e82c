#include "bcgwr/bgwr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "bcgwr/simd.hpp"

namespace bcgwr {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_normal_density(double x, double variance) {
  return -0.5 * (kLog2Pi + std::log(variance)) - x * x / (2.0 * variance);
}
}  // namespace

void BgwrConfig::validate() const {
  if (iterations <= 0) throw std::invalid_argument("BgwrConfig: iterations must be positive");
  if (burn_in < 0 || burn_in >= iterations)
    throw std::invalid_argument("BgwrConfig: burn_in must be in [0, iterations)");
  if (thin < 1) throw std::invalid_argument("BgwrConfig: thin must be >= 1");
  if (beta_scale < 0 || sigma2_scale < 0 || sigma2_beta_scale < 0 || bandwidth_scale < 0)
    throw std::invalid_argument("BgwrConfig: proposal scales must be nonnegative");
  if (sigma2_shape <= 0 || sigma2_rate <= 0 || sigma2_beta_shape <= 0 || sigma2_beta_rate <= 0)
    throw std::invalid_argument("BgwrConfig: prior hyperparameters must be positive");
  if (init_sigma2 <= 0 || init_sigma2_beta <= 0)
    throw std::invalid_argument("BgwrConfig: initial variances must be positive");
}

double local_log_likelihood(std::span<const double> y,
                            const std::vector<std::vector<double>>& x_columns,
                            std::span<const double> beta_s, double sigma2_s,
                            std::span<const double> weights) {
  const size_t n = y.size();
  if (weights.size() != n) throw std::invalid_argument("local_log_likelihood: weights length");
  if (beta_s.size() != x_columns.size())
    throw std::invalid_argument("local_log_likelihood: beta length");
  for (const auto& col : x_columns)
    if (col.size() != n) throw std::invalid_argument("local_log_likelihood: column length");
  if (!(sigma2_s > 0.0)) throw std::domain_error("local_log_likelihood: sigma2 must be positive");

  std::vector<double> mu(n, 0.0);
  for (size_t j = 0; j < x_columns.size(); ++j)
    simd::axpy(beta_s[j], x_columns[j].data(), mu.data(), n);
  const double ssr = simd::weighted_ssr(weights.data(), y.data(), mu.data(), n);

  double m = 0.0, slogw = 0.0;
  for (size_t i = 0; i < n; ++i) {
    if (weights[i] > 0.0) {
      m += 1.0;
      slogw += std::log(weights[i]);
    }
  }
  return -0.5 * m * (kLog2Pi + std::log(sigma2_s)) + 0.5 * slogw - ssr / (2.0 * sigma2_s);
}

BgwrSampler::BgwrSampler(const RegressionData& data, const DistanceMatrix& distances,
                         const KernelSpec& kernel, const BgwrConfig& config, bool selection)
    : data_(data),
      distances_(distances),
      kernel_(kernel),
      config_(config),
      selection_(selection),
      S_(data.num_regions),
      n_(data.n()),
      p_(data.p()) {
  config_.validate();
  kernel_.validate();
  data_.validate();
  if (distances_.size != S_) throw std::invalid_argument("BgwrSampler: distance matrix size");
  if (S_ < 1) throw std::invalid_argument("BgwrSampler: no regions");

  state_.beta.assign(static_cast<size_t>(S_) * p_, 0.0);
  state_.sigma2.assign(S_, config_.init_sigma2);
  state_.sigma2_beta = config_.init_sigma2_beta;
  state_.bandwidth = config_.init_bandwidth > 0.0 ? config_.init_bandwidth
                                                  : 0.5 * kernel_.bandwidth_upper;
  if (state_.bandwidth >= kernel_.bandwidth_upper)
    throw std::invalid_argument("BgwrSampler: initial bandwidth must be below D");

  gamma_.assign(static_cast<size_t>(S_) * p_, 1);
  psi_.assign(p_, config_.fixed_psi >= 0.0 ? config_.fixed_psi : 0.5);

  beta_scale_ = config_.beta_scale;
  sigma2_scale_ = config_.sigma2_scale;
  sigma2_beta_scale_ = config_.sigma2_beta_scale;
  bandwidth_scale_ = config_.bandwidth_scale;

  regions_.resize(S_);
  scratch_w_.resize(n_);
  scratch_r_.resize(n_);
  refresh_caches();
}

void BgwrSampler::compute_region_weights(double b, int s, std::vector<double>& w, double& count,
                                         double& slogw) const {
  w.resize(n_);
  count = 0.0;
  slogw = 0.0;
  for (int i = 0; i < n_; ++i) {
    const double weight = kernel_weight(kernel_.kind, distances_(data_.obs_region[i], s), b);
    w[i] = weight;
    if (weight > 0.0) {
      count += 1.0;
      slogw += std::log(weight);
    }
  }
}

double BgwrSampler::region_loglik(const RegionCache& c, double sigma2) const {
  return -0.5 * c.positive_count * (kLog2Pi + std::log(sigma2)) + 0.5 * c.sum_log_w -
         c.ssr / (2.0 * sigma2);
}

void BgwrSampler::refresh_caches() {
  for (int s = 0; s < S_; ++s) {
    RegionCache& c = regions_[s];
    compute_region_weights(state_.bandwidth, s, c.weights, c.positive_count, c.sum_log_w);
    if (c.positive_count == 0.0)
      throw std::runtime_error("region " + std::to_string(s) +
                               " has no positively weighted observations at the current "
                               "bandwidth; widen the bandwidth prior or change the kernel");
    c.residual = data_.y;
    for (int j = 0; j < p_; ++j) {
      const double coef = gamma_[static_cast<size_t>(s) * p_ + j]
                              ? state_.beta[static_cast<size_t>(s) * p_ + j]
                              : 0.0;
      if (coef != 0.0) simd::axpy(-coef, data_.x_columns[j].data(), c.residual.data(), n_);
    }
    c.ssr = simd::weighted_sq(c.weights.data(), c.residual.data(), n_);
    c.loglik = region_loglik(c, state_.sigma2[s]);
  }
}

double BgwrSampler::log_prior_sigma2(double v) const {
  return -(config_.sigma2_shape + 1.0) * std::log(v) - config_.sigma2_rate / v;
}

double BgwrSampler::log_prior_sigma2_beta(double v) const {
  return -(config_.sigma2_beta_shape + 1.0) * std::log(v) - config_.sigma2_beta_rate / v;
}

void BgwrSampler::update_beta(int s, int /*iter*/, Rng& rng) {
  RegionCache& c = regions_[s];
  const double sigma2 = state_.sigma2[s];
  for (int j = 0; j < p_; ++j) {
    if (selection_ && !gamma_[static_cast<size_t>(s) * p_ + j]) continue;
    double& beta = state_.beta[static_cast<size_t>(s) * p_ + j];
    const double step = beta_scale_ * rng.normal();
    const double proposed = beta + step;
    const double ssr_new =
        simd::weighted_ssr_shift(c.weights.data(), c.residual.data(),
                                 data_.x_columns[j].data(), step, n_);
    const double log_ratio = -(ssr_new - c.ssr) / (2.0 * sigma2) +
                             log_normal_density(proposed, state_.sigma2_beta) -
                             log_normal_density(beta, state_.sigma2_beta);
    ++beta_counter_.proposed;
    ++beta_counter_.window_proposed;
    const double u = rng.uniform();
    if (std::isfinite(log_ratio) && std::log(u) < log_ratio) {
      beta = proposed;
      simd::axpy(-step, data_.x_columns[j].data(), c.residual.data(), n_);
      c.ssr = ssr_new;
      c.loglik = region_loglik(c, sigma2);
      ++beta_counter_.accepted;
      ++beta_counter_.window_accepted;
    }
  }
}

void BgwrSampler::update_sigma2(int s, Rng& rng) {
  RegionCache& c = regions_[s];
  double& sigma2 = state_.sigma2[s];
  const double log_current = std::log(sigma2);
  const double log_proposed = log_current + sigma2_scale_ * rng.normal();
  const double proposed = std::exp(log_proposed);
  // log-scale walk: the change-of-variables term is (log_proposed - log_current)
  const double log_ratio = -0.5 * c.positive_count * (log_proposed - log_current) -
                           0.5 * c.ssr * (1.0 / proposed - 1.0 / sigma2) +
                           log_prior_sigma2(proposed) - log_prior_sigma2(sigma2) +
                           (log_proposed - log_current);
  ++sigma2_counter_.proposed;
  ++sigma2_counter_.window_proposed;
  const double u = rng.uniform();
  if (std::isfinite(log_ratio) && std::log(u) < log_ratio) {
    sigma2 = proposed;
    c.loglik = region_loglik(c, sigma2);
    ++sigma2_counter_.accepted;
    ++sigma2_counter_.window_accepted;
  }
}

void BgwrSampler::update_sigma2_beta(Rng& rng) {
  double count = 0.0;
  double sum_sq = 0.0;
  for (int s = 0; s < S_; ++s) {
    for (int j = 0; j < p_; ++j) {
      const size_t idx = static_cast<size_t>(s) * p_ + j;
      if (selection_ && !gamma_[idx]) continue;  // pooled over included coefficients
      count += 1.0;
      sum_sq += state_.beta[idx] * state_.beta[idx];
    }
  }
  const double log_current = std::log(state_.sigma2_beta);
  const double log_proposed = log_current + sigma2_beta_scale_ * rng.normal();
  const double proposed = std::exp(log_proposed);
  const double log_ratio =
      -0.5 * count * (log_proposed - log_current) -
      0.5 * sum_sq * (1.0 / proposed - 1.0 / state_.sigma2_beta) +
      log_prior_sigma2_beta(proposed) - log_prior_sigma2_beta(state_.sigma2_beta) +
      (log_proposed - log_current);
  ++sigma2_beta_counter_.proposed;
  ++sigma2_beta_counter_.window_proposed;
  const double u = rng.uniform();
  if (std::isfinite(log_ratio) && std::log(u) < log_ratio) {
    state_.sigma2_beta = proposed;
    ++sigma2_beta_counter_.accepted;
    ++sigma2_beta_counter_.window_accepted;
  }
}

void BgwrSampler::update_bandwidth(Rng& rng) {
  const double D = kernel_.bandwidth_upper;
  double proposed = state_.bandwidth + rng.uniform(-bandwidth_scale_, bandwidth_scale_);
  // reflect into (0, D); symmetric, so no proposal correction
  for (int guard = 0; guard < 64 && (proposed <= 0.0 || proposed >= D); ++guard) {
    if (proposed <= 0.0) proposed = -proposed;
    if (proposed >= D) proposed = 2.0 * D - proposed;
  }
  ++bandwidth_counter_.proposed;
  ++bandwidth_counter_.window_proposed;
  if (proposed <= 0.0 || proposed >= D) return;

  static thread_local std::vector<double> cand_count, cand_slogw, cand_ssr;
  static thread_local std::vector<std::vector<double>> cand_w;
  cand_count.assign(S_, 0.0);
  cand_slogw.assign(S_, 0.0);
  cand_ssr.assign(S_, 0.0);
  cand_w.resize(S_);

  double log_ratio = 0.0;
  for (int s = 0; s < S_; ++s) {
    compute_region_weights(proposed, s, cand_w[s], cand_count[s], cand_slogw[s]);
    if (cand_count[s] == 0.0) {
      log_ratio = kNegInf;
      break;
    }
    cand_ssr[s] = simd::weighted_sq(cand_w[s].data(), regions_[s].residual.data(), n_);
    const RegionCache& c = regions_[s];
    const double ll_new = -0.5 * cand_count[s] * (kLog2Pi + std::log(state_.sigma2[s])) +
                          0.5 * cand_slogw[s] - cand_ssr[s] / (2.0 * state_.sigma2[s]);
    log_ratio += ll_new - c.loglik;
  }

  const double u = rng.uniform();
  if (std::isfinite(log_ratio) && std::log(u) < log_ratio) {
    state_.bandwidth = proposed;
    for (int s = 0; s < S_; ++s) {
      RegionCache& c = regions_[s];
      c.weights.swap(cand_w[s]);
      c.positive_count = cand_count[s];
      c.sum_log_w = cand_slogw[s];
      c.ssr = cand_ssr[s];
      c.loglik = region_loglik(c, state_.sigma2[s]);
    }
    ++bandwidth_counter_.accepted;
    ++bandwidth_counter_.window_accepted;
  }
}

void BgwrSampler::update_toggles(int s, Rng& rng) {
  const int j = static_cast<int>(rng.uniform_index(p_));
  const size_t idx = static_cast<size_t>(s) * p_ + j;
  RegionCache& c = regions_[s];
  const double sigma2 = state_.sigma2[s];
  const double psi = psi_[j];
  ++toggle_counter_.proposed;
  ++toggle_counter_.window_proposed;

  if (!gamma_[idx]) {
    // birth: propose the new coefficient from its prior, so the prior and
    // proposal densities cancel and the Jacobian is 1
    const double proposed = rng.normal(0.0, std::sqrt(state_.sigma2_beta));
    const double ssr_new = simd::weighted_ssr_shift(c.weights.data(), c.residual.data(),
                                                    data_.x_columns[j].data(), proposed, n_);
    const double log_ratio =
        -(ssr_new - c.ssr) / (2.0 * sigma2) + std::log(psi) - std::log1p(-psi);
    const double u = rng.uniform();
    if (std::isfinite(log_ratio) && std::log(u) < log_ratio) {
      gamma_[idx] = 1;
      state_.beta[idx] = proposed;
      simd::axpy(-proposed, data_.x_columns[j].data(), c.residual.data(), n_);
      c.ssr = ssr_new;
      c.loglik = region_loglik(c, sigma2);
      ++toggle_counter_.accepted;
      ++toggle_counter_.window_accepted;
    }
  } else {
    const double current = state_.beta[idx];
    const double ssr_new = simd::weighted_ssr_shift(c.weights.data(), c.residual.data(),
                                                    data_.x_columns[j].data(), -current, n_);
    const double log_ratio =
        -(ssr_new - c.ssr) / (2.0 * sigma2) + std::log1p(-psi) - std::log(psi);
    const double u = rng.uniform();
    if (std::isfinite(log_ratio) && std::log(u) < log_ratio) {
      gamma_[idx] = 0;
      state_.beta[idx] = 0.0;  // excluded coefficients carry no value
      simd::axpy(current, data_.x_columns[j].data(), c.residual.data(), n_);
      c.ssr = ssr_new;
      c.loglik = region_loglik(c, sigma2);
      ++toggle_counter_.accepted;
      ++toggle_counter_.window_accepted;
    }
  }
}

void BgwrSampler::update_psi(Rng& rng) {
  if (config_.fixed_psi >= 0.0) {
    psi_.assign(p_, config_.fixed_psi);
    return;
  }
  for (int j = 0; j < p_; ++j) {
    int included = 0;
    for (int s = 0; s < S_; ++s) included += gamma_[static_cast<size_t>(s) * p_ + j];
    psi_[j] = rng.beta(1.0 + included, 1.0 + S_ - included);
  }
}

void BgwrSampler::adapt(int iter) {
  if (!config_.adapt_scales) return;
  const int freeze = config_.burn_in / 2;
  if (iter >= freeze) return;
  if ((iter + 1) % 50 != 0) return;
  auto tune = [](Counter& counter, double& scale, double max_scale) {
    if (counter.window_proposed == 0) return;
    const double rate =
        static_cast<double>(counter.window_accepted) / counter.window_proposed;
    if (rate > 0.5) scale = std::min(scale * 1.3, max_scale);
    if (rate < 0.2) scale /= 1.3;
    counter.window_accepted = 0;
    counter.window_proposed = 0;
  };
  constexpr double kBig = 1e12;
  if (config_.beta_scale > 0) tune(beta_counter_, beta_scale_, kBig);
  if (config_.sigma2_scale > 0) tune(sigma2_counter_, sigma2_scale_, kBig);
  if (config_.sigma2_beta_scale > 0) tune(sigma2_beta_counter_, sigma2_beta_scale_, kBig);
  if (config_.bandwidth_scale > 0)
    tune(bandwidth_counter_, bandwidth_scale_, kernel_.bandwidth_upper);
}

void BgwrSampler::sweep(int iter) {
  for (int s = 0; s < S_; ++s) {
    Rng rng(config_.seed, static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(iter));
    if (config_.beta_scale > 0) update_beta(s, iter, rng);
    if (config_.sigma2_scale > 0) update_sigma2(s, rng);
    if (selection_) update_toggles(s, rng);
  }
  if (config_.sigma2_beta_scale > 0) {
    Rng rng(config_.seed, static_cast<std::uint64_t>(S_), static_cast<std::uint64_t>(iter));
    update_sigma2_beta(rng);
  }
  if (config_.bandwidth_scale > 0) {
    Rng rng(config_.seed, static_cast<std::uint64_t>(S_) + 1, static_cast<std::uint64_t>(iter));
    update_bandwidth(rng);
  }
  if (selection_) {
    Rng rng(config_.seed, static_cast<std::uint64_t>(S_) + 2, static_cast<std::uint64_t>(iter));
    update_psi(rng);
  }
  adapt(iter);
}

AcceptanceReport BgwrSampler::acceptance_rates() const {
  auto rate = [](const Counter& c) {
    return c.proposed > 0 ? static_cast<double>(c.accepted) / c.proposed : 1.0;
  };
  AcceptanceReport report;
  report.beta = rate(beta_counter_);
  report.sigma2 = rate(sigma2_counter_);
  report.sigma2_beta = rate(sigma2_beta_counter_);
  report.bandwidth = rate(bandwidth_counter_);
  report.toggle = rate(toggle_counter_);
  return report;
}

double BgwrSampler::total_log_likelihood() const {
  double total = 0.0;
  for (const auto& c : regions_) total += c.loglik;
  return total;
}

PosteriorDraws run_bgwr(const RegressionData& data, const DistanceMatrix& distances,
                        const KernelSpec& kernel, const BgwrConfig& config) {
  BgwrSampler sampler(data, distances, kernel, config);
  const int S = sampler.num_regions();
  const int p = sampler.num_coefficients();
  const int retained = (config.iterations - config.burn_in) / config.thin;

  PosteriorDraws draws;
  draws.num_regions = S;
  draws.num_coefficients = p;
  draws.config = config;
  draws.beta.reserve(static_cast<size_t>(retained) * S * p);
  draws.sigma2.reserve(static_cast<size_t>(retained) * S);
  draws.sigma2_beta.reserve(retained);
  draws.bandwidth.reserve(retained);

  for (int iter = 0; iter < config.iterations; ++iter) {
    sampler.sweep(iter);
    if (iter >= config.burn_in && (iter - config.burn_in + 1) % config.thin == 0) {
      const BgwrState& st = sampler.state();
      draws.beta.insert(draws.beta.end(), st.beta.begin(), st.beta.end());
      draws.sigma2.insert(draws.sigma2.end(), st.sigma2.begin(), st.sigma2.end());
      draws.sigma2_beta.push_back(st.sigma2_beta);
      draws.bandwidth.push_back(st.bandwidth);
    }
  }
  draws.acceptance = sampler.acceptance_rates();
  return draws;
}

double empirical_quantile(std::vector<double> xs, double prob) {
  if (xs.empty()) throw std::invalid_argument("empirical_quantile: empty input");
  std::sort(xs.begin(), xs.end());
  const double h = (static_cast<double>(xs.size()) - 1.0) * prob;
  const size_t lo = static_cast<size_t>(std::floor(h));
  const size_t hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (h - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

std::vector<CoefficientSummary> posterior_summary(const PosteriorDraws& draws) {
  const int M = draws.num_draws();
  if (M < 2) throw std::invalid_argument("posterior_summary: needs at least 2 draws");
  const int S = draws.num_regions;
  const int p = draws.num_coefficients;
  std::vector<CoefficientSummary> out(static_cast<size_t>(S) * p);
  std::vector<double> series(M);
  for (int s = 0; s < S; ++s) {
    for (int j = 0; j < p; ++j) {
      for (int m = 0; m < M; ++m) series[m] = draws.beta_at(m, s, j);
      const double mean = std::accumulate(series.begin(), series.end(), 0.0) / M;
      double var = 0.0;
      for (double v : series) var += (v - mean) * (v - mean);
      var /= (M - 1);
      CoefficientSummary& cs = out[static_cast<size_t>(s) * p + j];
      cs.mean = mean;
      cs.sd = std::sqrt(var);
      cs.lower95 = empirical_quantile(series, 0.025);
      cs.upper95 = empirical_quantile(series, 0.975);
    }
  }
  return out;
}

ReplicationMetrics replication_metrics(const std::vector<std::vector<double>>& means,
                                       const std::vector<std::vector<double>>& sds,
                                       const std::vector<double>& true_beta) {
  if (means.empty()) throw std::invalid_argument("replication_metrics: no replicates");
  if (means.size() != sds.size())
    throw std::invalid_argument("replication_metrics: means/sds size mismatch");
  const size_t p = true_beta.size();
  for (const auto& row : means)
    if (row.size() != p) throw std::invalid_argument("replication_metrics: row width mismatch");
  for (const auto& row : sds)
    if (row.size() != p) throw std::invalid_argument("replication_metrics: row width mismatch");

  ReplicationMetrics metrics;
  metrics.mab.assign(p, 0.0);
  metrics.msd.assign(p, 0.0);
  metrics.mmse.assign(p, 0.0);
  const double R = static_cast<double>(means.size());
  for (size_t r = 0; r < means.size(); ++r) {
    for (size_t j = 0; j < p; ++j) {
      const double err = means[r][j] - true_beta[j];
      metrics.mab[j] += std::abs(err) / R;
      metrics.mmse[j] += err * err / R;
      metrics.msd[j] += sds[r][j] / R;
    }
  }
  return metrics;
}

std::vector<double> exceedance_matrix(const PosteriorDraws& draws, int coefficient,
                                      const std::vector<int>& regions) {
  const int M = draws.num_draws();
  if (M == 0) throw std::invalid_argument("exceedance_matrix: no draws");
  if (coefficient < 0 || coefficient >= draws.num_coefficients)
    throw std::out_of_range("exceedance_matrix: coefficient index");
  for (int r : regions)
    if (r < 0 || r >= draws.num_regions) throw std::out_of_range("exceedance_matrix: region");
  const size_t K = regions.size();
  std::vector<double> out(K * K, 0.0);
  for (int m = 0; m < M; ++m) {
    for (size_t a = 0; a < K; ++a) {
      const double va = draws.beta_at(m, regions[a], coefficient);
      for (size_t b = 0; b < K; ++b) {
        if (a == b) continue;
        if (va > draws.beta_at(m, regions[b], coefficient)) out[a * K + b] += 1.0;
      }
    }
  }
  for (double& v : out) v /= M;
  return out;
}

std::vector<double> prob_exceed_own_mean(const PosteriorDraws& draws, int coefficient) {
  const int M = draws.num_draws();
  if (M == 0) throw std::invalid_argument("prob_exceed_own_mean: no draws");
  if (coefficient < 0 || coefficient >= draws.num_coefficients)
    throw std::out_of_range("prob_exceed_own_mean: coefficient index");
  const int S = draws.num_regions;
  std::vector<double> mean(S, 0.0), out(S, 0.0);
  for (int m = 0; m < M; ++m)
    for (int s = 0; s < S; ++s) mean[s] += draws.beta_at(m, s, coefficient) / M;
  for (int m = 0; m < M; ++m)
    for (int s = 0; s < S; ++s)
      if (draws.beta_at(m, s, coefficient) > mean[s]) out[s] += 1.0 / M;
  return out;
}

std::vector<double> top_k_probability(const PosteriorDraws& draws, int coefficient, int k) {
  const int M = draws.num_draws();
  const int S = draws.num_regions;
  if (M == 0) throw std::invalid_argument("top_k_probability: no draws");
  if (k <= 0 || k > S) throw std::domain_error("top_k_probability: k must be in [1, S]");
  if (coefficient < 0 || coefficient >= draws.num_coefficients)
    throw std::out_of_range("top_k_probability: coefficient index");
  std::vector<double> out(S, 0.0);
  std::vector<int> order(S);
  for (int m = 0; m < M; ++m) {
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](int a, int b) {
      const double va = draws.beta_at(m, a, coefficient);
      const double vb = draws.beta_at(m, b, coefficient);
      if (va != vb) return va > vb;
      return a < b;  // deterministic tie break
    });
    for (int i = 0; i < k; ++i) out[order[i]] += 1.0 / M;
  }
  return out;
}

}  // namespace bcgwr
