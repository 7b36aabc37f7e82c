#include "bcgwr/rjmcmc.hpp"

#include <stdexcept>

namespace bcgwr {

double masked_log_likelihood(std::span<const double> y,
                             const std::vector<std::vector<double>>& x_columns,
                             std::span<const double> beta_s,
                             std::span<const std::uint8_t> gamma_s, double sigma2_s,
                             std::span<const double> weights) {
  if (gamma_s.size() != beta_s.size())
    throw std::invalid_argument("masked_log_likelihood: gamma length");
  std::vector<double> masked(beta_s.size());
  for (size_t j = 0; j < beta_s.size(); ++j) masked[j] = gamma_s[j] ? beta_s[j] : 0.0;
  return local_log_likelihood(y, x_columns, masked, sigma2_s, weights);
}

SelectionDraws run_rjmcmc(const RegressionData& data, const DistanceMatrix& distances,
                          const KernelSpec& kernel, const BgwrConfig& config) {
  BgwrSampler sampler(data, distances, kernel, config, /*selection=*/true);
  const int S = sampler.num_regions();
  const int p = sampler.num_coefficients();
  const int retained = (config.iterations - config.burn_in) / config.thin;

  SelectionDraws draws;
  draws.num_regions = S;
  draws.num_coefficients = p;
  draws.config = config;
  draws.beta.reserve(static_cast<size_t>(retained) * S * p);
  draws.gamma.reserve(static_cast<size_t>(retained) * S * p);
  draws.sigma2.reserve(static_cast<size_t>(retained) * S);
  draws.psi.reserve(static_cast<size_t>(retained) * p);

  for (int iter = 0; iter < config.iterations; ++iter) {
    sampler.sweep(iter);
    if (iter >= config.burn_in && (iter - config.burn_in + 1) % config.thin == 0) {
      const BgwrState& st = sampler.state();
      draws.beta.insert(draws.beta.end(), st.beta.begin(), st.beta.end());
      draws.sigma2.insert(draws.sigma2.end(), st.sigma2.begin(), st.sigma2.end());
      draws.sigma2_beta.push_back(st.sigma2_beta);
      draws.bandwidth.push_back(st.bandwidth);
      draws.gamma.insert(draws.gamma.end(), sampler.gamma().begin(), sampler.gamma().end());
      draws.psi.insert(draws.psi.end(), sampler.psi().begin(), sampler.psi().end());
    }
  }
  draws.acceptance = sampler.acceptance_rates();
  return draws;
}

InclusionSummary inclusion_summary(const SelectionDraws& draws) {
  if (!draws.has_selection())
    throw std::invalid_argument("inclusion_summary: draws carry no selection indicators");
  const int M = draws.num_draws();
  const int S = draws.num_regions;
  const int p = draws.num_coefficients;
  InclusionSummary summary;
  summary.probability.assign(static_cast<size_t>(S) * p, 0.0);
  summary.conditional_mean.assign(static_cast<size_t>(S) * p, 0.0);
  summary.ever_included.assign(static_cast<size_t>(S) * p, 0);
  std::vector<long long> included(static_cast<size_t>(S) * p, 0);

  for (int m = 0; m < M; ++m) {
    for (int s = 0; s < S; ++s) {
      for (int j = 0; j < p; ++j) {
        const size_t idx = static_cast<size_t>(s) * p + j;
        if (draws.gamma_at(m, s, j)) {
          ++included[idx];
          summary.conditional_mean[idx] += draws.beta_at(m, s, j);
        }
      }
    }
  }
  for (size_t idx = 0; idx < included.size(); ++idx) {
    summary.probability[idx] = static_cast<double>(included[idx]) / M;
    if (included[idx] > 0) {
      summary.conditional_mean[idx] /= static_cast<double>(included[idx]);
      summary.ever_included[idx] = 1;
    }
  }
  return summary;
}

}  // namespace bcgwr
