#pragma once

#include <span>
#include <vector>

#include "bcgwr/bgwr.hpp"

namespace bcgwr {

// Reversible-jump variable selection layered on BGWR: per-(region,
// coefficient) inclusion indicators with Bernoulli(psi_j) priors, birth moves
// proposing coefficients from their prior, and conjugate Beta updates for psi.

// Retained selection draws reuse the PosteriorDraws layout with gamma/psi
// populated.
using SelectionDraws = PosteriorDraws;

// local_log_likelihood with the mean masked to x' (gamma .* beta).
double masked_log_likelihood(std::span<const double> y,
                             const std::vector<std::vector<double>>& x_columns,
                             std::span<const double> beta_s,
                             std::span<const std::uint8_t> gamma_s, double sigma2_s,
                             std::span<const double> weights);

SelectionDraws run_rjmcmc(const RegressionData& data, const DistanceMatrix& distances,
                          const KernelSpec& kernel, const BgwrConfig& config);

struct InclusionSummary {
  std::vector<double> probability;       // S*p, mean of gamma
  std::vector<double> conditional_mean;  // S*p, mean of beta over included draws
  std::vector<std::uint8_t> ever_included;  // S*p, 0 flags an undefined conditional mean
};

InclusionSummary inclusion_summary(const SelectionDraws& draws);

}  // namespace bcgwr
