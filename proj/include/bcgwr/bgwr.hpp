#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bcgwr/data.hpp"
#include "bcgwr/geometry.hpp"
#include "bcgwr/kernels.hpp"
#include "bcgwr/rng.hpp"

namespace bcgwr {

// Priors, chain length, and random-walk proposal scales for the sampler.
struct BgwrConfig {
  double sigma2_shape = 1.0;       // alpha_1 of IGamma prior on sigma^2(s)
  double sigma2_rate = 1.0;        // alpha_2
  double sigma2_beta_shape = 1.0;  // alpha of IGamma prior on sigma^2_beta
  double sigma2_beta_rate = 1.0;   // beta

  int iterations = 10000;
  int burn_in = 2000;
  int thin = 1;

  // Random-walk scales: beta is additive, the variances walk in log space,
  // the bandwidth walks additively with reflection into (0, D). A zero scale
  // pins the block at its initial value.
  double beta_scale = 0.1;
  double sigma2_scale = 0.4;
  double sigma2_beta_scale = 0.4;
  double bandwidth_scale = 5.0;
  // Scales adapt toward 20-50% acceptance until burn_in/2, then freeze, so
  // the retained chain has a fixed transition kernel.
  bool adapt_scales = true;

  std::uint64_t seed = 0;

  // Diagnostic: pin every psi_j at this value instead of the conjugate Beta
  // update (selection runs only); negative disables.
  double fixed_psi = -1.0;

  double init_sigma2 = 1.0;
  double init_sigma2_beta = 1.0;
  double init_bandwidth = -1.0;  // <=0 means D/2

  void validate() const;
};

// Full parameter state of the model at one iteration.
struct BgwrState {
  std::vector<double> beta;    // S*p row-major: beta[s*p + j]
  std::vector<double> sigma2;  // length S
  double sigma2_beta = 1.0;
  double bandwidth = 1.0;
};

struct AcceptanceReport {
  double beta = 0.0;
  double sigma2 = 0.0;
  double sigma2_beta = 0.0;
  double bandwidth = 0.0;
  double toggle = 0.0;  // reversible-jump birth/death moves, when enabled
};

// Retained post-burn-in, post-thin draws; gamma/psi are filled only by the
// reversible-jump sampler.
struct PosteriorDraws {
  int num_regions = 0;
  int num_coefficients = 0;
  std::vector<double> beta;          // M*S*p
  std::vector<double> sigma2;        // M*S
  std::vector<double> sigma2_beta;   // M
  std::vector<double> bandwidth;     // M
  std::vector<std::uint8_t> gamma;   // M*S*p (empty for plain BGWR)
  std::vector<double> psi;           // M*p (empty for plain BGWR)
  AcceptanceReport acceptance;
  BgwrConfig config;

  int num_draws() const { return static_cast<int>(bandwidth.size()); }
  bool has_selection() const { return !gamma.empty(); }
  double beta_at(int m, int s, int j) const {
    return beta[(static_cast<size_t>(m) * num_regions + s) * num_coefficients + j];
  }
  std::uint8_t gamma_at(int m, int s, int j) const {
    return gamma[(static_cast<size_t>(m) * num_regions + s) * num_coefficients + j];
  }
};

// Log-likelihood of one region's local model: observations are independent
// Gaussians with mean x_i' beta and variance sigma^2 / w_i; zero-weight
// observations drop out entirely.
double local_log_likelihood(std::span<const double> y,
                            const std::vector<std::vector<double>>& x_columns,
                            std::span<const double> beta_s, double sigma2_s,
                            std::span<const double> weights);

// The MH engine. Exposed as a class so tests can drive single sweeps; most
// callers use run_bgwr / run_rjmcmc.
class BgwrSampler {
 public:
  // selection=true layers reversible-jump inclusion moves on top of the
  // within-model updates.
  BgwrSampler(const RegressionData& data, const DistanceMatrix& distances,
              const KernelSpec& kernel, const BgwrConfig& config, bool selection = false);

  // One full MH sweep for iteration index `iter` (drives the RNG streams).
  void sweep(int iter);

  const BgwrState& state() const { return state_; }
  BgwrState& mutable_state() { return state_; }
  const std::vector<std::uint8_t>& gamma() const { return gamma_; }
  const std::vector<double>& psi() const { return psi_; }
  AcceptanceReport acceptance_rates() const;
  double total_log_likelihood() const;

  // Re-derives weights, residuals, and cached likelihood terms from the
  // current state; call after mutating the state externally.
  void refresh_caches();

  int num_regions() const { return S_; }
  int num_coefficients() const { return p_; }

 private:
  struct RegionCache {
    std::vector<double> weights;   // n
    std::vector<double> residual;  // n: y - X (gamma .* beta_s)
    double positive_count = 0.0;   // observations with w > 0
    double sum_log_w = 0.0;
    double ssr = 0.0;  // sum w * r^2
    double loglik = 0.0;
  };

  double region_loglik(const RegionCache& c, double sigma2) const;
  void update_beta(int s, int iter, Rng& rng);
  void update_sigma2(int s, Rng& rng);
  void update_sigma2_beta(Rng& rng);
  void update_bandwidth(Rng& rng);
  void update_toggles(int s, Rng& rng);
  void update_psi(Rng& rng);
  void adapt(int iter);
  void compute_region_weights(double b, int s, std::vector<double>& w, double& count,
                              double& slogw) const;
  double log_prior_sigma2(double v) const;
  double log_prior_sigma2_beta(double v) const;

  const RegressionData& data_;
  const DistanceMatrix& distances_;
  KernelSpec kernel_;
  BgwrConfig config_;
  bool selection_;
  int S_, n_, p_;

  BgwrState state_;
  std::vector<std::uint8_t> gamma_;  // S*p
  std::vector<double> psi_;          // p
  std::vector<RegionCache> regions_;

  double beta_scale_, sigma2_scale_, sigma2_beta_scale_, bandwidth_scale_;

  struct Counter {
    long long accepted = 0, proposed = 0;
    long long window_accepted = 0, window_proposed = 0;
  };
  Counter beta_counter_, sigma2_counter_, sigma2_beta_counter_, bandwidth_counter_,
      toggle_counter_;

  // scratch buffers reused across proposals
  mutable std::vector<double> scratch_w_;
  mutable std::vector<double> scratch_r_;
};

PosteriorDraws run_bgwr(const RegressionData& data, const DistanceMatrix& distances,
                        const KernelSpec& kernel, const BgwrConfig& config);

// Per-(region, coefficient) posterior summary.
struct CoefficientSummary {
  double mean = 0.0;
  double sd = 0.0;
  double lower95 = 0.0;  // 2.5% quantile
  double upper95 = 0.0;  // 97.5% quantile
};

// Type-7 (linear interpolation) empirical quantile of a copy of xs.
double empirical_quantile(std::vector<double> xs, double prob);

// S*p row-major summaries; needs >= 2 draws.
std::vector<CoefficientSummary> posterior_summary(const PosteriorDraws& draws);

struct ReplicationMetrics {
  std::vector<double> mab;   // mean |estimate - truth| per coefficient
  std::vector<double> msd;   // mean posterior sd
  std::vector<double> mmse;  // mean squared error
};

// means/sds are R x p row-major (one row per replicate).
ReplicationMetrics replication_metrics(const std::vector<std::vector<double>>& means,
                                       const std::vector<std::vector<double>>& sds,
                                       const std::vector<double>& true_beta);

// Pr(beta_j(k) > beta_j(q)) over draws, for a subset of regions; zero diagonal.
std::vector<double> exceedance_matrix(const PosteriorDraws& draws, int coefficient,
                                      const std::vector<int>& regions);

// Per-region fraction of draws strictly above that region's posterior mean.
std::vector<double> prob_exceed_own_mean(const PosteriorDraws& draws, int coefficient);

// Per-region probability of ranking among the k largest coefficients in a draw.
std::vector<double> top_k_probability(const PosteriorDraws& draws, int coefficient, int k);

}  // namespace bcgwr
