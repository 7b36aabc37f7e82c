#include "bcgwr/assessment.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace bcgwr {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

// Log-density of observation i under its own region's local model for the
// given parameter values: N(y_i | x_i' beta(r_i), sigma^2(r_i) / w_i) with
// w_i the kernel weight of obs i in its own region. Zero weight drops the
// observation (contributes 0).
double obs_loglik(const RegressionData& data, const DistanceMatrix& distances,
                  const KernelSpec& kernel, int i, const double* beta, const double* sigma2,
                  double bandwidth) {
  const int s = data.obs_region[i];
  const double d = distances(s, s);
  const double w = kernel_weight(kernel.kind, d, bandwidth);
  if (w <= 0.0) return 0.0;
  const int p = data.p();
  double mu = 0.0;
  const double* bs = beta + static_cast<size_t>(s) * p;
  for (int j = 0; j < p; ++j) mu += data.x_columns[j][i] * bs[j];
  const double r = data.y[i] - mu;
  const double v = sigma2[s] / w;
  return -0.5 * (kLog2Pi + std::log(v)) - r * r / (2.0 * v);
}

// M x n pointwise log-likelihoods plus the posterior-mean parameter set.
struct Pointwise {
  std::vector<double> ll;  // M*n
  std::vector<double> mean_beta;
  std::vector<double> mean_sigma2;
  double mean_bandwidth = 0.0;
};

Pointwise pointwise_loglik(const PosteriorDraws& draws, const RegressionData& data,
                           const DistanceMatrix& distances, const KernelSpec& kernel) {
  const int M = draws.num_draws();
  if (M < 2) throw std::invalid_argument("assessment: need at least 2 retained draws");
  const int S = draws.num_regions;
  const int p = draws.num_coefficients;
  const int n = data.n();
  if (S != data.num_regions || p != data.p())
    throw std::invalid_argument("assessment: draws do not match data dimensions");

  Pointwise out;
  out.ll.resize(static_cast<size_t>(M) * n);
  out.mean_beta.assign(static_cast<size_t>(S) * p, 0.0);
  out.mean_sigma2.assign(S, 0.0);

  std::vector<double> beta_m(static_cast<size_t>(S) * p);
  for (int m = 0; m < M; ++m) {
    const double* b = draws.beta.data() + static_cast<size_t>(m) * S * p;
    const double* s2 = draws.sigma2.data() + static_cast<size_t>(m) * S;
    if (draws.has_selection()) {
      // Model-averaged density: excluded coefficients contribute 0.
      const std::uint8_t* g = draws.gamma.data() + static_cast<size_t>(m) * S * p;
      for (size_t k = 0; k < beta_m.size(); ++k) beta_m[k] = g[k] ? b[k] : 0.0;
      b = beta_m.data();
    }
    const double bw = draws.bandwidth[m];
    for (int i = 0; i < n; ++i)
      out.ll[static_cast<size_t>(m) * n + i] = obs_loglik(data, distances, kernel, i, b, s2, bw);
    for (size_t k = 0; k < out.mean_beta.size(); ++k) out.mean_beta[k] += b[k];
    for (int s = 0; s < S; ++s) out.mean_sigma2[s] += s2[s];
    out.mean_bandwidth += bw;
  }
  for (double& v : out.mean_beta) v /= M;
  for (double& v : out.mean_sigma2) v /= M;
  out.mean_bandwidth /= M;
  return out;
}

}  // namespace

std::pair<double, double> waic(const PosteriorDraws& draws, const RegressionData& data,
                               const DistanceMatrix& distances, const KernelSpec& kernel,
                               bool use_lppd) {
  const Pointwise pw = pointwise_loglik(draws, data, distances, kernel);
  const int M = draws.num_draws();
  const int n = data.n();

  double fit_term = 0.0;
  if (use_lppd) {
    // lppd_i = log( mean_m exp(ll_im) ), stabilized by the per-obs max.
    for (int i = 0; i < n; ++i) {
      double mx = pw.ll[i];
      for (int m = 1; m < M; ++m) mx = std::max(mx, pw.ll[static_cast<size_t>(m) * n + i]);
      double acc = 0.0;
      for (int m = 0; m < M; ++m) acc += std::exp(pw.ll[static_cast<size_t>(m) * n + i] - mx);
      fit_term += mx + std::log(acc / M);
    }
  } else {
    // Plug-in: pointwise log-density at the posterior-mean parameters.
    for (int i = 0; i < n; ++i)
      fit_term += obs_loglik(data, distances, kernel, i, pw.mean_beta.data(),
                             pw.mean_sigma2.data(), pw.mean_bandwidth);
  }

  // V = sum_i Var_m(ll_im), sample variance over draws.
  double V = 0.0;
  for (int i = 0; i < n; ++i) {
    double mean = 0.0;
    for (int m = 0; m < M; ++m) mean += pw.ll[static_cast<size_t>(m) * n + i];
    mean /= M;
    double ss = 0.0;
    for (int m = 0; m < M; ++m) {
      const double d = pw.ll[static_cast<size_t>(m) * n + i] - mean;
      ss += d * d;
    }
    V += ss / (M - 1);
  }
  return {-2.0 * (fit_term - V), V};
}

std::pair<double, double> dic(const PosteriorDraws& draws, const RegressionData& data,
                              const DistanceMatrix& distances, const KernelSpec& kernel) {
  const Pointwise pw = pointwise_loglik(draws, data, distances, kernel);
  const int M = draws.num_draws();
  const int n = data.n();

  double mean_dev = 0.0;
  for (int m = 0; m < M; ++m) {
    double ll = 0.0;
    for (int i = 0; i < n; ++i) ll += pw.ll[static_cast<size_t>(m) * n + i];
    mean_dev += -2.0 * ll;
  }
  mean_dev /= M;

  double ll_at_mean = 0.0;
  for (int i = 0; i < n; ++i)
    ll_at_mean += obs_loglik(data, distances, kernel, i, pw.mean_beta.data(),
                             pw.mean_sigma2.data(), pw.mean_bandwidth);
  const double dev_at_mean = -2.0 * ll_at_mean;
  const double p_d = mean_dev - dev_at_mean;
  return {mean_dev + p_d, p_d};
}

FitAssessment assess_fit(const PosteriorDraws& draws, const RegressionData& data,
                         const DistanceMatrix& distances, const KernelSpec& kernel,
                         bool use_lppd) {
  FitAssessment out;
  auto [w, V] = waic(draws, data, distances, kernel, use_lppd);
  out.waic = w;
  out.V = V;
  auto [d, pd] = dic(draws, data, distances, kernel);
  out.dic = d;
  out.p_d = pd;
  return out;
}

}  // namespace bcgwr
