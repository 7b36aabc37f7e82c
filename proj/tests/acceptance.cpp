// Acceptance gate: one self-contained binary, one printed pass/fail line per
// criterion, nonzero exit if anything fails. Each criterion exercises the
// public library API (plus the CLI for the determinism check) end to end.

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "bcgwr/assessment.hpp"
#include "bcgwr/bgwr.hpp"
#include "bcgwr/clustering.hpp"
#include "bcgwr/geometry.hpp"
#include "bcgwr/kernels.hpp"
#include "bcgwr/rjmcmc.hpp"
#include "bcgwr/rng.hpp"
#include "bcgwr/simgen.hpp"

namespace fs = std::filesystem;
using namespace bcgwr;

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

int g_failures = 0;

void report(int num, const std::string& name, bool pass, const std::string& detail) {
  std::cout << "criterion " << num << " (" << name << "): " << (pass ? "PASS" : "FAIL");
  if (!detail.empty()) std::cout << "  [" << detail << "]";
  std::cout << std::endl;
  if (!pass) ++g_failures;
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(4);
  ss << v;
  return ss.str();
}

// ---------------------------------------------------------------------------
// 1. Flat-study parameter recovery.
// ---------------------------------------------------------------------------
void criterion1() {
  const std::vector<double> truth = {2, 0, 0, 4, 8};
  const int R = 20;
  std::vector<std::vector<double>> means, sds;
  double worst_region_dev = 0.0;
  for (int r = 0; r < R; ++r) {
    const auto ds = generate_flat_study(1000 + r);
    const auto dist = euclidean_distances(ds.frame);
    KernelSpec kernel;
    kernel.kind = KernelKind::Exponential;
    kernel.bandwidth_upper = 100.0;
    BgwrConfig cfg;
    cfg.iterations = 10000;
    cfg.burn_in = 2000;
    cfg.seed = 1000 + r;
    const auto draws = run_bgwr(ds.data, dist, kernel, cfg);
    const auto summary = posterior_summary(draws);
    const int S = draws.num_regions, p = draws.num_coefficients;
    std::vector<double> mrow(p, 0.0), srow(p, 0.0);
    for (int s = 0; s < S; ++s)
      for (int j = 0; j < p; ++j) {
        const auto& c = summary[static_cast<size_t>(s) * p + j];
        mrow[j] += c.mean / S;
        srow[j] += c.sd / S;
        worst_region_dev = std::max(worst_region_dev, std::abs(c.mean - truth[j]));
      }
    means.push_back(mrow);
    sds.push_back(srow);
  }
  const auto metrics = replication_metrics(means, sds, truth);
  double max_mab = 0.0, max_mean_dev = 0.0;
  for (size_t j = 0; j < truth.size(); ++j) {
    max_mab = std::max(max_mab, metrics.mab[j]);
    for (int r = 0; r < R; ++r)
      max_mean_dev = std::max(max_mean_dev, std::abs(means[r][j] - truth[j]));
  }
  const bool pass = max_mab <= 0.2 && worst_region_dev <= 0.3;
  report(1, "flat-study parameter recovery", pass,
         "max MAB " + fmt(max_mab) + ", max replicate-mean dev " + fmt(max_mean_dev) +
             ", max per-region dev " + fmt(worst_region_dev));
}

// ---------------------------------------------------------------------------
// 2. RJMCMC variable selection.
// ---------------------------------------------------------------------------
void criterion2() {
  const int R = 5, p = 5;
  std::vector<double> incl(p, 0.0), model_avg(p, 0.0);
  for (int r = 0; r < R; ++r) {
    const auto ds = generate_flat_study(2000 + r);
    const auto dist = euclidean_distances(ds.frame);
    KernelSpec kernel;
    kernel.kind = KernelKind::Exponential;
    kernel.bandwidth_upper = 100.0;
    BgwrConfig cfg;
    cfg.iterations = 50000;
    cfg.burn_in = 10000;
    cfg.seed = 2000 + r;
    const auto draws = run_rjmcmc(ds.data, dist, kernel, cfg);
    const int M = draws.num_draws(), S = draws.num_regions;
    for (int j = 0; j < p; ++j) {
      double pi = 0.0, ma = 0.0;
      for (int m = 0; m < M; ++m)
        for (int s = 0; s < S; ++s) {
          pi += draws.gamma_at(m, s, j);
          ma += draws.gamma_at(m, s, j) * draws.beta_at(m, s, j);
        }
      incl[j] += pi / (static_cast<double>(M) * S) / R;
      model_avg[j] += ma / (static_cast<double>(M) * S) / R;
    }
  }
  const bool pass = incl[1] < 0.5 && incl[2] < 0.5 && incl[0] > 0.9 && incl[3] > 0.9 &&
                    incl[4] > 0.9 && std::abs(model_avg[1]) <= 0.05 &&
                    std::abs(model_avg[2]) <= 0.05;
  report(2, "reversible-jump variable selection", pass,
         "inclusion " + fmt(incl[0]) + "/" + fmt(incl[1]) + "/" + fmt(incl[2]) + "/" +
             fmt(incl[3]) + "/" + fmt(incl[4]) + ", null model-avg " + fmt(model_avg[1]) +
             "," + fmt(model_avg[2]));
}

// ---------------------------------------------------------------------------
// 3. Georgia clustering accuracy.
// ---------------------------------------------------------------------------
std::vector<CoefficientSample> take_samples(const PosteriorDraws& draws, int count) {
  const int M = draws.num_draws(), S = draws.num_regions, p = draws.num_coefficients;
  const int take = std::min(M, count);
  std::vector<CoefficientSample> out;
  for (int t = 0; t < take; ++t) {
    const int m = static_cast<int>((static_cast<long long>(t) * M) / take);
    CoefficientSample cs;
    cs.num_rows = S;
    cs.num_cols = p;
    cs.sample_id = m;
    cs.values.resize(static_cast<size_t>(S) * p);
    for (int s = 0; s < S; ++s)
      for (int j = 0; j < p; ++j) cs.values[static_cast<size_t>(s) * p + j] = draws.beta_at(m, s, j);
    out.push_back(std::move(cs));
  }
  return out;
}

void georgia_ris(int setting, std::uint64_t seed, double& ri_gmm_dahl, double& ri_dpmm_mode) {
  const auto ds = generate_georgia_study(setting, seed);
  const auto dist = euclidean_distances(ds.frame);
  KernelSpec kernel;
  kernel.kind = KernelKind::Bisquare;
  kernel.bandwidth_upper = 7.0;
  BgwrConfig cfg;
  cfg.iterations = 6000;
  cfg.burn_in = 1000;
  cfg.seed = seed;
  cfg.bandwidth_scale = 0.0;  // bandwidth pinned at D/2 = 3.5
  const auto draws = run_bgwr(ds.data, dist, kernel, cfg);
  const auto samples = take_samples(draws, 100);

  ClusterDraws gmm_draws;
  gmm_draws.num_regions = draws.num_regions;
  gmm_draws.truncation = 8;
  for (size_t t = 0; t < samples.size(); ++t) {
    const auto sel = gmm_select_k(samples[t], 8, 5, seed + 7919 * t);
    gmm_draws.labels.push_back(sel.fit.hard_labels);
  }
  ri_gmm_dahl = rand_index(dahl_configuration(gmm_draws).labels, ds.true_labels);

  DpmmConfig dc;
  dc.iterations = 600;
  dc.burn_in = 200;
  dc.seed = seed + 104729;
  const TwoStageResult two = two_stage_dpmm(samples, dc, "mode");
  ClusterDraws dpmm_draws;
  dpmm_draws.num_regions = draws.num_regions;
  dpmm_draws.truncation = dc.truncation;
  dpmm_draws.labels = two.stage1_labels;
  ri_dpmm_mode = rand_index(mode_configuration(dpmm_draws).labels, ds.true_labels);
}

void criterion3() {
  double s3_gmm = 0.0, s3_dpmm = 0.0, s1_gmm = 0.0, s1_dpmm = 0.0;
  georgia_ris(3, 31, s3_gmm, s3_dpmm);
  georgia_ris(1, 11, s1_gmm, s1_dpmm);
  const bool pass = s3_gmm >= 0.70 && s3_dpmm >= 0.70 && s1_gmm >= 0.55 && s1_dpmm >= 0.55;
  report(3, "georgia clustering accuracy", pass,
         "setting 3 RI gmm+dahl " + fmt(s3_gmm) + ", dpmm+mode " + fmt(s3_dpmm) +
             "; setting 1 " + fmt(s1_gmm) + ", " + fmt(s1_dpmm));
}

// ---------------------------------------------------------------------------
// 4. Vectorized likelihood equivalence and sampler speed.
// ---------------------------------------------------------------------------
double dense_mvn_loglik(const std::vector<double>& y,
                        const std::vector<std::vector<double>>& x_columns,
                        const std::vector<double>& beta, double sigma2,
                        const std::vector<double>& weights) {
  // Keep only positive-weight observations and evaluate the full
  // multivariate-normal density with an explicit covariance factorization.
  std::vector<int> keep;
  for (size_t i = 0; i < y.size(); ++i)
    if (weights[i] > 0.0) keep.push_back(static_cast<int>(i));
  const int k = static_cast<int>(keep.size());
  if (k == 0) return 0.0;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(k, k);
  Eigen::VectorXd resid(k);
  const int p = static_cast<int>(x_columns.size());
  for (int a = 0; a < k; ++a) {
    const int i = keep[a];
    cov(a, a) = sigma2 / weights[i];
    double mu = 0.0;
    for (int j = 0; j < p; ++j) mu += x_columns[j][i] * beta[j];
    resid(a) = y[i] - mu;
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(cov);
  double logdet = 0.0;
  for (int a = 0; a < k; ++a) logdet += 2.0 * std::log(llt.matrixL()(a, a));
  const double quad = resid.dot(llt.solve(resid));
  return -0.5 * (k * kLog2Pi + logdet + quad);
}

// A correct but deliberately naive sampler that re-evaluates every region's
// likelihood through the dense multivariate-normal path on each proposal.
// Same sweep structure as the production sampler; no caching, no
// factorization of the diagonal covariance.
void dense_baseline_sweeps(const RegressionData& data, const DistanceMatrix& distances,
                           const KernelSpec& kernel, int sweeps, std::uint64_t seed) {
  const int S = data.num_regions, n = data.n(), p = data.p();
  std::vector<double> beta(static_cast<size_t>(S) * p, 0.0);
  std::vector<double> sigma2(S, 1.0);
  double bandwidth = kernel.bandwidth_upper / 2.0;
  Rng rng(seed, 999);

  auto weights_for = [&](int s, double b) {
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i)
      w[i] = kernel_weight(kernel.kind, distances(data.obs_region[i], s), b);
    return w;
  };
  auto region_ll = [&](int s, const std::vector<double>& beta_s, double s2, double b) {
    return dense_mvn_loglik(data.y, data.x_columns, beta_s, s2, weights_for(s, b));
  };

  for (int it = 0; it < sweeps; ++it) {
    for (int s = 0; s < S; ++s) {
      std::vector<double> beta_s(beta.begin() + static_cast<size_t>(s) * p,
                                 beta.begin() + static_cast<size_t>(s + 1) * p);
      std::vector<double> prop = beta_s;
      for (int j = 0; j < p; ++j) prop[j] += 0.1 * rng.normal();
      const double cur = region_ll(s, beta_s, sigma2[s], bandwidth);
      const double alt = region_ll(s, prop, sigma2[s], bandwidth);
      if (std::log(rng.uniform()) < alt - cur)
        std::copy(prop.begin(), prop.end(), beta.begin() + static_cast<size_t>(s) * p);

      const double s2_prop = sigma2[s] * std::exp(0.4 * rng.normal());
      const double cur2 = region_ll(s, beta_s, sigma2[s], bandwidth);
      const double alt2 = region_ll(s, beta_s, s2_prop, bandwidth);
      if (std::log(rng.uniform()) < alt2 - cur2) sigma2[s] = s2_prop;
    }
    double b_prop = bandwidth + 5.0 * rng.normal();
    while (b_prop < 0.0 || b_prop > kernel.bandwidth_upper)
      b_prop = b_prop < 0.0 ? -b_prop : 2.0 * kernel.bandwidth_upper - b_prop;
    double cur = 0.0, alt = 0.0;
    for (int s = 0; s < S; ++s) {
      std::vector<double> beta_s(beta.begin() + static_cast<size_t>(s) * p,
                                 beta.begin() + static_cast<size_t>(s + 1) * p);
      cur += region_ll(s, beta_s, sigma2[s], bandwidth);
      alt += region_ll(s, beta_s, sigma2[s], b_prop);
    }
    if (std::log(rng.uniform()) < alt - cur) bandwidth = b_prop;
  }
}

void criterion4() {
  // Equivalence against the dense oracle on random cases.
  Rng rng(44);
  double max_err = 0.0;
  for (int c = 0; c < 1000; ++c) {
    const int n = 1 + rng.uniform_index(40);
    const int p = 1 + rng.uniform_index(5);
    std::vector<double> y(n);
    std::vector<std::vector<double>> x(p, std::vector<double>(n));
    std::vector<double> beta(p), w(n);
    for (int i = 0; i < n; ++i) {
      y[i] = rng.normal(0, 2);
      w[i] = rng.uniform() < 0.15 ? 0.0 : rng.uniform(0.01, 1.0);
      for (int j = 0; j < p; ++j) x[j][i] = rng.normal();
    }
    for (int j = 0; j < p; ++j) beta[j] = rng.normal();
    const double sigma2 = rng.uniform(0.2, 4.0);
    const double got = local_log_likelihood(y, x, beta, sigma2, w);
    const double want = dense_mvn_loglik(y, x, beta, sigma2, w);
    max_err = std::max(max_err, std::abs(got - want));
  }
  const bool equiv = max_err <= 1e-10;

  // Speed: identical sweep counts on the flat study.
  const auto ds = generate_flat_study(4004);
  const auto dist = euclidean_distances(ds.frame);
  KernelSpec kernel;
  kernel.kind = KernelKind::Exponential;
  kernel.bandwidth_upper = 100.0;
  const int sweeps = 30;

  const auto t0 = std::chrono::steady_clock::now();
  BgwrConfig cfg;
  cfg.iterations = sweeps;
  cfg.burn_in = 10;
  cfg.seed = 4004;
  cfg.adapt_scales = false;
  run_bgwr(ds.data, dist, kernel, cfg);
  const auto t1 = std::chrono::steady_clock::now();
  dense_baseline_sweeps(ds.data, dist, kernel, sweeps, 4004);
  const auto t2 = std::chrono::steady_clock::now();

  const double vec_s = std::chrono::duration<double>(t1 - t0).count();
  const double dense_s = std::chrono::duration<double>(t2 - t1).count();
  const bool fast = dense_s >= 2.0 * vec_s;
  report(4, "vectorized likelihood equivalence and speed", equiv && fast,
         "max |diff| " + fmt(max_err) + "; " + fmt(sweeps) + " sweeps: vectorized " +
             fmt(vec_s) + "s vs dense " + fmt(dense_s) + "s (" +
             fmt(dense_s / std::max(vec_s, 1e-9)) + "x)");
}

// ---------------------------------------------------------------------------
// 5. Rand index vs pair-enumeration oracle.
// ---------------------------------------------------------------------------
void criterion5() {
  Rng rng(55);
  bool ok = true;
  for (int c = 0; c < 200 && ok; ++c) {
    const int n = 2 + rng.uniform_index(49);
    std::vector<int> a(n), b(n);
    for (int i = 0; i < n; ++i) {
      a[i] = static_cast<int>(rng.uniform_index(1 + rng.uniform_index(6)));
      b[i] = static_cast<int>(rng.uniform_index(1 + rng.uniform_index(6)));
    }
    long long agree = 0, total = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        ++total;
        if ((a[i] == a[j]) == (b[i] == b[j])) ++agree;
      }
    const double oracle = static_cast<double>(agree) / static_cast<double>(total);
    if (rand_index(a, b) != oracle) ok = false;
  }
  report(5, "rand index oracle equivalence", ok, "200 random instances, exact match");
}

// ---------------------------------------------------------------------------
// 6. Dahl and mode configuration hand cases.
// ---------------------------------------------------------------------------
void criterion6() {
  ClusterDraws draws;
  draws.num_regions = 3;
  draws.truncation = 3;
  draws.labels = {{0, 0, 1}, {0, 0, 1}, {0, 1, 1}};
  // Mean membership matrix has (0,1)=2/3, (1,2)=1/3, (0,2)=0; iteration 1 is
  // the least-squares minimizer and ties break to the earliest iteration.
  const auto dahl = dahl_configuration(draws);
  bool ok = dahl.labels == std::vector<int>{0, 0, 1};
  const auto mode = mode_configuration(draws);
  ok = ok && rand_index(mode.labels, {0, 0, 1}) == 1.0;

  // Mode method must undo label switching: a constant partition scrambled by
  // per-iteration label permutations comes back exactly (up to relabeling).
  const std::vector<int> base = {0, 0, 1, 2, 2, 1};
  const std::vector<std::vector<int>> perms = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}, {1, 0, 2}};
  ClusterDraws scrambled;
  scrambled.num_regions = static_cast<int>(base.size());
  scrambled.truncation = 3;
  for (const auto& perm : perms) {
    std::vector<int> z(base.size());
    for (size_t i = 0; i < base.size(); ++i) z[i] = perm[base[i]];
    scrambled.labels.push_back(z);
  }
  const auto recovered = mode_configuration(scrambled);
  ok = ok && rand_index(recovered.labels, base) == 1.0 && recovered.num_labels == 3;
  report(6, "dahl/mode hand-case correctness", ok, "");
}

// ---------------------------------------------------------------------------
// 7. WAIC/DIC oracle equivalence and kernel coverage.
// ---------------------------------------------------------------------------
struct ToyProblem {
  RegressionData data;
  DistanceMatrix distances;
  KernelSpec kernel;
};

ToyProblem toy_problem(int S, int obs_per_region, int p, std::uint64_t seed) {
  ToyProblem t;
  Rng rng(seed);
  t.data.num_regions = S;
  t.data.x_columns.assign(p, {});
  for (int s = 0; s < S; ++s)
    for (int o = 0; o < obs_per_region; ++o) {
      t.data.obs_region.push_back(s);
      double mu = 0.0;
      for (int j = 0; j < p; ++j) {
        const double x = rng.normal();
        t.data.x_columns[j].push_back(x);
        mu += x;
      }
      t.data.y.push_back(mu + rng.normal());
    }
  for (int j = 0; j < p; ++j) t.data.column_names.push_back("x" + std::to_string(j));
  t.distances.size = S;
  t.distances.values.assign(static_cast<size_t>(S) * S, 0.0);
  for (int i = 0; i < S; ++i)
    for (int j = 0; j < S; ++j) t.distances.at(i, j) = std::abs(i - j);
  t.kernel.kind = KernelKind::Exponential;
  t.kernel.bandwidth_upper = 10.0;
  return t;
}

void naive_waic_dic(const PosteriorDraws& draws, const ToyProblem& t, double& waic_out,
                    double& dic_out, double& pd_out, double& v_out) {
  const int M = draws.num_draws(), n = t.data.n(), p = t.data.p(), S = draws.num_regions;
  auto obs_ll = [&](int i, const std::vector<double>& beta_row, double s2) {
    double mu = 0.0;
    for (int j = 0; j < p; ++j) mu += t.data.x_columns[j][i] * beta_row[j];
    const double r = t.data.y[i] - mu;  // own-region weight is kernel(0, b) = 1
    return -0.5 * (kLog2Pi + std::log(s2)) - r * r / (2.0 * s2);
  };
  std::vector<std::vector<double>> ll(M, std::vector<double>(n));
  for (int m = 0; m < M; ++m)
    for (int i = 0; i < n; ++i) {
      const int s = t.data.obs_region[i];
      std::vector<double> row(p);
      for (int j = 0; j < p; ++j) row[j] = draws.beta_at(m, s, j);
      ll[m][i] = obs_ll(i, row, draws.sigma2[static_cast<size_t>(m) * S + s]);
    }
  std::vector<std::vector<double>> mb(S, std::vector<double>(p, 0.0));
  std::vector<double> ms2(S, 0.0);
  for (int m = 0; m < M; ++m)
    for (int s = 0; s < S; ++s) {
      for (int j = 0; j < p; ++j) mb[s][j] += draws.beta_at(m, s, j) / M;
      ms2[s] += draws.sigma2[static_cast<size_t>(m) * S + s] / M;
    }
  double plug = 0.0;
  for (int i = 0; i < n; ++i) plug += obs_ll(i, mb[t.data.obs_region[i]], ms2[t.data.obs_region[i]]);
  double V = 0.0;
  for (int i = 0; i < n; ++i) {
    double mean = 0.0;
    for (int m = 0; m < M; ++m) mean += ll[m][i] / M;
    double ss = 0.0;
    for (int m = 0; m < M; ++m) ss += (ll[m][i] - mean) * (ll[m][i] - mean);
    V += ss / (M - 1);
  }
  waic_out = -2.0 * (plug - V);
  v_out = V;
  double mean_dev = 0.0;
  for (int m = 0; m < M; ++m) {
    double tot = 0.0;
    for (int i = 0; i < n; ++i) tot += ll[m][i];
    mean_dev += -2.0 * tot / M;
  }
  pd_out = mean_dev - (-2.0 * plug);
  dic_out = mean_dev + pd_out;
}

void criterion7() {
  const auto t = toy_problem(3, 4, 2, 77);
  PosteriorDraws draws;
  draws.num_regions = 3;
  draws.num_coefficients = 2;
  Rng rng(78);
  for (int m = 0; m < 40; ++m) {
    for (int s = 0; s < 3; ++s) {
      for (int j = 0; j < 2; ++j) draws.beta.push_back(rng.normal(1.0, 0.3));
      draws.sigma2.push_back(0.5 + rng.uniform());
    }
    draws.sigma2_beta.push_back(1.0);
    draws.bandwidth.push_back(2.0 + rng.uniform());
  }
  double nw, nd, npd, nv;
  naive_waic_dic(draws, t, nw, nd, npd, nv);
  const auto fa = assess_fit(draws, t.data, t.distances, t.kernel);
  bool ok = std::abs(fa.waic - nw) <= 1e-8 && std::abs(fa.dic - nd) <= 1e-8 &&
            std::abs(fa.p_d - npd) <= 1e-8 && std::abs(fa.V - nv) <= 1e-8;

  // Constant draws: zero variance, zero effective parameters.
  PosteriorDraws flat_draws;
  flat_draws.num_regions = 3;
  flat_draws.num_coefficients = 2;
  for (int m = 0; m < 5; ++m) {
    for (int s = 0; s < 3; ++s) {
      for (int j = 0; j < 2; ++j) flat_draws.beta.push_back(1.0 + 0.25 * j + 0.5 * s);
      flat_draws.sigma2.push_back(1.5);
    }
    flat_draws.sigma2_beta.push_back(1.0);
    flat_draws.bandwidth.push_back(3.0);
  }
  const auto fc = assess_fit(flat_draws, t.data, t.distances, t.kernel);
  ok = ok && fc.V == 0.0 && std::abs(fc.p_d) <= 1e-10;

  // All three distance-decay kernels give finite criteria with p_d > 0.
  const auto ds = generate_flat_study(707);
  const auto dist = euclidean_distances(ds.frame);
  std::string kernel_note;
  for (auto kind : {KernelKind::Exponential, KernelKind::Gaussian, KernelKind::Bisquare}) {
    KernelSpec kernel;
    kernel.kind = kind;
    kernel.bandwidth_upper = kind == KernelKind::Bisquare ? 10.0 : 100.0;
    BgwrConfig cfg;
    cfg.iterations = 2000;
    cfg.burn_in = 500;
    cfg.seed = 707;
    if (kind == KernelKind::Bisquare) cfg.bandwidth_scale = 0.0;  // keep full coverage
    const auto fit_draws = run_bgwr(ds.data, dist, kernel, cfg);
    const auto a = assess_fit(fit_draws, ds.data, dist, kernel);
    const bool finite = std::isfinite(a.waic) && std::isfinite(a.dic) && a.p_d > 0.0;
    ok = ok && finite;
    kernel_note += kernel_kind_to_string(kind) + (finite ? " ok " : " BAD ");
  }
  report(7, "waic/dic oracle equivalence", ok, kernel_note);
}

// ---------------------------------------------------------------------------
// 8. GMM/DPMM sanity on separated clouds.
// ---------------------------------------------------------------------------
CoefficientSample three_clouds(std::uint64_t seed) {
  CoefficientSample s;
  s.num_cols = 1;
  Rng rng(seed);
  for (double center : {-15.0, 0.0, 15.0})
    for (int i = 0; i < 50; ++i) s.values.push_back(center + rng.normal());
  s.num_rows = static_cast<int>(s.values.size());
  return s;
}

void criterion8() {
  int k3 = 0;
  bool monotone = true;
  for (int seed = 0; seed < 20; ++seed) {
    const auto sample = three_clouds(800 + seed);
    const auto sel = gmm_select_k(sample, 6, 5, 800 + seed);
    if (sel.best_k == 3) ++k3;
    for (size_t i = 1; i < sel.fit.loglik_trace.size(); ++i)
      if (sel.fit.loglik_trace[i] < sel.fit.loglik_trace[i - 1] - 1e-9) monotone = false;
  }

  const auto sample = three_clouds(800);
  DpmmConfig dc;
  dc.iterations = 500;
  dc.burn_in = 200;
  dc.seed = 801;
  const auto draws = dpmm_fit(sample, dc);
  double coverage = 0.0;
  for (const auto& z : draws.labels) {
    std::vector<int> counts(dc.truncation, 0);
    for (int zi : z) ++counts[zi];
    std::sort(counts.rbegin(), counts.rend());
    coverage += static_cast<double>(counts[0] + counts[1] + counts[2]) / z.size();
  }
  coverage /= draws.labels.size();

  const bool pass = k3 >= 18 && coverage >= 0.9 && monotone;
  report(8, "gmm/dpmm sanity", pass,
         "BIC K=3 in " + std::to_string(k3) + "/20 seeds, DPMM top-3 coverage " +
             fmt(coverage) + (monotone ? ", EM monotone" : ", EM NOT monotone"));
}

// ---------------------------------------------------------------------------
// 9. CLI determinism: byte-identical reruns.
// ---------------------------------------------------------------------------
bool run_cli(const std::string& args) {
  const std::string cmd = std::string(BCGWR_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str()) == 0;
}

bool run_pipeline(const std::string& dir) {
  fs::create_directories(dir);
  return run_cli("simulate flat64 --seed 5 --out " + dir) &&
         run_cli("fit --data " + dir + "/flat64_data.csv --frame " + dir +
                 "/flat64_frame.csv --iters 1200 --burnin 300 --seed 7 --out " + dir) &&
         run_cli("cluster --draws " + dir + "/draws.csv --frame " + dir +
                 "/flat64_frame.csv --model gmm --method dahl --samples 20 --kmax 4 "
                 "--restarts 3 --seed 9 --out " + dir) &&
         run_cli("assess --draws " + dir + "/draws.csv --data " + dir +
                 "/flat64_data.csv --frame " + dir + "/flat64_frame.csv --out " + dir) &&
         run_cli("summarize --draws " + dir + "/draws.csv --frame " + dir +
                 "/flat64_frame.csv --coefficient 4 --top-k 3 --out " + dir);
}

std::string slurp(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void criterion9() {
  const std::string a = "acceptance_run_a", b = "acceptance_run_b";
  fs::remove_all(a);
  fs::remove_all(b);
  bool ok = run_pipeline(a) && run_pipeline(b);
  int compared = 0;
  std::string first_diff;
  if (ok) {
    for (const auto& entry : fs::directory_iterator(a)) {
      // Manifests embed the output directory path, which differs by design
      // between the two runs; the determinism contract is on the CSVs.
      if (entry.path().extension() != ".csv") continue;
      const auto name = entry.path().filename();
      const fs::path other = fs::path(b) / name;
      if (!fs::exists(other)) {
        ok = false;
        first_diff = name.string() + " missing in rerun";
        break;
      }
      if (slurp(entry.path()) != slurp(other)) {
        ok = false;
        first_diff = name.string() + " differs";
        break;
      }
      ++compared;
    }
  } else {
    first_diff = "pipeline command failed";
  }
  fs::remove_all(a);
  fs::remove_all(b);
  report(9, "pipeline determinism", ok,
         ok ? std::to_string(compared) + " output files byte-identical" : first_diff);
}

// ---------------------------------------------------------------------------
// 10. Conjugate closed-form oracle.
// ---------------------------------------------------------------------------
void criterion10() {
  const int n = 60, p = 3;
  Rng rng(101);
  RegressionData data;
  data.num_regions = 1;
  data.x_columns.assign(p, std::vector<double>(n));
  const double truth[p] = {1.5, -0.7, 0.4};
  for (int i = 0; i < n; ++i) {
    data.obs_region.push_back(0);
    double mu = 0.0;
    for (int j = 0; j < p; ++j) {
      data.x_columns[j][i] = rng.normal();
      mu += truth[j] * data.x_columns[j][i];
    }
    data.y.push_back(mu + rng.normal());
  }
  for (int j = 0; j < p; ++j) data.column_names.push_back("x" + std::to_string(j));
  DistanceMatrix dist;
  dist.size = 1;
  dist.values = {0.0};
  KernelSpec kernel;
  kernel.kind = KernelKind::Exponential;
  kernel.bandwidth_upper = 10.0;

  // Pin sigma^2 and sigma^2_beta at 1 so the exact posterior is the conjugate
  // Gaussian: mean = (X'X + I)^{-1} X'y.
  BgwrConfig cfg;
  cfg.iterations = 110000;
  cfg.burn_in = 10000;
  cfg.seed = 101;
  cfg.sigma2_scale = 0.0;
  cfg.sigma2_beta_scale = 0.0;
  cfg.bandwidth_scale = 0.0;
  const auto draws = run_bgwr(data, dist, kernel, cfg);

  Eigen::MatrixXd X(n, p);
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    y(i) = data.y[i];
    for (int j = 0; j < p; ++j) X(i, j) = data.x_columns[j][i];
  }
  const Eigen::VectorXd want =
      (X.transpose() * X + Eigen::MatrixXd::Identity(p, p)).llt().solve(X.transpose() * y);

  const int M = draws.num_draws();
  double max_dev = 0.0;
  for (int j = 0; j < p; ++j) {
    double mean = 0.0;
    for (int m = 0; m < M; ++m) mean += draws.beta_at(m, 0, j) / M;
    max_dev = std::max(max_dev, std::abs(mean - want(j)));
  }
  report(10, "conjugate posterior oracle", max_dev <= 0.05,
         "max |mcmc mean - closed form| = " + fmt(max_dev) + " over " + std::to_string(M) +
             " draws");
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  if (g_failures == 0) {
    std::cout << "acceptance: all 10 criteria passed" << std::endl;
    return 0;
  }
  std::cout << "acceptance: " << g_failures << " criteria FAILED" << std::endl;
  return 1;
}
