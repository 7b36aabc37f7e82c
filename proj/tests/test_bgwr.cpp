#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "bcgwr/bgwr.hpp"
#include "bcgwr/rng.hpp"
#include "doctest.h"

using namespace bcgwr;

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

// Dense multivariate-normal log-density with covariance diag(sigma2 / w_i),
// restricted to positive-weight observations: the independent oracle for the
// vectorized likelihood.
double dense_mvn_loglik(const std::vector<double>& y,
                        const std::vector<std::vector<double>>& x_columns,
                        const std::vector<double>& beta, double sigma2,
                        const std::vector<double>& w) {
  std::vector<int> keep;
  for (size_t i = 0; i < w.size(); ++i)
    if (w[i] > 0.0) keep.push_back(static_cast<int>(i));
  const int m = static_cast<int>(keep.size());
  if (m == 0) return 0.0;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(m, m);
  Eigen::VectorXd r(m);
  for (int a = 0; a < m; ++a) {
    const int i = keep[a];
    cov(a, a) = sigma2 / w[i];
    double mu = 0.0;
    for (size_t j = 0; j < beta.size(); ++j) mu += x_columns[j][i] * beta[j];
    r(a) = y[i] - mu;
  }
  const Eigen::LLT<Eigen::MatrixXd> llt(cov);
  const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  const double quad = r.dot(llt.solve(r));
  return -0.5 * (m * kLog2Pi + logdet + quad);
}

SpatialFrame line_frame(int S, double spacing = 1.0) {
  SpatialFrame f;
  f.mode = CoordinateMode::Planar;
  for (int s = 0; s < S; ++s) {
    f.region_ids.push_back("r" + std::to_string(s));
    f.coordinates.emplace_back(spacing * s, 0.0);
  }
  return f;
}

}  // namespace

TEST_CASE("local_log_likelihood trivial cases") {
  std::vector<double> y = {0.0};
  std::vector<std::vector<double>> X = {{0.0}};
  std::vector<double> beta = {0.0};
  std::vector<double> w = {1.0};
  CHECK(local_log_likelihood(y, X, beta, 1.0, w) ==
        doctest::Approx(-0.5 * kLog2Pi).epsilon(1e-14));

  // All weights 1 reduces to the iid Gaussian log-likelihood.
  y = {1.0, 2.0, -0.5};
  X = {{1.0, 1.0, 1.0}};
  beta = {0.4};
  w = {1.0, 1.0, 1.0};
  double expect = 0.0;
  for (double yi : y) {
    const double r = yi - 0.4;
    expect += -0.5 * (kLog2Pi + std::log(2.0)) - r * r / (2.0 * 2.0);
  }
  CHECK(local_log_likelihood(y, X, beta, 2.0, w) == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("local_log_likelihood equals the dense MVN oracle") {
  Rng rng(31);
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 1 + static_cast<int>(rng.uniform_index(30));
    const int p = 1 + static_cast<int>(rng.uniform_index(4));
    std::vector<double> y(n), w(n), beta(p);
    std::vector<std::vector<double>> X(p, std::vector<double>(n));
    for (int i = 0; i < n; ++i) {
      y[i] = rng.normal(0, 2);
      w[i] = rng.uniform() < 0.2 ? 0.0 : rng.uniform();  // some zero weights
      for (int j = 0; j < p; ++j) X[j][i] = rng.normal();
    }
    for (int j = 0; j < p; ++j) beta[j] = rng.normal();
    const double sigma2 = 0.3 + rng.uniform() * 3.0;
    const double got = local_log_likelihood(y, X, beta, sigma2, w);
    const double want = dense_mvn_loglik(y, X, beta, sigma2, w);
    CHECK(got == doctest::Approx(want).epsilon(1e-10));
  }
}

TEST_CASE("local_log_likelihood input validation") {
  std::vector<double> y = {0.0};
  std::vector<std::vector<double>> X = {{0.0}};
  std::vector<double> beta = {0.0};
  std::vector<double> w = {1.0};
  CHECK_THROWS(local_log_likelihood(y, X, beta, -1.0, w));
  std::vector<double> short_w = {};
  CHECK_THROWS(local_log_likelihood(y, X, beta, 1.0, short_w));
}

TEST_CASE("growing a residual strictly lowers the likelihood") {
  std::vector<double> y = {1.0, 2.0};
  std::vector<std::vector<double>> X = {{1.0, 1.0}};
  std::vector<double> w = {0.7, 0.5};
  const double base = local_log_likelihood(y, X, std::vector<double>{1.0}, 1.0, w);
  y[0] = 3.0;  // residual of obs 0 grows
  const double worse = local_log_likelihood(y, X, std::vector<double>{1.0}, 1.0, w);
  CHECK(worse < base);
}

TEST_CASE("empirical quantile: type-7 on 1..100") {
  std::vector<double> xs(100);
  for (int i = 0; i < 100; ++i) xs[i] = i + 1;
  CHECK(empirical_quantile(xs, 0.025) == doctest::Approx(3.475).epsilon(1e-12));
  CHECK(empirical_quantile(xs, 0.975) == doctest::Approx(97.525).epsilon(1e-12));
  CHECK(empirical_quantile(xs, 0.0) == 1.0);
  CHECK(empirical_quantile(xs, 1.0) == 100.0);
}

TEST_CASE("posterior_summary on constant draws collapses") {
  PosteriorDraws draws;
  draws.num_regions = 1;
  draws.num_coefficients = 1;
  for (int m = 0; m < 5; ++m) {
    draws.beta.push_back(2.5);
    draws.sigma2.push_back(1.0);
    draws.sigma2_beta.push_back(1.0);
    draws.bandwidth.push_back(1.0);
  }
  const auto s = posterior_summary(draws);
  REQUIRE(s.size() == 1);
  CHECK(s[0].mean == 2.5);
  CHECK(s[0].sd == 0.0);
  CHECK(s[0].lower95 == 2.5);
  CHECK(s[0].upper95 == 2.5);

  PosteriorDraws one;
  one.num_regions = 1;
  one.num_coefficients = 1;
  one.beta = {1.0};
  one.sigma2 = {1.0};
  one.sigma2_beta = {1.0};
  one.bandwidth = {1.0};
  CHECK_THROWS(posterior_summary(one));
}

TEST_CASE("replication_metrics closed forms") {
  // Two replicates straddling the truth by 0.1.
  const std::vector<std::vector<double>> means = {{2.1}, {1.9}};
  const std::vector<std::vector<double>> sds = {{0.3}, {0.5}};
  const auto m = replication_metrics(means, sds, {2.0});
  CHECK(m.mab[0] == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(m.msd[0] == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(m.mmse[0] == doctest::Approx(0.01).epsilon(1e-14));

  const auto exact = replication_metrics({{2.0}}, {{0.2}}, {2.0});
  CHECK(exact.mab[0] == 0.0);
  CHECK(exact.mmse[0] == 0.0);

  CHECK_THROWS(replication_metrics({{1.0, 2.0}}, {{0.1, 0.1}}, {1.0}));
}

TEST_CASE("exceedance matrix matches exhaustive pair count") {
  PosteriorDraws draws;
  draws.num_regions = 3;
  draws.num_coefficients = 1;
  const std::vector<std::vector<double>> values = {
      {1.0, 2.0, 3.0}, {2.0, 1.0, 3.0}, {3.0, 2.0, 1.0}, {1.0, 3.0, 2.0}, {2.0, 3.0, 1.0}};
  for (const auto& row : values) {
    for (double v : row) draws.beta.push_back(v);
    draws.sigma2.insert(draws.sigma2.end(), {1, 1, 1});
    draws.sigma2_beta.push_back(1.0);
    draws.bandwidth.push_back(1.0);
  }
  const auto ex = exceedance_matrix(draws, 0, {0, 1, 2});
  for (int k = 0; k < 3; ++k) CHECK(ex[static_cast<size_t>(k) * 3 + k] == 0.0);
  for (int k = 0; k < 3; ++k)
    for (int q = 0; q < 3; ++q) {
      if (k == q) continue;
      double count = 0;
      for (const auto& row : values) count += row[k] > row[q] ? 1.0 : 0.0;
      CHECK(ex[static_cast<size_t>(k) * 3 + q] == doctest::Approx(count / 5).epsilon(1e-14));
    }
  CHECK_THROWS(exceedance_matrix(draws, 0, {0, 7}));
}

TEST_CASE("prob_exceed_own_mean and top_k_probability hand cases") {
  PosteriorDraws draws;
  draws.num_regions = 2;
  draws.num_coefficients = 1;
  // Region 0 always largest; region 1 symmetric around its mean.
  const std::vector<std::vector<double>> values = {{10, 1}, {10, -1}, {10, 1}, {10, -1}};
  for (const auto& row : values) {
    for (double v : row) draws.beta.push_back(v);
    draws.sigma2.insert(draws.sigma2.end(), {1, 1});
    draws.sigma2_beta.push_back(1.0);
    draws.bandwidth.push_back(1.0);
  }
  const auto own = prob_exceed_own_mean(draws, 0);
  CHECK(own[0] == 0.0);  // constant draws are never strictly above their mean
  CHECK(own[1] == doctest::Approx(0.5));

  const auto top1 = top_k_probability(draws, 0, 1);
  CHECK(top1[0] == 1.0);
  CHECK(top1[1] == 0.0);
  const auto top2 = top_k_probability(draws, 0, 2);
  CHECK(top2[0] == 1.0);
  CHECK(top2[1] == 1.0);
  CHECK_THROWS(top_k_probability(draws, 0, 3));
}

TEST_CASE("zero proposal scales leave the state unchanged") {
  const auto frame = line_frame(2);
  const auto dist = euclidean_distances(frame);
  RegressionData data;
  data.num_regions = 2;
  data.y = {1.0, -1.0, 0.5, 0.2};
  data.x_columns = {{1.0, 1.0, 1.0, 1.0}};
  data.column_names = {"x1"};
  data.obs_region = {0, 0, 1, 1};
  KernelSpec kernel;
  kernel.bandwidth_upper = 10.0;
  BgwrConfig config;
  config.iterations = 10;
  config.burn_in = 2;
  config.seed = 5;
  config.beta_scale = 0.0;
  config.sigma2_scale = 0.0;
  config.sigma2_beta_scale = 0.0;
  config.bandwidth_scale = 0.0;
  config.adapt_scales = false;
  BgwrSampler sampler(data, dist, kernel, config);
  const BgwrState before = sampler.state();
  for (int i = 0; i < 10; ++i) sampler.sweep(i);
  const BgwrState& after = sampler.state();
  CHECK(after.beta == before.beta);
  CHECK(after.sigma2 == before.sigma2);
  CHECK(after.sigma2_beta == before.sigma2_beta);
  CHECK(after.bandwidth == before.bandwidth);
  const auto acc = sampler.acceptance_rates();
  CHECK(acc.beta == 1.0);
  CHECK(acc.sigma2 == 1.0);
  CHECK(acc.bandwidth == 1.0);
}

TEST_CASE("fixed seed gives bit-identical draws") {
  const auto frame = line_frame(3);
  const auto dist = euclidean_distances(frame);
  Rng gen(77);
  RegressionData data;
  data.num_regions = 3;
  for (int i = 0; i < 9; ++i) {
    data.obs_region.push_back(i / 3);
    const double x = gen.normal();
    data.y.push_back(2.0 * x + gen.normal());
    if (data.x_columns.empty()) data.x_columns.emplace_back();
    data.x_columns[0].push_back(x);
  }
  data.column_names = {"x1"};
  KernelSpec kernel;
  kernel.bandwidth_upper = 10.0;
  BgwrConfig config;
  config.iterations = 200;
  config.burn_in = 50;
  config.seed = 99;
  const auto d1 = run_bgwr(data, dist, kernel, config);
  const auto d2 = run_bgwr(data, dist, kernel, config);
  CHECK(d1.beta == d2.beta);
  CHECK(d1.sigma2 == d2.sigma2);
  CHECK(d1.sigma2_beta == d2.sigma2_beta);
  CHECK(d1.bandwidth == d2.bandwidth);
}

TEST_CASE("sampler preserves state invariants across sweeps") {
  const auto frame = line_frame(3);
  const auto dist = euclidean_distances(frame);
  Rng gen(13);
  RegressionData data;
  data.num_regions = 3;
  data.x_columns.emplace_back();
  for (int i = 0; i < 12; ++i) {
    data.obs_region.push_back(i % 3);
    const double x = gen.normal();
    data.x_columns[0].push_back(x);
    data.y.push_back(x + gen.normal());
  }
  data.column_names = {"x1"};
  KernelSpec kernel;
  kernel.bandwidth_upper = 6.0;
  BgwrConfig config;
  config.iterations = 300;
  config.burn_in = 100;
  config.seed = 1;
  BgwrSampler sampler(data, dist, kernel, config);
  for (int i = 0; i < 300; ++i) {
    sampler.sweep(i);
    const auto& st = sampler.state();
    for (double v : st.sigma2) REQUIRE(v > 0.0);
    REQUIRE(st.sigma2_beta > 0.0);
    REQUIRE(st.bandwidth > 0.0);
    REQUIRE(st.bandwidth < kernel.bandwidth_upper);
  }
}

TEST_CASE("posterior matches a 2D grid-integration oracle on a conjugate-free toy") {
  // One region, one covariate, sigma^2 sampled: the exact posterior over
  // (beta, sigma^2) is available by brute-force quadrature.
  const auto frame = line_frame(1);
  const auto dist = euclidean_distances(frame);
  Rng gen(3);
  RegressionData data;
  data.num_regions = 1;
  data.x_columns.emplace_back();
  for (int i = 0; i < 10; ++i) {
    const double x = gen.normal();
    data.x_columns[0].push_back(x);
    data.y.push_back(0.8 * x + 0.6 * gen.normal());
    data.obs_region.push_back(0);
  }
  data.column_names = {"x1"};

  // Quadrature over beta in [-3,3], sigma2 in (0, 8].
  const int nb = 401, ns = 400;
  double z = 0.0, mean_beta = 0.0, mean_s2 = 0.0;
  for (int a = 0; a < nb; ++a) {
    const double beta = -3.0 + 6.0 * a / (nb - 1);
    for (int c = 0; c < ns; ++c) {
      const double s2 = 8.0 * (c + 0.5) / ns;
      double ll = 0.0;
      for (size_t i = 0; i < data.y.size(); ++i) {
        const double r = data.y[i] - beta * data.x_columns[0][i];
        ll += -0.5 * (kLog2Pi + std::log(s2)) - r * r / (2.0 * s2);
      }
      // Priors: beta ~ N(0, sigma2_beta = 1 pinned), sigma2 ~ IGamma(1, 1).
      const double lp = -0.5 * (kLog2Pi + beta * beta) - 2.0 * std::log(s2) - 1.0 / s2;
      const double wgt = std::exp(ll + lp);
      z += wgt;
      mean_beta += wgt * beta;
      mean_s2 += wgt * s2;
    }
  }
  mean_beta /= z;
  mean_s2 /= z;

  KernelSpec kernel;
  kernel.bandwidth_upper = 10.0;
  BgwrConfig config;
  config.iterations = 120000;
  config.burn_in = 20000;
  config.seed = 21;
  config.sigma2_beta_scale = 0.0;  // pin sigma2_beta at 1 to match the grid
  config.bandwidth_scale = 0.0;    // irrelevant for one region; pin it
  const auto draws = run_bgwr(data, dist, kernel, config);
  double mb = 0.0, ms = 0.0;
  for (int m = 0; m < draws.num_draws(); ++m) {
    mb += draws.beta_at(m, 0, 0);
    ms += draws.sigma2[m];
  }
  mb /= draws.num_draws();
  ms /= draws.num_draws();
  CHECK(mb == doctest::Approx(mean_beta).epsilon(1).scale(0.02));
  CHECK(ms == doctest::Approx(mean_s2).epsilon(1).scale(0.05));
}

TEST_CASE("two-region Gaussian conjugate oracle with pinned variances") {
  // sigma2, sigma2_beta, bandwidth pinned: each beta(s) posterior is exactly
  // Gaussian with closed-form mean under the weighted likelihood.
  const auto frame = line_frame(2, 2.0);
  const auto dist = euclidean_distances(frame);
  Rng gen(8);
  RegressionData data;
  data.num_regions = 2;
  data.x_columns.emplace_back();
  for (int i = 0; i < 12; ++i) {
    const double x = gen.normal();
    data.x_columns[0].push_back(x);
    const double beta_true = (i % 2 == 0) ? 1.5 : -0.5;
    data.y.push_back(beta_true * x + 0.5 * gen.normal());
    data.obs_region.push_back(i % 2);
  }
  data.column_names = {"x1"};

  KernelSpec kernel;
  kernel.bandwidth_upper = 10.0;
  BgwrConfig config;
  config.iterations = 80000;
  config.burn_in = 10000;
  config.seed = 14;
  config.sigma2_scale = 0.0;       // sigma2(s) pinned at 1
  config.sigma2_beta_scale = 0.0;  // sigma2_beta pinned at 1
  config.bandwidth_scale = 0.0;    // bandwidth pinned at D/2 = 5
  const double b = 5.0;
  const auto draws = run_bgwr(data, dist, kernel, config);

  for (int s = 0; s < 2; ++s) {
    double prec = 1.0, num = 0.0;  // prior N(0, 1)
    for (size_t i = 0; i < data.y.size(); ++i) {
      const double w = std::exp(-dist(data.obs_region[i], s) / b);
      prec += w * data.x_columns[0][i] * data.x_columns[0][i];
      num += w * data.x_columns[0][i] * data.y[i];
    }
    const double expect = num / prec;
    double got = 0.0;
    for (int m = 0; m < draws.num_draws(); ++m) got += draws.beta_at(m, s, 0);
    got /= draws.num_draws();
    CHECK(got == doctest::Approx(expect).epsilon(1).scale(0.02));
  }
}

TEST_CASE("compact-support kernel with an uncovered region fails loudly") {
  const auto frame = line_frame(2, 10.0);
  const auto dist = euclidean_distances(frame);
  RegressionData data;
  data.num_regions = 2;
  data.y = {1.0, 2.0};
  data.x_columns = {{1.0, 1.0}};
  data.column_names = {"x1"};
  data.obs_region = {0, 0};  // region 1 has no local observations
  KernelSpec kernel;
  kernel.kind = KernelKind::Bisquare;
  kernel.bandwidth_upper = 4.0;  // init bandwidth 2 < distance 10
  BgwrConfig config;
  config.iterations = 10;
  config.burn_in = 2;
  config.seed = 0;
  bool threw = false;
  try {
    run_bgwr(data, dist, kernel, config);
  } catch (const std::runtime_error& e) {
    threw = true;
    CHECK(std::string(e.what()).find("region 1") != std::string::npos);  // names the region
  }
  CHECK(threw);
}

TEST_CASE("config validation") {
  BgwrConfig config;
  config.iterations = 0;
  CHECK_THROWS(config.validate());
  config.iterations = 100;
  config.burn_in = 100;
  CHECK_THROWS(config.validate());
  config.burn_in = 10;
  config.thin = 0;
  CHECK_THROWS(config.validate());
}
