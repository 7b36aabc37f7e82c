#include "bcgwr/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace bcgwr {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr double kVarianceFloor = 1e-8;

double log_sum_exp(const std::vector<double>& xs) {
  const double m = *std::max_element(xs.begin(), xs.end());
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - m);
  return m + std::log(acc);
}

// Column means/variances of the sample, used for initialization and priors.
void column_moments(const CoefficientSample& sample, std::vector<double>& mean,
                    std::vector<double>& var) {
  const int S = sample.num_rows, q = sample.num_cols;
  mean.assign(q, 0.0);
  var.assign(q, 0.0);
  for (int i = 0; i < S; ++i)
    for (int d = 0; d < q; ++d) mean[d] += sample.at(i, d) / S;
  for (int i = 0; i < S; ++i)
    for (int d = 0; d < q; ++d) {
      const double r = sample.at(i, d) - mean[d];
      var[d] += r * r / S;
    }
  for (double& v : var) v = std::max(v, kVarianceFloor);
}

int relabel_consecutive(std::vector<int>& labels) {
  std::map<int, int> remap;
  for (int lab : labels)
    if (!remap.count(lab)) remap[lab] = 0;
  int next = 0;
  for (auto& [old_label, fresh] : remap) fresh = next++;
  for (int& lab : labels) lab = remap[lab];
  return next;
}

}  // namespace

GmmFit gmm_em_fit(const CoefficientSample& sample, int K, Rng& rng, int max_iter, double tol) {
  const int S = sample.num_rows, q = sample.num_cols;
  if (K < 1) throw std::invalid_argument("gmm_em_fit: K must be >= 1");
  if (S < K) throw std::invalid_argument("gmm_em_fit: fewer rows than components");

  GmmFit fit;
  GmmModel& model = fit.model;
  model.num_components = K;
  model.num_dims = q;
  model.weights.assign(K, 1.0 / K);
  model.means.assign(static_cast<size_t>(K) * q, 0.0);

  std::vector<double> col_mean, col_var;
  column_moments(sample, col_mean, col_var);
  model.variances.resize(static_cast<size_t>(K) * q);
  for (int k = 0; k < K; ++k)
    for (int d = 0; d < q; ++d) model.variances[static_cast<size_t>(k) * q + d] = col_var[d];

  // distinct random rows as initial means
  std::vector<int> order(S);
  std::iota(order.begin(), order.end(), 0);
  for (int i = S - 1; i > 0; --i) std::swap(order[i], order[rng.uniform_index(i + 1)]);
  for (int k = 0; k < K; ++k)
    for (int d = 0; d < q; ++d)
      model.means[static_cast<size_t>(k) * q + d] = sample.at(order[k], d);

  fit.responsibilities.assign(static_cast<size_t>(S) * K, 0.0);
  std::vector<double> logp(K);
  double prev_ll = -std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < max_iter; ++iter) {
    // E step
    double loglik = 0.0;
    for (int i = 0; i < S; ++i) {
      for (int k = 0; k < K; ++k) {
        double lp = std::log(model.weights[k]);
        for (int d = 0; d < q; ++d) {
          const double v = model.variances[static_cast<size_t>(k) * q + d];
          const double r = sample.at(i, d) - model.means[static_cast<size_t>(k) * q + d];
          lp += -0.5 * (kLog2Pi + std::log(v)) - r * r / (2.0 * v);
        }
        logp[k] = lp;
      }
      const double lse = log_sum_exp(logp);
      loglik += lse;
      for (int k = 0; k < K; ++k)
        fit.responsibilities[static_cast<size_t>(i) * K + k] = std::exp(logp[k] - lse);
    }
    model.log_likelihood = loglik;
    fit.loglik_trace.push_back(loglik);

    if (loglik - prev_ll < tol && iter > 0) break;
    prev_ll = loglik;

    // M step
    for (int k = 0; k < K; ++k) {
      double nk = 0.0;
      for (int i = 0; i < S; ++i) nk += fit.responsibilities[static_cast<size_t>(i) * K + k];
      model.weights[k] = std::max(nk / S, 1e-12);
      for (int d = 0; d < q; ++d) {
        double m = 0.0;
        for (int i = 0; i < S; ++i)
          m += fit.responsibilities[static_cast<size_t>(i) * K + k] * sample.at(i, d);
        m = nk > 0 ? m / nk : col_mean[d];
        double v = 0.0;
        for (int i = 0; i < S; ++i) {
          const double r = sample.at(i, d) - m;
          v += fit.responsibilities[static_cast<size_t>(i) * K + k] * r * r;
        }
        v = nk > 0 ? v / nk : col_var[d];
        if (v < kVarianceFloor) {
          v = kVarianceFloor;
          model.variance_floored = true;
        }
        model.means[static_cast<size_t>(k) * q + d] = m;
        model.variances[static_cast<size_t>(k) * q + d] = v;
      }
    }
    double wsum = std::accumulate(model.weights.begin(), model.weights.end(), 0.0);
    for (double& w : model.weights) w /= wsum;
  }

  fit.hard_labels.resize(S);
  for (int i = 0; i < S; ++i) {
    int best = 0;
    for (int k = 1; k < K; ++k)
      if (fit.responsibilities[static_cast<size_t>(i) * K + k] >
          fit.responsibilities[static_cast<size_t>(i) * K + best])
        best = k;
    fit.hard_labels[i] = best;
  }
  return fit;
}

GmmSelection gmm_select_k(const CoefficientSample& sample, int K_max, int restarts,
                          std::uint64_t seed) {
  const int S = sample.num_rows, q = sample.num_cols;
  if (K_max >= S) K_max = S - 1;  // clamp; a component per row is degenerate
  if (K_max < 1) K_max = 1;
  if (restarts < 1) restarts = 1;

  GmmSelection selection;
  double best_bic = std::numeric_limits<double>::infinity();
  GmmFit fallback_fit;  // best fit seen anywhere, in case every K degenerates
  double fallback_bic = std::numeric_limits<double>::infinity();
  int fallback_k = 1;
  for (int K = 1; K <= K_max; ++K) {
    // A floored variance marks a component collapsed onto (near-)duplicate
    // rows; its likelihood is an artifact of the floor, not evidence, so such
    // restarts cannot compete in the BIC comparison.
    GmmFit best_fit;
    double best_ll = -std::numeric_limits<double>::infinity();
    bool have_clean = false;
    for (int r = 0; r < restarts; ++r) {
      Rng rng(seed, static_cast<std::uint64_t>(K), static_cast<std::uint64_t>(r));
      GmmFit fit = gmm_em_fit(sample, K, rng);
      if (fit.model.variance_floored) continue;
      if (fit.model.log_likelihood > best_ll) {
        best_ll = fit.model.log_likelihood;
        best_fit = std::move(fit);
        have_clean = true;
      }
    }
    const double params = (K - 1) + 2.0 * K * q;
    const double bic = have_clean
                           ? -2.0 * best_ll + params * std::log(static_cast<double>(S))
                           : std::numeric_limits<double>::infinity();
    selection.bic.push_back(bic);
    if (bic < best_bic) {
      best_bic = bic;
      selection.best_k = K;
      selection.fit = std::move(best_fit);
    }
    if (!have_clean && !std::isfinite(best_bic) && K == 1 && !std::isfinite(fallback_bic)) {
      // Keep something sensible around if even K = 1 floors (constant data).
      Rng rng(seed, 1, 0);
      fallback_fit = gmm_em_fit(sample, 1, rng);
      fallback_bic = 0.0;
      fallback_k = 1;
    }
  }
  if (!std::isfinite(best_bic)) {
    selection.best_k = fallback_k;
    selection.fit = std::move(fallback_fit);
  }
  return selection;
}

std::vector<double> stick_breaking_weights(const std::vector<double>& V) {
  if (V.empty()) throw std::invalid_argument("stick_breaking_weights: empty input");
  const size_t L = V.size();
  std::vector<double> C(L);
  double remaining = 1.0;
  for (size_t k = 0; k + 1 < L; ++k) {
    C[k] = V[k] * remaining;
    remaining *= (1.0 - V[k]);
  }
  C[L - 1] = remaining;  // absorb the truncation remainder so sum == 1 exactly
  return C;
}

ClusterDraws dpmm_fit(const CoefficientSample& sample, const DpmmConfig& config) {
  const int S = sample.num_rows, q = sample.num_cols, L = config.truncation;
  if (L < 2) throw std::invalid_argument("dpmm_fit: truncation must be >= 2");
  if (!(config.alpha > 0.0)) throw std::invalid_argument("dpmm_fit: alpha must be positive");
  if (config.burn_in < 0 || config.burn_in >= config.iterations)
    throw std::invalid_argument("dpmm_fit: burn_in must be in [0, iterations)");

  std::vector<double> prior_mean, prior_var;
  column_moments(sample, prior_mean, prior_var);
  const double kappa0 = config.prior_mean_strength;
  const double a0 = config.prior_variance_shape;
  // prior expectation of the variance equals the sample variance
  std::vector<double> b0(prior_var);
  for (double& b : b0) b *= (a0 - 1.0);

  Rng rng(config.seed, 7, 0);
  std::vector<double> means(static_cast<size_t>(L) * q), vars(static_cast<size_t>(L) * q);
  for (int k = 0; k < L; ++k) {
    for (int d = 0; d < q; ++d) {
      const double v = b0[d] / rng.gamma(a0);
      vars[static_cast<size_t>(k) * q + d] = v;
      means[static_cast<size_t>(k) * q + d] = rng.normal(prior_mean[d], std::sqrt(v / kappa0));
    }
  }
  std::vector<double> V(L, 0.5), C = stick_breaking_weights(V);
  std::vector<int> z(S, 0);
  std::vector<double> logp(L);

  ClusterDraws draws;
  draws.num_regions = S;
  draws.truncation = L;

  for (int iter = 0; iter < config.iterations; ++iter) {
    // labels
    for (int i = 0; i < S; ++i) {
      for (int k = 0; k < L; ++k) {
        double lp = C[k] > 0.0 ? std::log(C[k]) : -std::numeric_limits<double>::infinity();
        for (int d = 0; d < q; ++d) {
          const double v = vars[static_cast<size_t>(k) * q + d];
          const double r = sample.at(i, d) - means[static_cast<size_t>(k) * q + d];
          lp += -0.5 * (kLog2Pi + std::log(v)) - r * r / (2.0 * v);
        }
        logp[k] = lp;
      }
      const double lse = log_sum_exp(logp);
      double u = rng.uniform();
      double acc = 0.0;
      int pick = L - 1;
      for (int k = 0; k < L; ++k) {
        acc += std::exp(logp[k] - lse);
        if (u < acc) {
          pick = k;
          break;
        }
      }
      z[i] = pick;
    }

    // stick weights: V_k ~ Beta(1 + n_k, alpha + sum_{j>k} n_j)
    std::vector<int> counts(L, 0);
    for (int lab : z) ++counts[lab];
    int beyond = 0;
    for (int k = L - 1; k >= 0; --k) {
      if (k < L - 1) beyond += counts[k + 1];
      V[k] = rng.beta(1.0 + counts[k], config.alpha + beyond);
    }
    V[L - 1] = 1.0;  // truncation
    C = stick_breaking_weights(V);

    // component parameters from the normal-inverse-gamma conditional
    for (int k = 0; k < L; ++k) {
      const int nk = counts[k];
      for (int d = 0; d < q; ++d) {
        double xbar = 0.0, ss = 0.0;
        if (nk > 0) {
          for (int i = 0; i < S; ++i)
            if (z[i] == k) xbar += sample.at(i, d);
          xbar /= nk;
          for (int i = 0; i < S; ++i)
            if (z[i] == k) {
              const double r = sample.at(i, d) - xbar;
              ss += r * r;
            }
        }
        const double kn = kappa0 + nk;
        const double mn = (kappa0 * prior_mean[d] + nk * xbar) / kn;
        const double an = a0 + 0.5 * nk;
        const double bn = b0[d] + 0.5 * ss +
                          0.5 * kappa0 * nk * (xbar - prior_mean[d]) * (xbar - prior_mean[d]) / kn;
        const double v = std::max(bn / rng.gamma(an), kVarianceFloor);
        vars[static_cast<size_t>(k) * q + d] = v;
        means[static_cast<size_t>(k) * q + d] = rng.normal(mn, std::sqrt(v / kn));
      }
    }

    if (iter >= config.burn_in) {
      draws.labels.push_back(z);
      int occupied = 0;
      for (int c : counts)
        if (c > 0) ++occupied;
      if (occupied == L) draws.saturated = true;
    }
  }
  return draws;
}

std::vector<std::uint8_t> membership_matrix(const std::vector<int>& z) {
  const size_t S = z.size();
  std::vector<std::uint8_t> B(S * S, 0);
  for (size_t i = 0; i < S; ++i)
    for (size_t j = 0; j < S; ++j) B[i * S + j] = z[i] == z[j] ? 1 : 0;
  return B;
}

ClusterConfiguration dahl_configuration(const ClusterDraws& draws) {
  const int Q = static_cast<int>(draws.labels.size());
  if (Q == 0) throw std::invalid_argument("dahl_configuration: no draws");
  const int S = draws.num_regions;

  std::vector<double> mean_membership(static_cast<size_t>(S) * S, 0.0);
  for (const auto& z : draws.labels) {
    for (int i = 0; i < S; ++i)
      for (int j = 0; j < S; ++j)
        if (z[i] == z[j]) mean_membership[static_cast<size_t>(i) * S + j] += 1.0;
  }
  for (double& v : mean_membership) v /= Q;

  int best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int c = 0; c < Q; ++c) {
    const auto& z = draws.labels[c];
    double dist = 0.0;
    for (int i = 0; i < S; ++i) {
      for (int j = 0; j < S; ++j) {
        const double b = z[i] == z[j] ? 1.0 : 0.0;
        const double r = b - mean_membership[static_cast<size_t>(i) * S + j];
        dist += r * r;
      }
    }
    if (dist < best_dist) {  // strict: ties keep the earliest iteration
      best_dist = dist;
      best = c;
    }
  }

  ClusterConfiguration cfg;
  cfg.method_tag = "dahl";
  cfg.labels = draws.labels[best];
  cfg.num_labels = relabel_consecutive(cfg.labels);
  cfg.probabilities.assign(static_cast<size_t>(S) * cfg.num_labels, 0.0);
  for (int i = 0; i < S; ++i) {
    double row_total = 0.0;
    for (int j = 0; j < S; ++j) row_total += mean_membership[static_cast<size_t>(i) * S + j];
    for (int j = 0; j < S; ++j)
      cfg.probabilities[static_cast<size_t>(i) * cfg.num_labels + cfg.labels[j]] +=
          mean_membership[static_cast<size_t>(i) * S + j] / row_total;
  }
  return cfg;
}

std::vector<int> hungarian_assignment(const std::vector<double>& cost, int n) {
  // potentials + shortest augmenting paths, O(n^3)
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
    std::vector<char> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      double delta = std::numeric_limits<double>::infinity();
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[static_cast<size_t>(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> assignment(n);
  for (int j = 1; j <= n; ++j)
    if (p[j] > 0) assignment[p[j] - 1] = j - 1;
  return assignment;
}

std::vector<int> align_labels(const std::vector<int>& labels, const std::vector<int>& reference) {
  if (labels.size() != reference.size())
    throw std::invalid_argument("align_labels: length mismatch");
  const int lmax = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  const int rmax = reference.empty() ? 0 : *std::max_element(reference.begin(), reference.end()) + 1;
  const int n = std::max(lmax, rmax);
  if (n == 0) return labels;

  std::vector<double> overlap(static_cast<size_t>(n) * n, 0.0);
  for (size_t i = 0; i < labels.size(); ++i)
    overlap[static_cast<size_t>(labels[i]) * n + reference[i]] += 1.0;
  double max_overlap = 0.0;
  for (double o : overlap) max_overlap = std::max(max_overlap, o);
  std::vector<double> cost(overlap.size());
  for (size_t i = 0; i < overlap.size(); ++i) cost[i] = max_overlap - overlap[i];

  const auto assignment = hungarian_assignment(cost, n);
  std::vector<int> aligned(labels.size());
  for (size_t i = 0; i < labels.size(); ++i) aligned[i] = assignment[labels[i]];
  return aligned;
}

ClusterConfiguration mode_configuration(const ClusterDraws& draws) {
  const int Q = static_cast<int>(draws.labels.size());
  if (Q == 0) throw std::invalid_argument("mode_configuration: no draws");
  const int S = draws.num_regions;

  const ClusterConfiguration reference = dahl_configuration(draws);
  const int L = std::max(draws.truncation, reference.num_labels);

  std::vector<std::vector<double>> freq(S, std::vector<double>(L, 0.0));
  for (const auto& z : draws.labels) {
    const auto aligned = align_labels(z, reference.labels);
    for (int i = 0; i < S; ++i) freq[i][aligned[i]] += 1.0 / Q;
  }

  ClusterConfiguration cfg;
  cfg.method_tag = "mode";
  cfg.labels.resize(S);
  for (int i = 0; i < S; ++i) {
    int best = 0;
    for (int k = 1; k < L; ++k)
      if (freq[i][k] > freq[i][best]) best = k;
    cfg.labels[i] = best;
  }
  // keep probability columns for every label that appears or carries mass
  std::vector<int> used_columns;
  for (int k = 0; k < L; ++k) {
    bool used = false;
    for (int i = 0; i < S; ++i)
      if (freq[i][k] > 0.0 || cfg.labels[i] == k) used = true;
    if (used) used_columns.push_back(k);
  }
  std::vector<int> column_of(L, -1);
  for (size_t c = 0; c < used_columns.size(); ++c) column_of[used_columns[c]] = static_cast<int>(c);
  cfg.num_labels = static_cast<int>(used_columns.size());
  cfg.probabilities.assign(static_cast<size_t>(S) * cfg.num_labels, 0.0);
  for (int i = 0; i < S; ++i)
    for (int k = 0; k < L; ++k)
      if (column_of[k] >= 0)
        cfg.probabilities[static_cast<size_t>(i) * cfg.num_labels + column_of[k]] = freq[i][k];
  for (int& lab : cfg.labels) lab = column_of[lab];
  return cfg;
}

TwoStageResult two_stage_dpmm(const std::vector<CoefficientSample>& samples,
                              const DpmmConfig& config, const std::string& stage1_method) {
  if (samples.empty()) throw std::invalid_argument("two_stage_dpmm: no samples");
  const int S = samples[0].num_rows;

  TwoStageResult result;
  std::vector<int> reference;
  for (size_t i = 0; i < samples.size(); ++i) {
    DpmmConfig per_sample = config;
    per_sample.seed = config.seed ^ (0x9e3779b97f4a7c15ULL * (i + 1));
    const ClusterDraws draws = dpmm_fit(samples[i], per_sample);
    const ClusterConfiguration cfg =
        stage1_method == "dahl" ? dahl_configuration(draws) : mode_configuration(draws);
    if (reference.empty()) {
      reference = cfg.labels;
      result.stage1_labels.push_back(cfg.labels);
    } else {
      result.stage1_labels.push_back(align_labels(cfg.labels, reference));
    }
  }

  ClusterConfiguration& final_cfg = result.configuration;
  final_cfg.method_tag = "two_stage_" + stage1_method;
  final_cfg.labels.resize(S);
  int max_label = 0;
  for (const auto& row : result.stage1_labels)
    for (int lab : row) max_label = std::max(max_label, lab);
  const int L = max_label + 1;
  std::vector<double> freq(L);
  std::vector<double> all_freq(static_cast<size_t>(S) * L, 0.0);
  for (int i = 0; i < S; ++i) {
    std::fill(freq.begin(), freq.end(), 0.0);
    for (const auto& row : result.stage1_labels) freq[row[i]] += 1.0 / samples.size();
    int best = 0;
    for (int k = 1; k < L; ++k)
      if (freq[k] > freq[best]) best = k;
    final_cfg.labels[i] = best;
    for (int k = 0; k < L; ++k) all_freq[static_cast<size_t>(i) * L + k] = freq[k];
  }
  final_cfg.num_labels = L;
  final_cfg.probabilities = std::move(all_freq);
  return result;
}

double rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("rand_index: length mismatch");
  const size_t n = a.size();
  if (n < 2) throw std::invalid_argument("rand_index: needs at least 2 items");

  // contingency-table pair counting
  std::map<std::pair<int, int>, long long> joint;
  std::map<int, long long> count_a, count_b;
  for (size_t i = 0; i < n; ++i) {
    ++joint[{a[i], b[i]}];
    ++count_a[a[i]];
    ++count_b[b[i]];
  }
  auto choose2 = [](long long m) { return m * (m - 1) / 2; };
  long long same_both = 0, same_a = 0, same_b = 0;
  for (const auto& [key, m] : joint) same_both += choose2(m);
  for (const auto& [key, m] : count_a) same_a += choose2(m);
  for (const auto& [key, m] : count_b) same_b += choose2(m);
  const long long total = choose2(static_cast<long long>(n));
  const long long agreements = total + 2 * same_both - same_a - same_b;
  return static_cast<double>(agreements) / static_cast<double>(total);
}

}  // namespace bcgwr
