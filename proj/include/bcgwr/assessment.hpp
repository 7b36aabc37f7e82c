#pragma once

#include "bcgwr/bgwr.hpp"

namespace bcgwr {

struct FitAssessment {
  double waic = 0.0;
  double dic = 0.0;
  double p_d = 0.0;  // effective parameter count
  double V = 0.0;    // total posterior variance of pointwise log-likelihoods
};

// WAIC with the plug-in pointwise density at posterior-mean parameters.
// use_lppd switches the predictive term to the standard log-mean-exp form.
std::pair<double, double> waic(const PosteriorDraws& draws, const RegressionData& data,
                               const DistanceMatrix& distances, const KernelSpec& kernel,
                               bool use_lppd = false);

// DIC = 2 * mean deviance - deviance at the posterior mean; also returns p_d.
std::pair<double, double> dic(const PosteriorDraws& draws, const RegressionData& data,
                              const DistanceMatrix& distances, const KernelSpec& kernel);

FitAssessment assess_fit(const PosteriorDraws& draws, const RegressionData& data,
                         const DistanceMatrix& distances, const KernelSpec& kernel,
                         bool use_lppd = false);

}  // namespace bcgwr
