#pragma once

#include <cstddef>
#include <span>

#include "gazeaffect/stats.hpp"

namespace gazeaffect::stats {

/// Random-intercept model y_ij = b0 + b1 x_ij + u_j + e_ij fitted by REML.
struct LmeFit {
    double beta0 = 0.0;
    double beta1 = 0.0;
    double sigma2_u = 0.0;
    double sigma2_e = 0.0;
    double se_beta0 = 0.0;
    double se_beta1 = 0.0;
    double p_beta1 = 1.0;  // Wald, normal reference
    double loglik = 0.0;   // maximized restricted log-likelihood
    double lambda = 0.0;   // sigma2_u / sigma2_e
    std::size_t n_obs = 0;
    std::size_t n_groups = 0;
    bool degenerate = false;  // single group: OLS with sigma2_u pinned to 0
};

/// Observations with dense group indices in [0, n_groups).
struct LmeData {
    std::vector<double> x;
    std::vector<double> y;
    std::vector<std::size_t> group;
    std::size_t n_groups = 0;
};

struct LmeOptions {
    double max_lambda = 1e6;
    double tolerance = 1e-9;  // on log(1 + lambda)
};

/// Restricted log-likelihood with (beta, sigma2_e) profiled out at ratio `lambda`.
double reml_loglik(const LmeData& data, double lambda);

/// Golden-section search over log(1+lambda) in [0, log(1+max_lambda)], then GLS.
/// Throws SingularDesign or ConvergenceFailure.
LmeFit fit_lme(const LmeData& data, const LmeOptions& options = {});

/// GLS fit with the variance ratio held at `lambda` (no search).
LmeFit fit_lme_fixed(const LmeData& data, double lambda);

/// Builds LmeData from trials (participants as groups), skipping rows where either metric is missing.
LmeData lme_data(std::span<const FeatureRow> rows, const Metric& predictor, const Metric& outcome);

}  // namespace gazeaffect::stats
