#pragma once

#include <Eigen/Dense>

namespace tradenet::detail {

struct OlsFit {
  Eigen::VectorXd beta;
  Eigen::VectorXd std_errors;
  double ssr = 0.0;
  Eigen::Index nobs = 0;
  Eigen::Index n_params = 0;

  // Gaussian log-likelihood at the ML variance ssr / n.
  double log_likelihood() const;
  // -2 logL + 2k, k counting every regressor including the constant.
  double aic() const;
};

// Throws Error(SingularRegression) when the design is rank deficient or has
// no residual degrees of freedom.
OlsFit ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& response);

}  // namespace tradenet::detail
