#include "ols.hpp"

#include <cmath>
#include <numbers>

#include "tradenet/error.hpp"

namespace tradenet::detail {

double OlsFit::log_likelihood() const {
  const double n = static_cast<double>(nobs);
  return -0.5 * n * (std::log(2.0 * std::numbers::pi * ssr / n) + 1.0);
}

double OlsFit::aic() const { return -2.0 * log_likelihood() + 2.0 * static_cast<double>(n_params); }

OlsFit ols(const Eigen::MatrixXd& design, const Eigen::VectorXd& response) {
  const Eigen::Index n = design.rows();
  const Eigen::Index k = design.cols();
  if (n <= k) throw Error(Errc::SingularRegression, "no residual degrees of freedom");

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < k) throw Error(Errc::SingularRegression, "design matrix is rank deficient");

  OlsFit fit;
  fit.nobs = n;
  fit.n_params = k;
  fit.beta = qr.solve(response);
  const Eigen::VectorXd resid = response - design * fit.beta;
  fit.ssr = resid.squaredNorm();

  // (X'X)^-1 = P R^-1 R^-T P'
  const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
  const Eigen::MatrixXd unpermuted = r_inv * r_inv.transpose();
  const Eigen::MatrixXd xtx_inv =
      qr.colsPermutation() * unpermuted * qr.colsPermutation().transpose();

  const double sigma2 = fit.ssr / static_cast<double>(n - k);
  fit.std_errors = (xtx_inv.diagonal() * sigma2).cwiseSqrt();
  if (!fit.beta.allFinite() || !fit.std_errors.allFinite()) {
    throw Error(Errc::SingularRegression, "non-finite regression estimates");
  }
  return fit;
}

}  // namespace tradenet::detail
