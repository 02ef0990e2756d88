#include "trendfilter/likelihood.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "trendfilter/error.hpp"
#include "trendfilter/kalman.hpp"

namespace trendfilter::likelihood {

namespace {

const double kLog2Pi = std::log(2.0 * std::numbers::pi);

Eigen::VectorXd to_vector(std::span<const double> y) {
  return Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
}

// Log-determinants of the family of tridiagonal matrices T_k (k = 1..n) that
// share the interior diagonal `interior`, the last diagonal entry `last` and
// off-diagonal magnitude `off`. T_{k+1} is T_k with one row/column prepended,
// so D_{k+1} = interior D_k - off^2 D_{k-1}. Only the ratio D_k / D_{k-1} is
// carried, which keeps the recursion in range for any n.
void tridiag_log_dets(double interior, double last, double off, double seed2, std::size_t n,
                      std::vector<double>& log_dets, std::vector<double>& ratios) {
  log_dets.resize(n);
  ratios.resize(n);
  ratios[0] = last;
  log_dets[0] = std::log(last);
  if (n == 1) return;
  ratios[1] = seed2 / last;
  log_dets[1] = std::log(seed2);
  const double off2 = off * off;
  for (std::size_t k = 2; k < n; ++k) {
    ratios[k] = interior - off2 / ratios[k - 1];
    log_dets[k] = log_dets[k - 1] + std::log(ratios[k]);
  }
}

}  // namespace

Eigen::MatrixXd TridiagPrecision::dense() const {
  const Eigen::Index n = diag.size();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = scale * diag(i);
    if (i + 1 < n) {
      m(i, i + 1) = scale * off;
      m(i + 1, i) = scale * off;
    }
  }
  return m;
}

Eigen::VectorXd TridiagPrecision::apply(const Eigen::VectorXd& x) const {
  const Eigen::Index n = diag.size();
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double v = diag(i) * x(i);
    if (i > 0) v += off * x(i - 1);
    if (i + 1 < n) v += off * x(i + 1);
    out(i) = scale * v;
  }
  return out;
}

double DeterminantRecursion::log_det_sigma_y() const {
  return log_det_identity_plus.back() - log_det_precision_mu.back();
}

CovModel cov_matrix_y(const MarketParams& params, std::size_t n) {
  validate(params);
  if (n == 0) throw InvalidParameter("cov_matrix_y: dimension must be at least 1");
  const auto dim = static_cast<Eigen::Index>(n);
  CovModel model;
  model.n = n;
  model.sigma_mu.resize(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      const double c = ou_cov(params.trend, static_cast<double>(i + 1) * params.delta,
                              static_cast<double>(j + 1) * params.delta);
      model.sigma_mu(i, j) = c;
      model.sigma_mu(j, i) = c;
    }
  }
  model.sigma_y = model.sigma_mu;
  model.sigma_y.diagonal().array() += params.r();
  return model;
}

double precision_scale(const MarketParams& params) {
  const double ld = params.trend.lambda_mu * params.delta;
  // e^{ld} - e^{-ld} = 2 sinh(ld)
  return 2.0 * params.trend.lambda_mu /
         (params.trend.sigma_mu * params.trend.sigma_mu * 2.0 * std::sinh(ld));
}

TridiagPrecision tridiag_precision(const MarketParams& params, std::size_t n) {
  validate(params);
  if (n == 0) throw InvalidParameter("tridiag_precision: dimension must be at least 1");
  const double ld = params.trend.lambda_mu * params.delta;
  TridiagPrecision p;
  p.scale = precision_scale(params);
  p.diag = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n), 2.0 * std::cosh(ld));
  p.diag(p.diag.size() - 1) = std::exp(ld);
  return p;
}

Eigen::MatrixXd blockwise_a_inverse(const MarketParams& params, std::size_t n) {
  validate(params);
  if (n == 0) throw InvalidParameter("blockwise_a_inverse: dimension must be at least 1");
  const double ld = params.trend.lambda_mu * params.delta;
  const double g = precision_scale(params);
  const double inv_r = 1.0 / params.r();
  const double b1 = inv_r + g * 2.0 * std::cosh(ld);  // new leading diagonal entry
  const double b2 = -g;                               // its coupling to the old leading entry

  const auto dim = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd work(dim, dim);
  // A_1 = 1/r + g e^{ld}; the current inverse lives in the bottom-right corner.
  work(dim - 1, dim - 1) = 1.0 / (inv_r + g * std::exp(ld));
  Eigen::VectorXd m(dim);
  for (Eigen::Index size = 1; size < dim; ++size) {
    const Eigen::Index off = dim - size;
    auto inv = work.block(off, off, size, size);
    m.head(size) = inv.col(0);
    const double schur = b1 - b2 * b2 * m(0);
    const double inv_schur = 1.0 / schur;
    inv.noalias() += (b2 * b2 * inv_schur) * m.head(size) * m.head(size).transpose();
    work(off - 1, off - 1) = inv_schur;
    work.block(off, off - 1, size, 1) = -b2 * inv_schur * m.head(size);
    work.block(off - 1, off, 1, size) = work.block(off, off - 1, size, 1).transpose();
  }
  return work;
}

Eigen::MatrixXd recursive_precision_y(const MarketParams& params, std::size_t n) {
  const Eigen::MatrixXd a_inv = blockwise_a_inverse(params, n);
  const Eigen::MatrixXd p = tridiag_precision(params, n).dense();
  // P - P A^{-1} P == P A^{-1} / r, evaluated without the cancelling difference.
  return (p * a_inv) / params.r();
}

DeterminantRecursion determinant_recursion(const MarketParams& params, std::size_t n) {
  validate(params);
  if (n < 2) throw InvalidParameter("determinant_recursion: needs at least two observations");
  const double ld = params.trend.lambda_mu * params.delta;
  const double g = precision_scale(params);
  const double interior = 2.0 * std::cosh(ld);
  const double last = std::exp(ld);
  const double rg = params.r() * g;

  DeterminantRecursion out;
  // Sigma_mu^{-1}: det_2 = g^2 (interior * last - 1).
  tridiag_log_dets(g * interior, g * last, g, g * g * (interior * last - 1.0), n,
                   out.log_det_precision_mu, out.precision_mu_ratio);
  // I + r Sigma_mu^{-1}
  const double a = 1.0 + rg * interior;
  const double e = 1.0 + rg * last;
  tridiag_log_dets(a, e, rg, a * e - rg * rg, n, out.log_det_identity_plus,
                   out.identity_plus_ratio);
  return out;
}

double loglik_direct(std::span<const double> y, const MarketParams& params) {
  if (y.empty()) throw EmptySeriesError("loglik_direct");
  if (y.size() > kDirectMaxDimension) {
    throw InvalidParameter("loglik_direct: dimension " + std::to_string(y.size()) +
                           " exceeds the dense cap of " + std::to_string(kDirectMaxDimension));
  }
  const CovModel model = cov_matrix_y(params, y.size());
  const Eigen::LLT<Eigen::MatrixXd> llt(model.sigma_y);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("loglik_direct: covariance is not numerically positive definite");
  }
  const Eigen::VectorXd v = to_vector(y);
  const Eigen::VectorXd w = llt.matrixL().solve(v);
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const auto n = static_cast<double>(y.size());
  return -0.5 * (n * kLog2Pi + log_det + w.squaredNorm());
}

double loglik_recursive(std::span<const double> y, const MarketParams& params) {
  if (y.size() < 2) throw InvalidParameter("loglik_recursive: needs at least two observations");
  const std::size_t n = y.size();
  const DeterminantRecursion dets = determinant_recursion(params, n);
  const Eigen::MatrixXd a_inv = blockwise_a_inverse(params, n);
  const TridiagPrecision p = tridiag_precision(params, n);

  const Eigen::VectorXd v = to_vector(y);
  const Eigen::VectorXd pv = p.apply(v);
  // Sigma_y^{-1} = P - P A^{-1} P with A = I/r + P equals P A^{-1} / r, which
  // avoids the cancellation between two large terms when P dominates I/r.
  const double quad = pv.dot(a_inv * v) / params.r();
  const auto dn = static_cast<double>(n);
  return -0.5 * (dn * kLog2Pi + dets.log_det_sigma_y() + quad);
}

double loglik_kalman(std::span<const double> y, const MarketParams& params) {
  if (y.empty()) throw EmptySeriesError("loglik_kalman");
  return kalman::kalman_filter(y, params).log_likelihood;
}

}  // namespace trendfilter::likelihood
