#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "trendfilter/model.hpp"

namespace trendfilter::likelihood {

/// Largest dimension accepted by the dense reference path.
inline constexpr std::size_t kDirectMaxDimension = 4096;

/// Covariance of (y_1..y_N) and (mu_1..mu_N) with observation times t_k = k delta.
/// The mean is identically zero since mu_0 = 0.
struct CovModel {
  std::size_t n = 0;
  Eigen::MatrixXd sigma_y;
  Eigen::MatrixXd sigma_mu;
};

/// Precision of (mu_1..mu_N) in the form scale * B_N, where B_N is
/// tridiagonal with -1 off the diagonal, e^{ld} + e^{-ld} on the interior
/// diagonal and e^{ld} in the last diagonal slot.
struct TridiagPrecision {
  double scale = 0.0;
  Eigen::VectorXd diag;
  double off = -1.0;

  std::size_t size() const { return static_cast<std::size_t>(diag.size()); }
  Eigen::MatrixXd dense() const;
  /// (scale * B_N) x without forming the matrix.
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
};

/// Log-determinants produced by the two three-term recurrences, for every
/// leading size 1..N. `*_ratio` are the successive quotients D_k / D_{k-1}
/// (with D_0 = 1); a determinant sequence is positive iff all its ratios are.
struct DeterminantRecursion {
  std::vector<double> log_det_precision_mu;    ///< log det(Sigma_mu^{-1})
  std::vector<double> log_det_identity_plus;   ///< log det(I + (sigma_s^2/delta) Sigma_mu^{-1})
  std::vector<double> precision_mu_ratio;
  std::vector<double> identity_plus_ratio;

  /// log det(Sigma_y) for the largest size.
  double log_det_sigma_y() const;
};

CovModel cov_matrix_y(const MarketParams& params, std::size_t n);

/// g(lambda, sigma_mu) = 2 lambda / (sigma_mu^2 (e^{ld} - e^{-ld})).
double precision_scale(const MarketParams& params);

TridiagPrecision tridiag_precision(const MarketParams& params, std::size_t n);

/// A_N^{-1} with A_N = (delta / sigma_s^2) I + Sigma_mu^{-1}, grown one
/// leading row/column at a time by blockwise inversion.
Eigen::MatrixXd blockwise_a_inverse(const MarketParams& params, std::size_t n);

/// Sigma_y^{-1} = Sigma_mu^{-1} - Sigma_mu^{-1} A_N^{-1} Sigma_mu^{-1}.
Eigen::MatrixXd recursive_precision_y(const MarketParams& params, std::size_t n);

/// Requires n >= 2 (the recurrences are seeded with sizes 1 and 2).
DeterminantRecursion determinant_recursion(const MarketParams& params, std::size_t n);

/// Dense reference: Cholesky of Sigma_y. Throws NumericalError if the
/// factorization fails and InvalidParameter above kDirectMaxDimension.
double loglik_direct(std::span<const double> y, const MarketParams& params);

/// Matrix-inversion-lemma inverse plus log-space determinant recurrences.
/// Requires at least two observations.
double loglik_recursive(std::span<const double> y, const MarketParams& params);

/// Prediction-error decomposition through the Kalman filter with Gamma_{0/0} = 0.
double loglik_kalman(std::span<const double> y, const MarketParams& params);

}  // namespace trendfilter::likelihood
