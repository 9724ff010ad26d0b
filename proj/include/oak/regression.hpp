#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>

namespace oak {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
struct LineFit {
  Scalar slope{1};
  Scalar intercept{0};

  Scalar operator()(Scalar x) const { return slope * x + intercept; }
};

/// Weighted least-squares line minimizing sum_i w_i (slope x_i + intercept - y_i)^2.
/// Returns nullopt when fewer than two points carry positive weight or the
/// weighted variance of x is zero.
template <typename Scalar, typename DerivedX, typename DerivedY, typename DerivedW>
std::optional<LineFit<Scalar>> weighted_line_fit(const Eigen::MatrixBase<DerivedX>& x,
                                                 const Eigen::MatrixBase<DerivedY>& y,
                                                 const Eigen::MatrixBase<DerivedW>& w) {
  eigen_assert(x.size() == y.size() && x.size() == w.size());
  if ((w.array() > Scalar(0)).count() < 2) return std::nullopt;
  const Scalar total = w.sum();
  const Scalar x_mean = w.dot(x) / total;
  const Scalar y_mean = w.dot(y) / total;
  const Vec<Scalar> dx = (x.array() - x_mean).matrix();
  const Scalar sxx = w.dot(dx.cwiseProduct(dx));
  // Relative guard: spreads below ~1e-14 of the x scale are rounding noise.
  const Scalar scale = std::max(Scalar(1), x.cwiseAbs().maxCoeff());
  if (!(sxx > Scalar(1e-28) * scale * scale * total)) return std::nullopt;
  const Scalar sxy = w.dot(dx.cwiseProduct((y.array() - y_mean).matrix()));
  LineFit<Scalar> fit;
  fit.slope = sxy / sxx;
  fit.intercept = y_mean - fit.slope * x_mean;
  return fit;
}

/// Objective sum_i w_i (fit(x_i) - y_i)^2.
template <typename Scalar, typename DerivedX, typename DerivedY, typename DerivedW>
Scalar weighted_squared_error(const LineFit<Scalar>& fit, const Eigen::MatrixBase<DerivedX>& x,
                              const Eigen::MatrixBase<DerivedY>& y,
                              const Eigen::MatrixBase<DerivedW>& w) {
  const Vec<Scalar> r = ((fit.slope * x.array() + fit.intercept) - y.array()).matrix();
  return w.dot(r.cwiseProduct(r));
}

/// Coefficient of determination of an unweighted least-squares line.
template <typename Scalar, typename DerivedX, typename DerivedY>
Scalar r_squared(const LineFit<Scalar>& fit, const Eigen::MatrixBase<DerivedX>& x,
                 const Eigen::MatrixBase<DerivedY>& y) {
  const Vec<Scalar> resid = (y.array() - (fit.slope * x.array() + fit.intercept)).matrix();
  const Scalar ss_res = resid.squaredNorm();
  const Scalar ss_tot = (y.array() - y.mean()).square().sum();
  return Scalar(1) - ss_res / ss_tot;
}

/// Weighted Pearson correlation.
template <typename Scalar, typename DerivedX, typename DerivedY, typename DerivedW>
Scalar weighted_correlation(const Eigen::MatrixBase<DerivedX>& x,
                            const Eigen::MatrixBase<DerivedY>& y,
                            const Eigen::MatrixBase<DerivedW>& w) {
  const Scalar total = w.sum();
  const Vec<Scalar> dx = (x.array() - w.dot(x) / total).matrix();
  const Vec<Scalar> dy = (y.array() - w.dot(y) / total).matrix();
  const Scalar sxy = w.dot(dx.cwiseProduct(dy));
  const Scalar sxx = w.dot(dx.cwiseProduct(dx));
  const Scalar syy = w.dot(dy.cwiseProduct(dy));
  return sxy / std::sqrt(sxx * syy);
}

/// The decreasing logistic g(x) = 1 / (1 + e^x) and its inverse.
template <typename Scalar>
Scalar logistic_g(Scalar x) {
  return Scalar(1) / (Scalar(1) + std::exp(x));
}

template <typename Scalar>
Scalar logistic_g_inv(Scalar p) {
  return std::log(Scalar(1) / p - Scalar(1));
}

}  // namespace oak
