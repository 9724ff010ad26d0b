#pragma once

#include <Eigen/Dense>
#include <cmath>

namespace oak {

/// Three-parameter logistic response model attached to label types:
///   P(type l, worker i) = p0_l + (1 - p0_l) / (1 + exp(b_l (d_l - c_i)))
/// with difficulty d, separation b > 0 and base rate p0 in [0, 1).
template <typename Scalar>
struct IrtParamsT {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vector difficulty;
  Vector separation;
  Vector base_rate;
  Vector competence;

  Eigen::Index num_types() const { return difficulty.size(); }
  Eigen::Index num_workers() const { return competence.size(); }

  /// Level-1 parameter block: b = 1, p0 = 0, all-zero difficulties.
  static IrtParamsT level1(Eigen::Index types, Eigen::Index workers) {
    IrtParamsT p;
    p.difficulty = Vector::Zero(types);
    p.separation = Vector::Ones(types);
    p.base_rate = Vector::Zero(types);
    p.competence = Vector::Zero(workers);
    return p;
  }
};

using IrtParams = IrtParamsT<double>;

template <typename Scalar>
Scalar irt_probability(Scalar competence, Scalar difficulty, Scalar separation, Scalar base_rate) {
  return base_rate +
         (Scalar(1) - base_rate) / (Scalar(1) + std::exp(separation * (difficulty - competence)));
}

}  // namespace oak
