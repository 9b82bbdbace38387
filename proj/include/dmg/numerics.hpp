#pragma once

#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Dense>

#include "dmg/errors.hpp"

namespace dmg {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

struct Tolerances {
  double fd_step = std::cbrt(std::numeric_limits<double>::epsilon());
  double newton_tol = 1e-10;
  int newton_max_iter = 50;
  double check_tol = 1e-8;
  /// Condition-number threshold above which a Jacobian counts as singular.
  double singular_cond = 1e14;

  void validate() const;
};

using ScalarFn = std::function<double(const Vec&)>;
using VectorFn = std::function<Vec(const Vec&)>;

/// Central difference of f at x along v, step fd_step * (1 + |x|).
double fd_directional(const ScalarFn& f, const Vec& x, const Vec& v, const Tolerances& tol = {});

/// Five-point stencil along v, step eps^(1/5) * (1 + |x|); error O(h^4).
double fd_directional_fine(const ScalarFn& f, const Vec& x, const Vec& v);

/// Central difference of a vector-valued curve c at t = 0, step fd_step.
Vec fd_curve(const std::function<Vec(double)>& c, const Tolerances& tol = {});

/// Five-point stencil for a curve at t = 0, step eps^(1/5).
Vec fd_curve_fine(const std::function<Vec(double)>& c);

/// Column-wise five-point Jacobian of F at x, step eps^(1/5) * (1 + |x|).
Mat fd_jacobian_fine(const VectorFn& F, const Vec& x);

/// Column-wise central-difference Jacobian of F at x.
Mat fd_jacobian(const VectorFn& F, const Vec& x, const Tolerances& tol = {});

/// Gradient of f at x by central differences along the coordinate axes.
Vec fd_gradient(const ScalarFn& f, const Vec& x, const Tolerances& tol = {});

/// Ratio of extreme singular values; +inf for a rank-deficient matrix.
double condition_estimate(const Mat& J);

struct NewtonResult {
  Vec x;
  int iterations = 0;
  double residual = 0.0;
};

/// Damped Newton iteration with FD Jacobian. Throws SingularJacobian or NoConvergence.
NewtonResult newton_solve(const VectorFn& F, const Vec& x0, const Tolerances& tol = {});

inline double inf_norm(const Vec& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

inline Mat3 hat(const Vec3& w) {
  Mat3 m;
  m << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
  return m;
}

inline Vec3 vee(const Mat3& m) { return {m(2, 1), m(0, 2), m(1, 0)}; }

}  // namespace dmg
