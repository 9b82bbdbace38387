#include "dmg/numerics.hpp"

#include <sstream>

namespace dmg {

namespace {

std::string describe(const Vec& x) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << ")";
  return os.str();
}

double checked(const ScalarFn& f, const Vec& x) {
  const double v = f(x);
  if (!std::isfinite(v)) throw EvaluationError("non-finite function value at " + describe(x), x);
  return v;
}

Vec checked(const VectorFn& F, const Vec& x) {
  Vec v = F(x);
  if (!v.allFinite()) throw EvaluationError("non-finite residual at " + describe(x), x);
  return v;
}

}  // namespace

void Tolerances::validate() const {
  if (!(fd_step > 0 && newton_tol > 0 && check_tol > 0 && singular_cond > 0))
    throw DomainError("tolerances must be positive");
  if (newton_max_iter < 1) throw DomainError("newton_max_iter must be at least 1");
}

double fd_directional(const ScalarFn& f, const Vec& x, const Vec& v, const Tolerances& tol) {
  const double h = tol.fd_step * (1.0 + x.norm());
  const double fp = checked(f, x + h * v);
  const double fm = checked(f, x - h * v);
  return (fp - fm) / (2.0 * h);
}

double fd_directional_fine(const ScalarFn& f, const Vec& x, const Vec& v) {
  static const double step = std::pow(std::numeric_limits<double>::epsilon(), 0.2);
  const double h = step * (1.0 + x.norm());
  const double f1 = checked(f, x + h * v), f_1 = checked(f, x - h * v);
  const double f2 = checked(f, x + 2 * h * v), f_2 = checked(f, x - 2 * h * v);
  return (8.0 * (f1 - f_1) - (f2 - f_2)) / (12.0 * h);
}

Vec fd_curve(const std::function<Vec(double)>& c, const Tolerances& tol) {
  const double h = tol.fd_step;
  Vec p = c(h), m = c(-h);
  if (!p.allFinite() || !m.allFinite())
    throw EvaluationError("non-finite curve value", Vec::Constant(1, h));
  return (p - m) / (2.0 * h);
}

Vec fd_curve_fine(const std::function<Vec(double)>& c) {
  static const double h = std::pow(std::numeric_limits<double>::epsilon(), 0.2);
  const Vec p1 = c(h), m1 = c(-h), p2 = c(2 * h), m2 = c(-2 * h);
  if (!p1.allFinite() || !m1.allFinite() || !p2.allFinite() || !m2.allFinite())
    throw EvaluationError("non-finite curve value", Vec::Constant(1, h));
  return (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * h);
}

Mat fd_jacobian_fine(const VectorFn& F, const Vec& x) {
  Mat J;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const Vec e = Vec::Unit(x.size(), j) * (1.0 + x.norm());
    const Vec col = fd_curve_fine([&](double t) { return F(x + t * e); }) / (1.0 + x.norm());
    if (j == 0) J.resize(col.size(), x.size());
    J.col(j) = col;
  }
  if (x.size() == 0) J.resize(F(x).size(), 0);
  return J;
}

Mat fd_jacobian(const VectorFn& F, const Vec& x, const Tolerances& tol) {
  const double h = tol.fd_step * (1.0 + x.norm());
  Mat J;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Vec xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    Vec col = (checked(F, xp) - checked(F, xm)) / (2.0 * h);
    if (j == 0) J.resize(col.size(), x.size());
    J.col(j) = col;
  }
  return J;
}

Vec fd_gradient(const ScalarFn& f, const Vec& x, const Tolerances& tol) {
  Vec g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    g[i] = fd_directional(f, x, Vec::Unit(x.size(), i), tol);
  return g;
}

double condition_estimate(const Mat& J) {
  if (J.size() == 0) return 1.0;
  Eigen::JacobiSVD<Mat> svd(J);
  const auto& s = svd.singularValues();
  const double smin = s[s.size() - 1];
  if (!(smin > 0)) return std::numeric_limits<double>::infinity();
  return s[0] / smin;
}

NewtonResult newton_solve(const VectorFn& F, const Vec& x0, const Tolerances& tol) {
  NewtonResult r;
  r.x = x0;
  Vec Fx = checked(F, r.x);
  r.residual = inf_norm(Fx);
  while (r.residual > tol.newton_tol) {
    if (r.iterations >= tol.newton_max_iter) throw NoConvergence(r.residual, r.iterations);
    const Mat J = fd_jacobian(F, r.x, tol);
    const double cond = condition_estimate(J);
    if (cond > tol.singular_cond) throw SingularJacobian(cond);
    const Vec dx = J.colPivHouseholderQr().solve(-Fx);
    double lambda = 1.0;
    Vec xn = r.x + dx;
    Vec Fn = checked(F, xn);
    for (int halvings = 0; halvings < 30 && inf_norm(Fn) >= r.residual; ++halvings) {
      lambda *= 0.5;
      xn = r.x + lambda * dx;
      Fn = checked(F, xn);
    }
    r.x = xn;
    Fx = Fn;
    r.residual = inf_norm(Fx);
    ++r.iterations;
  }
  return r;
}

}  // namespace dmg
