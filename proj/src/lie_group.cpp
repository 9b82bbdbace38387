#include "dmg/lie_group.hpp"

#include <cmath>

namespace dmg {

namespace {

using cd = std::complex<double>;
const cd kI(0.0, 1.0);

Vec qmul(const Vec& a, const Vec& b) {
  Vec r(4);
  r[0] = a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3];
  r[1] = a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2];
  r[2] = a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1];
  r[3] = a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0];
  return r;
}

Vec pure(const Vec& v, double scale) {
  Vec q(4);
  q << 0.0, scale * v[0], scale * v[1], scale * v[2];
  return q;
}

void require_size(const LieGroup& G, const Vec& g) {
  if (g.size() != G.coordinate_dim())
    throw DomainError(G.name() + ": expected " + std::to_string(G.coordinate_dim()) +
                      " coordinates, got " + std::to_string(g.size()));
  if (!g.allFinite()) throw DomainError(G.name() + ": non-finite coordinates");
}

void same_tag(const LieGroup* a, const LieGroup* b, const char* op) {
  if (a == nullptr || a != b)
    throw TagError(std::string(op) + ": operands belong to different groups");
}

Vec quat_of_rotation(const Mat3& R) {
  Vec q(4);
  const double tr = R.trace();
  if (tr > 0) {
    const double s = std::sqrt(tr + 1.0) * 2;
    q << 0.25 * s, (R(2, 1) - R(1, 2)) / s, (R(0, 2) - R(2, 0)) / s, (R(1, 0) - R(0, 1)) / s;
  } else if (R(0, 0) > R(1, 1) && R(0, 0) > R(2, 2)) {
    const double s = std::sqrt(1.0 + R(0, 0) - R(1, 1) - R(2, 2)) * 2;
    q << (R(2, 1) - R(1, 2)) / s, 0.25 * s, (R(0, 1) + R(1, 0)) / s, (R(0, 2) + R(2, 0)) / s;
  } else if (R(1, 1) > R(2, 2)) {
    const double s = std::sqrt(1.0 + R(1, 1) - R(0, 0) - R(2, 2)) * 2;
    q << (R(0, 2) - R(2, 0)) / s, (R(0, 1) + R(1, 0)) / s, 0.25 * s, (R(1, 2) + R(2, 1)) / s;
  } else {
    const double s = std::sqrt(1.0 + R(2, 2) - R(0, 0) - R(1, 1)) * 2;
    q << (R(1, 0) - R(0, 1)) / s, (R(0, 2) + R(2, 0)) / s, (R(1, 2) + R(2, 1)) / s, 0.25 * s;
  }
  if (q[0] < 0) q = -q;
  return q / q.norm();
}

Vec quat_log(const Vec& q) {
  const Vec3 v(q[1], q[2], q[3]);
  const double s = v.norm();
  if (s < 1e-12) return Vec(2.0 * v / q[0]);
  return Vec(2.0 * std::atan2(s, q[0]) / s * v);
}

}  // namespace

// ---- generic defaults ----

Vec LieGroup::coad(const Vec& xi, const Vec& mu) const {
  const int n = algebra_dim();
  Vec r(n);
  for (int i = 0; i < n; ++i) r[i] = -mu.dot(bracket(xi, Vec::Unit(n, i)));
  return r;
}

Mat LieGroup::Ad(const Vec& g) const {
  const Mat Jl = lift_matrix(Side::Left, g);
  const Mat Jr = lift_matrix(Side::Right, g);
  return Jr.colPivHouseholderQr().solve(Jl);
}

void LieGroup::validate(const Vec& g) const { require_size(*this, g); }

Vec LieGroup::left_lift(const Vec& g, const Vec& xi) const { return fd_lift(Side::Left, g, xi); }
Vec LieGroup::right_lift(const Vec& g, const Vec& xi) const { return fd_lift(Side::Right, g, xi); }

Mat LieGroup::lift_matrix(Side s, const Vec& g) const {
  const int n = algebra_dim();
  Mat J(coordinate_dim(), n);
  for (int i = 0; i < n; ++i) J.col(i) = lift(s, g, Vec::Unit(n, i));
  return J;
}

Vec LieGroup::fd_lift(Side s, const Vec& g, const Vec& xi, const Tolerances& tol) const {
  return fd_curve(
      [&](double t) { return s == Side::Left ? mul(g, exp(t * xi)) : mul(exp(t * xi), g); }, tol);
}

Vec LieGroup::random(Rng& rng, double sigma) const {
  std::normal_distribution<double> n(0.0, sigma);
  Vec xi(algebra_dim());
  for (int i = 0; i < xi.size(); ++i) xi[i] = n(rng);
  return exp(xi);
}

// ---- SU(2) ----

Vec SU2Group::identity() const { return Vec::Unit(4, 0); }
Vec SU2Group::mul(const Vec& a, const Vec& b) const {
  Vec r = qmul(a, b);
  return r / r.norm();
}
Vec SU2Group::inv(const Vec& g) const {
  Vec r = g;
  r.tail<3>() *= -1.0;
  return r;
}
Vec SU2Group::exp(const Vec& xi) const {
  const double th = xi.norm();
  Vec q(4);
  const double sinc = th < 1e-8 ? 0.5 - th * th / 48.0 : std::sin(th / 2) / th;
  q << std::cos(th / 2), sinc * xi[0], sinc * xi[1], sinc * xi[2];
  return q;
}
Vec SU2Group::log(const Vec& g) const { return quat_log(g); }
Vec SU2Group::bracket(const Vec& a, const Vec& b) const {
  return Vec(Vec3(a.head<3>()).cross(Vec3(b.head<3>())));
}
Vec SU2Group::coad(const Vec& xi, const Vec& mu) const { return bracket(xi, mu); }
Mat SU2Group::Ad(const Vec& g) const { return rot_of(g); }
void SU2Group::validate(const Vec& g) const {
  require_size(*this, g);
  if (std::abs(g.norm() - 1.0) > 1e-9) throw DomainError("SU(2): quaternion is not unit");
}
Vec SU2Group::retract(const Vec& x) const { return x / x.norm(); }
Vec SU2Group::left_lift(const Vec& g, const Vec& xi) const { return qmul(g, pure(xi, 0.5)); }
Vec SU2Group::right_lift(const Vec& g, const Vec& xi) const { return qmul(pure(xi, 0.5), g); }

// ---- K ----

Vec KGroup::identity() const { return Vec::Zero(3); }
Vec KGroup::mul(const Vec& a, const Vec& b) const { return a * (1.0 + b[2]) + b; }
Vec KGroup::inv(const Vec& g) const { return -g / (1.0 + g[2]); }
Vec KGroup::exp(const Vec& y) const {
  const double gam = y[2];
  const double f = std::abs(gam) < 1e-10 ? 1.0 + gam / 2 : std::expm1(gam) / gam;
  Vec r(3);
  r << y[0] * f, y[1] * f, std::expm1(gam);
  return r;
}
Vec KGroup::log(const Vec& g) const {
  validate(g);
  const double gam = std::log1p(g[2]);
  const double f = std::abs(g[2]) < 1e-10 ? 1.0 - g[2] / 2 : gam / g[2];
  Vec r(3);
  r << g[0] * f, g[1] * f, gam;
  return r;
}
Vec KGroup::bracket(const Vec& a, const Vec& b) const {
  Vec r(3);
  r << a[0] * b[2] - b[0] * a[2], a[1] * b[2] - b[1] * a[2], 0.0;
  return r;
}
Vec KGroup::coad(const Vec& y, const Vec& psi) const {
  return y[2] * psi - psi.dot(y) * Vec::Unit(3, 2);
}
Mat KGroup::Ad(const Vec& g) const {
  Mat m = Mat::Identity(3, 3);
  m.col(2) += g;
  return m / (1.0 + g[2]);
}
void KGroup::validate(const Vec& g) const {
  require_size(*this, g);
  if (!(g[2] > -1.0)) throw DomainError("K: coordinate c must exceed -1");
}
Vec KGroup::left_lift(const Vec& g, const Vec& y) const { return y + y[2] * g; }
Vec KGroup::right_lift(const Vec& g, const Vec& y) const { return (1.0 + g[2]) * y; }

// ---- SO(3) ----

Mat3 SO3Group::to_matrix(const Vec& g) {
  Mat3 R;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) R(i, j) = g[3 * i + j];
  return R;
}
Vec SO3Group::from_matrix(const Mat3& R) {
  Vec g(9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) g[3 * i + j] = R(i, j);
  return g;
}
Vec SO3Group::identity() const { return from_matrix(Mat3::Identity()); }
Vec SO3Group::mul(const Vec& a, const Vec& b) const {
  return from_matrix(to_matrix(a) * to_matrix(b));
}
Vec SO3Group::inv(const Vec& g) const { return from_matrix(to_matrix(g).transpose()); }
Vec SO3Group::exp(const Vec& xi) const {
  const Vec3 w = xi.head<3>();
  const double th = w.norm();
  const Mat3 W = hat(w);
  double a, b;
  if (th < 1e-6) {
    a = 1.0 - th * th / 6.0;
    b = 0.5 - th * th / 24.0;
  } else {
    a = std::sin(th) / th;
    b = (1.0 - std::cos(th)) / (th * th);
  }
  return from_matrix(Mat3::Identity() + a * W + b * W * W);
}
Vec SO3Group::log(const Vec& g) const { return quat_log(quat_of_rotation(to_matrix(g))); }
Vec SO3Group::bracket(const Vec& a, const Vec& b) const {
  return Vec(Vec3(a.head<3>()).cross(Vec3(b.head<3>())));
}
Vec SO3Group::coad(const Vec& xi, const Vec& mu) const { return bracket(xi, mu); }
Mat SO3Group::Ad(const Vec& g) const { return to_matrix(g); }
void SO3Group::validate(const Vec& g) const {
  require_size(*this, g);
  const Mat3 R = to_matrix(g);
  if ((R.transpose() * R - Mat3::Identity()).norm() > 1e-9 || R.determinant() <= 0)
    throw DomainError("SO(3): matrix is not a rotation");
}
Vec SO3Group::retract(const Vec& x) const {
  Eigen::JacobiSVD<Mat3> svd(to_matrix(x), Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 U = svd.matrixU();
  const Mat3 V = svd.matrixV();
  if ((U * V.transpose()).determinant() < 0) U.col(2) *= -1.0;
  return from_matrix(U * V.transpose());
}
Vec SO3Group::left_lift(const Vec& g, const Vec& xi) const {
  return from_matrix(to_matrix(g) * hat(xi.head<3>()));
}
Vec SO3Group::right_lift(const Vec& g, const Vec& xi) const {
  return from_matrix(hat(xi.head<3>()) * to_matrix(g));
}

GroupPtr make_su2() { return std::make_shared<SU2Group>(); }
GroupPtr make_k() { return std::make_shared<KGroup>(); }
GroupPtr make_so3() { return std::make_shared<SO3Group>(); }
GroupPtr make_so2() { return std::make_shared<SO2Group>(); }
GroupPtr make_rn(int n) { return std::make_shared<RnGroup>(n); }

// ---- tagged interface ----

GroupElement element(const LieGroup& G, Vec coords) {
  G.validate(coords);
  return {&G, std::move(coords)};
}
AlgebraVector algebra(const LieGroup& G, Vec coords) {
  if (coords.size() != G.algebra_dim()) throw DomainError(G.name() + ": bad algebra dimension");
  return {&G, std::move(coords)};
}
Covector covector(const LieGroup& G, Vec coords) {
  if (coords.size() != G.algebra_dim()) throw DomainError(G.name() + ": bad covector dimension");
  return {&G, std::move(coords)};
}

GroupElement group_mul(const GroupElement& g1, const GroupElement& g2) {
  same_tag(g1.group, g2.group, "group_mul");
  g1.group->validate(g1.coords);
  g1.group->validate(g2.coords);
  return {g1.group, g1.group->mul(g1.coords, g2.coords)};
}
GroupElement group_inv(const GroupElement& g) {
  g.group->validate(g.coords);
  return {g.group, g.group->inv(g.coords)};
}
GroupElement exp(const AlgebraVector& xi) { return {xi.group, xi.group->exp(xi.coords)}; }
AlgebraVector Ad(const GroupElement& g, const AlgebraVector& xi) {
  same_tag(g.group, xi.group, "Ad");
  g.group->validate(g.coords);
  return {g.group, g.group->Ad(g.coords) * xi.coords};
}
Covector coad(const AlgebraVector& xi, const Covector& mu) {
  same_tag(xi.group, mu.group, "coad");
  return {xi.group, xi.group->coad(xi.coords, mu.coords)};
}
AlgebraVector bracket(const AlgebraVector& a, const AlgebraVector& b) {
  same_tag(a.group, b.group, "bracket");
  return {a.group, a.group->bracket(a.coords, b.coords)};
}
double pairing(const Covector& mu, const AlgebraVector& xi) {
  same_tag(mu.group, xi.group, "pairing");
  return mu.coords.dot(xi.coords);
}

Covector translate_covector(Side side, const GroupElement& g, const Vec& mu_at) {
  const LieGroup& G = *g.group;
  if (mu_at.size() != G.coordinate_dim()) throw TagError("translate_covector: bad cotangent size");
  return {g.group, G.lift_matrix(side, g.coords).transpose() * mu_at};
}

Mat translation_jacobian(const LieGroup& G, Side side, const Vec& g, const Vec& x,
                         const Tolerances& tol) {
  return fd_jacobian(
      [&](const Vec& y) { return side == Side::Right ? G.mul(y, g) : G.mul(g, y); }, x, tol);
}

// ---- SU(2) views ----

Mat3 rot_of(const Vec& q) {
  if (q.size() != 4 || std::abs(q.norm() - 1.0) > 1e-9)
    throw DomainError("rot_of: quaternion is not unit");
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Mat3 R;
  R << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return R;
}

Mat2c su2_to_complex(const Vec& q) {
  Mat2c m;
  m << cd(q[0], -q[3]), cd(-q[2], -q[1]), cd(q[2], -q[1]), cd(q[0], q[3]);
  return m;
}

Vec su2_from_complex(const Mat2c& m) {
  Vec q(4);
  q << m(0, 0).real(), -m(0, 1).imag(), -m(0, 1).real(), -m(0, 0).imag();
  return q;
}

Mat2c su2_algebra_to_complex(const Vec3& x) {
  Mat2c m;
  m << cd(0, -x[2] / 2), cd(-x[1] / 2, -x[0] / 2), cd(x[1] / 2, -x[0] / 2), cd(0, x[2] / 2);
  return m;
}

Vec3 su2_algebra_from_complex(const Mat2c& m) {
  return {-2 * m(0, 1).imag(), -2 * m(0, 1).real(), -2 * m(0, 0).imag()};
}

// ---- K views ----

Mat2c k_to_complex(const Vec3& b) {
  if (!(b[2] > -1.0)) throw DomainError("K: coordinate c must exceed -1");
  const double s = std::sqrt(1.0 + b[2]);
  Mat2c m;
  m << cd(s, 0), cd(0, 0), cd(b[0], b[1]) / s, cd(1.0 / s, 0);
  return m;
}

Mat3 k_to_real3(const Vec3& b) {
  if (!(b[2] > -1.0)) throw DomainError("K: coordinate c must exceed -1");
  Mat3 m;
  m << 1 + b[2], 0, 0, 0, 1 + b[2], 0, -b[0], -b[1], 1;
  return m;
}

Vec3 k_from_complex(const Mat2c& m) {
  const double d = m(0, 0).real();
  if (!(d > 0)) throw DomainError("K: diagonal entry must be positive");
  const cd z = m(1, 0) * d;
  return {z.real(), z.imag(), d * d - 1.0};
}

Vec3 k_from_real3(const Mat3& m) {
  const Vec3 b(-m(2, 0), -m(2, 1), m(0, 0) - 1.0);
  if (!(b[2] > -1.0)) throw DomainError("K: coordinate c must exceed -1");
  return b;
}

Mat2c k_algebra_to_complex(const Vec3& y) {
  Mat2c m;
  m << cd(y[2] / 2, 0), cd(0, 0), cd(y[0], y[1]), cd(-y[2] / 2, 0);
  return m;
}

Mat3 k_algebra_to_real3(const Vec3& y) {
  Mat3 m;
  m << y[2], 0, 0, 0, y[2], 0, -y[0], -y[1], 0;
  return m;
}

namespace {

Vec3 k_coords_of(KRep from, const KValue& v, bool group) {
  switch (from) {
    case KRep::Coords: return std::get<Vec3>(v);
    case KRep::Complex2: {
      const Mat2c& m = std::get<Mat2c>(v);
      if (group) return k_from_complex(m);
      return {m(1, 0).real(), m(1, 0).imag(), 2 * m(0, 0).real()};
    }
    case KRep::Real3: {
      const Mat3& m = std::get<Mat3>(v);
      if (group) return k_from_real3(m);
      return {-m(2, 0), -m(2, 1), m(0, 0)};
    }
  }
  throw DomainError("K: unknown representation");
}

KValue k_value_of(KRep to, const Vec3& b, bool group) {
  switch (to) {
    case KRep::Coords:
      if (group && !(b[2] > -1.0)) throw DomainError("K: coordinate c must exceed -1");
      return b;
    case KRep::Complex2: return group ? k_to_complex(b) : k_algebra_to_complex(b);
    case KRep::Real3: return group ? k_to_real3(b) : k_algebra_to_real3(b);
  }
  throw DomainError("K: unknown representation");
}

}  // namespace

KValue k_convert(KRep from, KRep to, const KValue& value) {
  return k_value_of(to, k_coords_of(from, value, true), true);
}

KValue k_algebra_convert(KRep from, KRep to, const KValue& value) {
  return k_value_of(to, k_coords_of(from, value, false), false);
}

}  // namespace dmg
