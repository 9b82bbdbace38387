#include "dmg/matched_group.hpp"

#include <sstream>

namespace dmg {

namespace {

const Tolerances kTol{};
// Step for mixed second differences, about the fourth root of machine epsilon.
constexpr double kMixedStep = 1e-4;

Mat pinv(const Mat& J) { return (J.transpose() * J).ldlt().solve(J.transpose()); }

/// Maps ambient tangent vectors at the identity to algebra coordinates.
Mat identity_chart(const LieGroup& G) { return pinv(G.lift_matrix(Side::Right, G.identity())); }

}  // namespace

// ---- SU(2) and K ----

Vec k_on_su2(const Vec& B, const Vec& A) {
  const Mat2c Bc = k_to_complex(B.head<3>());
  const Mat2c Ac = su2_to_complex(A);
  Mat2c lower = Mat2c::Zero(), upper = Mat2c::Zero();
  lower(1, 1) = 1.0;
  upper(0, 0) = 1.0;
  const Mat2c m1 = Bc * Ac * lower;
  const Mat2c m2 = Bc.adjoint().inverse() * Ac * upper;
  const double norm = std::sqrt((m1.adjoint() * m1).trace().real());
  return su2_from_complex((m1 + m2) / norm);
}

Vec3 k_orbit_point(const Vec3& B) {
  const double opc = 1.0 + B[2];
  const double s = B.squaredNorm() / (2.0 * opc);
  return B / opc + s * Vec3::UnitZ();
}

Vec su2_on_k(const Vec& B, const Vec& A) {
  const Vec3 b = B.head<3>();
  const double s = b.squaredNorm() / (2.0 * (1.0 + b[2]));
  const Vec3 p = rot_of(A).transpose() * k_orbit_point(b);
  const double opc = 1.0 / (1.0 + s - p[2]);
  return Vec(opc * (p - s * Vec3::UnitZ()));
}

Vec su2_on_k_printed(const Vec& B, const Vec& A) {
  const Vec3 b = B.head<3>();
  const double s = b.squaredNorm() / (2.0 * (1.0 + b[2]));
  return Vec(s * Vec3::UnitZ() + rot_of(A) * (b - s * Vec3::UnitZ()));
}

Mat2c sl2c_matrix(const MatchedPairElement& x) {
  return su2_to_complex(x.g) * k_to_complex(x.h.head<3>());
}

Mat2c sl2c_algebra(const MatchedAlgebraVector& v) {
  return su2_algebra_to_complex(v.xi.head<3>()) + k_algebra_to_complex(v.eta.head<3>());
}

MatchedPairGroup make_sl2c() {
  MatchedPairGroup d;
  d.name = "SU(2)xK";
  d.G = make_su2();
  d.H = make_k();
  d.left_action = k_on_su2;
  d.right_action = su2_on_k;
  d.algebra_left = [](const Vec& B) { return Mat(k_to_real3(B.head<3>())); };
  d.algebra_right = [](const Vec& A) { return Mat(rot_of(A).transpose()); };
  d.lift_eta_on_g = [G = d.G](const Vec& A) {
    const Vec3 w = rot_of(A).col(2) - Vec3::UnitZ();
    return Mat(G->lift_matrix(Side::Right, A) * (-hat(w)));
  };
  d.lift_h_on_xi = [](const Vec& B) {
    const Vec3 b = B.head<3>();
    Mat3 M = Mat3::Identity();
    M.col(2) += b;
    return Mat((1.0 + b[2]) * M * hat(k_orbit_point(b)));
  };
  d.eta_on_xi_left = [](const Vec& eta, const Vec& xi) {
    return Vec(k_algebra_to_real3(eta.head<3>()) * xi.head<3>());
  };
  d.eta_on_xi_right = [](const Vec& eta, const Vec& xi) {
    return Vec(Vec3(eta.head<3>()).cross(Vec3(xi.head<3>())));
  };
  return d;
}

MatchedPairGroup make_direct_product(GroupPtr G, GroupPtr H) {
  MatchedPairGroup d;
  d.name = G->name() + "x" + H->name();
  d.G = std::move(G);
  d.H = std::move(H);
  d.left_action = [](const Vec&, const Vec& g) { return g; };
  d.right_action = [](const Vec& h, const Vec&) { return h; };
  return d.without_actions();
}

MatchedPairGroup MatchedPairGroup::generic() const {
  MatchedPairGroup d;
  d.name = name;
  d.G = G;
  d.H = H;
  d.left_action = left_action;
  d.right_action = right_action;
  return d;
}

MatchedPairGroup MatchedPairGroup::without_right_action() const {
  MatchedPairGroup d = *this;
  const int ng = G->algebra_dim(), nh = H->algebra_dim(), ch = H->coordinate_dim();
  d.right_action = [](const Vec& h, const Vec&) { return h; };
  d.algebra_right = [nh](const Vec&) { return Mat(Mat::Identity(nh, nh)); };
  d.lift_h_on_xi = [ch, ng](const Vec&) { return Mat(Mat::Zero(ch, ng)); };
  d.eta_on_xi_right = [nh](const Vec&, const Vec&) { return Vec(Vec::Zero(nh)); };
  return d;
}

MatchedPairGroup MatchedPairGroup::without_left_action() const {
  MatchedPairGroup d = *this;
  const int ng = G->algebra_dim(), nh = H->algebra_dim(), cg = G->coordinate_dim();
  d.left_action = [](const Vec&, const Vec& g) { return g; };
  d.algebra_left = [ng](const Vec&) { return Mat(Mat::Identity(ng, ng)); };
  d.lift_eta_on_g = [cg, nh](const Vec&) { return Mat(Mat::Zero(cg, nh)); };
  d.eta_on_xi_left = [ng](const Vec&, const Vec&) { return Vec(Vec::Zero(ng)); };
  return d;
}

MatchedPairGroup MatchedPairGroup::without_actions() const {
  return without_left_action().without_right_action();
}

// ---- group structure ----

MatchedPairElement mp_identity(const MatchedPairGroup& d) {
  return {d.G->identity(), d.H->identity()};
}

MatchedPairElement mp_mul(const MatchedPairGroup& d, const MatchedPairElement& a,
                          const MatchedPairElement& b) {
  return {d.G->mul(a.g, d.left_action(a.h, b.g)), d.H->mul(d.right_action(a.h, b.g), b.h)};
}

MatchedPairElement mp_inv(const MatchedPairGroup& d, const MatchedPairElement& a) {
  const Vec gi = d.G->inv(a.g), hi = d.H->inv(a.h);
  return {d.left_action(hi, gi), d.right_action(hi, gi)};
}

MatchedPairElement mp_random(const MatchedPairGroup& d, Rng& rng, double sigma) {
  MatchedPairElement x;
  x.g = d.G->random(rng, sigma);
  x.h = d.H->random(rng, sigma);
  return x;
}

void AxiomReport::record(std::size_t i, double v) {
  if (!std::isfinite(v)) v = std::numeric_limits<double>::infinity();
  violation[i] = std::max(violation[i], v);
}

void AxiomReport::finish() {
  max_violation = 0.0;
  for (double v : violation) max_violation = std::max(max_violation, v);
  pass = max_violation <= tol;
}

std::string AxiomReport::summary() const {
  std::ostringstream os;
  os.precision(3);
  os << (pass ? "pass" : "FAIL") << " max " << std::scientific << max_violation << " (tol " << tol
     << ", " << samples << " samples)";
  for (std::size_t i = 0; i < names.size(); ++i)
    os << "\n  " << names[i] << ": " << violation[i];
  return os.str();
}

AxiomReport axiom_check_group(const MatchedPairGroup& d, int samples, Rng& rng, double tol) {
  AxiomReport r;
  r.names = {"h|>(g1 g2) = (h|>g1)((h<|g1)|>g2)",
             "(h1 h2)<|g = (h1<|(h2|>g))(h2<|g)",
             "h|>e = e",
             "e<|g = e",
             "(h1 h2)|>g = h1|>(h2|>g)",
             "h<|(g1 g2) = (h<|g1)<|g2",
             "e|>g = g, h<|e = h"};
  r.violation.assign(r.names.size(), 0.0);
  r.tol = tol;
  r.samples = samples;
  const LieGroup &G = *d.G, &H = *d.H;
  for (int i = 0; i < samples; ++i) {
    const Vec g1 = G.random(rng), g2 = G.random(rng);
    const Vec h1 = H.random(rng), h2 = H.random(rng);
    const auto L = d.left_action;
    const auto R = d.right_action;
    r.record(0, (L(h1, G.mul(g1, g2)) - G.mul(L(h1, g1), L(R(h1, g1), g2))).norm());
    r.record(1, (R(H.mul(h1, h2), g1) - H.mul(R(h1, L(h2, g1)), R(h2, g1))).norm());
    r.record(2, (L(h1, G.identity()) - G.identity()).norm());
    r.record(3, (R(H.identity(), g1) - H.identity()).norm());
    r.record(4, (L(H.mul(h1, h2), g1) - L(h1, L(h2, g1))).norm());
    r.record(5, (R(h1, G.mul(g1, g2)) - R(R(h1, g1), g2)).norm());
    r.record(6, std::max((L(H.identity(), g1) - g1).norm(), (R(h1, G.identity()) - h1).norm()));
  }
  r.finish();
  return r;
}

// ---- linearized actions ----

Mat algebra_left(const MatchedPairGroup& d, const Vec& h) {
  if (d.algebra_left) return d.algebra_left(h);
  const LieGroup& G = *d.G;
  const int n = G.algebra_dim();
  Mat T(G.coordinate_dim(), n);
  for (int j = 0; j < n; ++j)
    T.col(j) = fd_curve([&](double t) { return d.left_action(h, G.exp(t * Vec::Unit(n, j))); }, kTol);
  return identity_chart(G) * T;
}

Mat algebra_right(const MatchedPairGroup& d, const Vec& g) {
  if (d.algebra_right) return d.algebra_right(g);
  const LieGroup& H = *d.H;
  const int n = H.algebra_dim();
  Mat T(H.coordinate_dim(), n);
  for (int j = 0; j < n; ++j)
    T.col(j) = fd_curve([&](double t) { return d.right_action(H.exp(t * Vec::Unit(n, j)), g); }, kTol);
  return identity_chart(H) * T;
}

Mat lift_eta_on_g(const MatchedPairGroup& d, const Vec& g) {
  if (d.lift_eta_on_g) return d.lift_eta_on_g(g);
  const LieGroup& H = *d.H;
  const int n = H.algebra_dim();
  Mat T(d.G->coordinate_dim(), n);
  for (int j = 0; j < n; ++j)
    T.col(j) = fd_curve([&](double t) { return d.left_action(H.exp(t * Vec::Unit(n, j)), g); }, kTol);
  return T;
}

Mat lift_h_on_xi(const MatchedPairGroup& d, const Vec& h) {
  if (d.lift_h_on_xi) return d.lift_h_on_xi(h);
  const LieGroup& G = *d.G;
  const int n = G.algebra_dim();
  Mat T(d.H->coordinate_dim(), n);
  for (int j = 0; j < n; ++j)
    T.col(j) = fd_curve([&](double t) { return d.right_action(h, G.exp(t * Vec::Unit(n, j))); }, kTol);
  return T;
}

namespace {

/// d^2/ds dt f(s, t) at 0 by a central mixed difference.
Vec mixed_difference(const std::function<Vec(double, double)>& f) {
  const double h = kMixedStep;
  return (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * h * h);
}

}  // namespace

Vec eta_on_xi_left(const MatchedPairGroup& d, const Vec& eta, const Vec& xi) {
  if (d.eta_on_xi_left) return d.eta_on_xi_left(eta, xi);
  if (d.algebra_left)
    return fd_curve([&](double s) { return Vec(d.algebra_left(d.H->exp(s * eta)) * xi); }, kTol);
  const Vec raw = mixed_difference(
      [&](double s, double t) { return d.left_action(d.H->exp(s * eta), d.G->exp(t * xi)); });
  return identity_chart(*d.G) * raw;
}

Vec eta_on_xi_right(const MatchedPairGroup& d, const Vec& eta, const Vec& xi) {
  if (d.eta_on_xi_right) return d.eta_on_xi_right(eta, xi);
  if (d.algebra_right)
    return fd_curve([&](double t) { return Vec(d.algebra_right(d.G->exp(t * xi)) * eta); }, kTol);
  const Vec raw = mixed_difference(
      [&](double s, double t) { return d.right_action(d.H->exp(s * eta), d.G->exp(t * xi)); });
  return identity_chart(*d.H) * raw;
}

Vec star_left(const MatchedPairGroup& d, const Vec& h, const Vec& mu) {
  return algebra_left(d, h).transpose() * mu;
}

Vec star_right(const MatchedPairGroup& d, const Vec& g, const Vec& nu) {
  return algebra_right(d, g).transpose() * nu;
}

Vec a_star(const MatchedPairGroup& d, const Vec& h, const Vec& nu_h) {
  return lift_h_on_xi(d, h).transpose() * nu_h;
}

Vec b_star(const MatchedPairGroup& d, const Vec& g, const Vec& mu_g) {
  return lift_eta_on_g(d, g).transpose() * mu_g;
}

MatchedAlgebraVector mp_bracket(const MatchedPairGroup& d, const MatchedAlgebraVector& a,
                                const MatchedAlgebraVector& b) {
  if (a.xi.size() != d.G->algebra_dim() || b.xi.size() != d.G->algebra_dim() ||
      a.eta.size() != d.H->algebra_dim() || b.eta.size() != d.H->algebra_dim())
    throw TagError("mp_bracket: components do not match the descriptor");
  MatchedAlgebraVector r;
  r.xi = d.G->bracket(a.xi, b.xi) + eta_on_xi_left(d, a.eta, b.xi) - eta_on_xi_left(d, b.eta, a.xi);
  r.eta = d.H->bracket(a.eta, b.eta) + eta_on_xi_right(d, a.eta, b.xi) -
          eta_on_xi_right(d, b.eta, a.xi);
  return r;
}

MatchedAlgebraVector mp_Ad_inv(const MatchedPairGroup& d, const MatchedPairElement& x,
                               const MatchedAlgebraVector& v) {
  const LieGroup &G = *d.G, &H = *d.H;
  const Vec gi = G.inv(x.g), hi = H.inv(x.h);
  const Vec eta_on_g = lift_eta_on_g(d, x.g) * v.eta;
  const Vec zeta = G.Ad(gi) * v.xi + pinv(G.lift_matrix(Side::Left, x.g)) * eta_on_g;
  MatchedAlgebraVector r;
  r.xi = algebra_left(d, hi) * zeta;
  const Vec tangent = lift_h_on_xi(d, hi) * zeta;
  r.eta = pinv(H.lift_matrix(Side::Right, hi)) * tangent + H.Ad(hi) * (algebra_right(d, x.g) * v.eta);
  return r;
}

MatchedTangent mp_invariant_field(const MatchedPairGroup& d, Side side,
                                  const MatchedAlgebraVector& v, const MatchedPairElement& x) {
  const LieGroup &G = *d.G, &H = *d.H;
  MatchedTangent t;
  if (side == Side::Left) {
    t.dg = G.left_lift(x.g, algebra_left(d, x.h) * v.xi);
    t.dh = lift_h_on_xi(d, x.h) * v.xi + H.left_lift(x.h, v.eta);
  } else {
    t.dg = G.right_lift(x.g, v.xi) + lift_eta_on_g(d, x.g) * v.eta;
    t.dh = H.right_lift(x.h, algebra_right(d, x.g) * v.eta);
  }
  return t;
}

}  // namespace dmg
