#include "dmg/algebroid.hpp"

#include "dmg/errors.hpp"

namespace dmg {

namespace {

void require_base(const Vec& expected, const Vec& got, const char* what) {
  if (expected.size() != got.size() || !(inf_norm(expected - got) <= kComposeTol))
    throw BasePointMismatch(std::string(what) + ": fiber vector attached at the wrong base point");
}

Mat pinv(const Mat& J) { return (J.transpose() * J).ldlt().solve(J.transpose()); }

Vec cat(const Vec& a, const Vec& b) {
  Vec r(a.size() + b.size());
  r << a, b;
  return r;
}

}  // namespace

Mat unit_chart_jacobian(const Groupoid& G, const Vec& b) {
  return fd_jacobian_fine([&](const Vec& d) { return G.unit_chart(b, d); }, Vec::Zero(G.fiber_dim()));
}

Vec fiber_to_tangent(const Groupoid& G, const AlgebroidVector& X) {
  return fd_curve_fine([&](double t) { return G.unit_chart(X.base, t * X.fiber); });
}

Vec tangent_to_fiber(const Groupoid& G, const Vec& b, const Vec& v) {
  return pinv(unit_chart_jacobian(G, b)) * v;
}

Vec left_invariant_curve(const Groupoid& G, const AlgebroidVector& X, const Vec& x) {
  require_base(G.target(x), X.base, "left_invariant");
  return fd_curve_fine([&](double t) { return G.mul_raw(x, G.unit_chart(X.base, t * X.fiber)); });
}

Vec right_invariant_curve(const Groupoid& G, const AlgebroidVector& X, const Vec& x) {
  require_base(G.source(x), X.base, "right_invariant");
  return -fd_curve_fine(
      [&](double t) { return G.mul_raw(G.inverse(G.unit_chart(X.base, t * X.fiber)), x); });
}

Vec left_invariant(const Groupoid& G, const AlgebroidVector& X, const Vec& x) {
  require_base(G.target(x), X.base, "left_invariant");
  if (auto v = G.closed_left_field(x, X.fiber)) return *v;
  if (auto M = dynamic_cast<const MatchedPairGroupoid*>(&G)) return matched_left_invariant(*M, X, x);
  return left_invariant_curve(G, X, x);
}

Vec right_invariant(const Groupoid& G, const AlgebroidVector& X, const Vec& x) {
  require_base(G.source(x), X.base, "right_invariant");
  if (auto v = G.closed_right_field(x, X.fiber)) return *v;
  if (auto M = dynamic_cast<const MatchedPairGroupoid*>(&G)) return matched_right_invariant(*M, X, x);
  return right_invariant_curve(G, X, x);
}

Vec anchor(const Groupoid& G, const AlgebroidVector& X) {
  if (G.base_dim() == 0) return Vec(0);
  return fd_curve_fine([&](double t) { return G.target(G.unit_chart(X.base, t * X.fiber)); });
}

Vec algebroid_bracket(const GroupAsGroupoid& G, const Vec& a, const Vec& b) {
  return G.group()->bracket(a, b);
}

// ---- induced actions ----

AlgebroidVector h_on_X(const MatchedPairGroupoid& M, const Vec& h, const AlgebroidVector& X) {
  const Groupoid &G = M.G(), &H = M.H();
  require_base(H.target(h), X.base, "h |> X");
  const Vec b = H.source(h);
  const Vec v = fd_curve_fine(
      [&](double t) { return M.left_action(h, G.unit_chart(X.base, t * X.fiber)); });
  return {b, tangent_to_fiber(G, b, v)};
}

Vec x_dagger(const MatchedPairGroupoid& M, const AlgebroidVector& X, const Vec& h) {
  const Groupoid& G = M.G();
  require_base(M.H().target(h), X.base, "X dagger");
  return fd_curve_fine([&](double t) { return M.right_action(h, G.unit_chart(X.base, t * X.fiber)); });
}

Vec y_dagger(const MatchedPairGroupoid& M, const AlgebroidVector& Y, const Vec& g) {
  const Groupoid& H = M.H();
  require_base(M.G().source(g), Y.base, "Y dagger");
  return fd_curve_fine(
      [&](double t) { return M.left_action(H.inverse(H.unit_chart(Y.base, t * Y.fiber)), g); });
}

AlgebroidVector y_on_g(const MatchedPairGroupoid& M, const AlgebroidVector& Y, const Vec& g) {
  const Groupoid& H = M.H();
  require_base(M.G().source(g), Y.base, "Y <| g");
  const Vec b = M.G().target(g);
  const Vec v = fd_curve_fine(
      [&](double t) {
        return H.inverse(M.right_action(H.inverse(H.unit_chart(Y.base, t * Y.fiber)), g));
      });
  return {b, tangent_to_fiber(H, b, v)};
}

namespace {

/// T(unit_H o target_G) applied to an ambient tangent of G at unit(b).
Mat unit_target_jacobian(const MatchedPairGroupoid& M, const Vec& b) {
  const Groupoid &G = M.G(), &H = M.H();
  return fd_jacobian_fine([&](const Vec& d) { return H.unit(G.target(G.unit_chart(b, d))); },
                          Vec::Zero(G.fiber_dim()));
}

}  // namespace

Vec iso_sum_to_matched(const MatchedPairGroupoid& M, const Vec& b, const Vec& X, const Vec& Y) {
  const Mat JG = unit_chart_jacobian(M.G(), b);
  const Mat JH = unit_chart_jacobian(M.H(), b);
  return cat(JG * X, unit_target_jacobian(M, b) * X + JH * Y);
}

Vec iso_matched_to_sum(const MatchedPairGroupoid& M, const Vec& b, const Vec& v) {
  const Groupoid &G = M.G(), &H = M.H();
  const Mat JG = unit_chart_jacobian(G, b);
  const Mat JH = unit_chart_jacobian(H, b);
  const Vec X = pinv(JG) * v.head(G.arrow_dim());
  const Vec Y = pinv(JH) * (v.tail(H.arrow_dim()) - unit_target_jacobian(M, b) * X);
  return cat(X, Y);
}

Vec matched_left_invariant(const MatchedPairGroupoid& M, const AlgebroidVector& U, const Vec& x) {
  const Groupoid &G = M.G(), &H = M.H();
  const Vec g = M.g_part(x), h = M.h_part(x);
  require_base(H.target(h), U.base, "matched left field");
  const AlgebroidVector X{U.base, U.fiber.head(G.fiber_dim())};
  const AlgebroidVector Y{U.base, U.fiber.tail(H.fiber_dim())};
  return cat(left_invariant(G, h_on_X(M, h, X), g), x_dagger(M, X, h) + left_invariant(H, Y, h));
}

Vec matched_right_invariant(const MatchedPairGroupoid& M, const AlgebroidVector& U, const Vec& x) {
  const Groupoid &G = M.G(), &H = M.H();
  const Vec g = M.g_part(x), h = M.h_part(x);
  require_base(G.source(g), U.base, "matched right field");
  const AlgebroidVector X{U.base, U.fiber.head(G.fiber_dim())};
  const AlgebroidVector Y{U.base, U.fiber.tail(H.fiber_dim())};
  return cat(right_invariant(G, X, g) - y_dagger(M, Y, g), right_invariant(H, y_on_g(M, Y, g), h));
}

// ---- trivial groupoid ----

Vec a_phi(const GroupAction& a, const Vec& m, const Vec& U) {
  const int k = a.group->algebra_dim(), n = a.base_dim;
  if (m.size() != n || U.size() != n + k) throw DomainError("a_phi: wrong number of coordinates");
  const Vec xi = U.head(k), Y = U.tail(n);
  const Vec lift = a.group->right_lift(a.group->identity(), xi);
  Vec r(2 * n + a.group->coordinate_dim() + n);
  r << Vec::Zero(n), lift, action_generator(a, m) * xi, Y;
  return r;
}

Vec a_phi_fiber(const GroupAction& a, const MatchedPairGroupoid& M, const Vec& m, const Vec& U) {
  return iso_matched_to_sum(M, m, a_phi(a, m, U));
}

Mat a_phi_matrix(const GroupAction& a, const MatchedPairGroupoid& M, const Vec& m) {
  const int n = a.base_dim + a.group->algebra_dim();
  Mat A(M.fiber_dim(), n);
  for (int j = 0; j < n; ++j) A.col(j) = a_phi_fiber(a, M, m, Vec::Unit(n, j));
  return A;
}

}  // namespace dmg
