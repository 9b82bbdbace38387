#pragma once

#include "dmg/groupoid.hpp"

namespace dmg {

/// Element of the algebroid fiber at a base point, in unit-chart coordinates.
struct AlgebroidVector {
  Vec base;
  Vec fiber;
};

/// Ambient tangent vectors at unit(b) of the unit-chart coordinate directions.
Mat unit_chart_jacobian(const Groupoid& G, const Vec& b);
/// Ambient tangent at unit(b) of a fiber vector, and back.
Vec fiber_to_tangent(const Groupoid& G, const AlgebroidVector& X);
Vec tangent_to_fiber(const Groupoid& G, const Vec& b, const Vec& v);

/// d/dt x * c(t), c the unit-chart curve through unit(target(x)) with velocity X.
Vec left_invariant_curve(const Groupoid& G, const AlgebroidVector& X, const Vec& x);
/// -d/dt c(t)^{-1} * x, c the unit-chart curve through unit(source(x)).
Vec right_invariant_curve(const Groupoid& G, const AlgebroidVector& X, const Vec& x);
/// Closed forms when the descriptor has them, the curve formulas otherwise.
Vec left_invariant(const Groupoid& G, const AlgebroidVector& X, const Vec& x);
Vec right_invariant(const Groupoid& G, const AlgebroidVector& X, const Vec& x);

/// Tangent of the target map applied to X, a vector at the base point.
Vec anchor(const Groupoid& G, const AlgebroidVector& X);

/// Lie algebra bracket; only groups viewed as groupoids carry one here.
Vec algebroid_bracket(const GroupAsGroupoid& G, const Vec& a, const Vec& b);

// ---- induced infinitesimal actions of a matched pair ----

/// h |> X for X at target(h); a fiber vector of G at source(h).
AlgebroidVector h_on_X(const MatchedPairGroupoid& M, const Vec& h, const AlgebroidVector& X);
/// X^dagger(h) = d/dt h <| x_t, tangent to H at h; X at target(h).
Vec x_dagger(const MatchedPairGroupoid& M, const AlgebroidVector& X, const Vec& h);
/// Y^dagger(g) = d/dt y_t^{-1} |> g, tangent to G at g; Y at source(g).
Vec y_dagger(const MatchedPairGroupoid& M, const AlgebroidVector& Y, const Vec& g);
/// Y <| g = d/dt (y_t^{-1} <| g)^{-1}; a fiber vector of H at target(g).
AlgebroidVector y_on_g(const MatchedPairGroupoid& M, const AlgebroidVector& Y, const Vec& g);

/// (X, Y) -> (X, T(unit_H o target_G) X + Y), ambient tangent of G |x| H at unit(b).
Vec iso_sum_to_matched(const MatchedPairGroupoid& M, const Vec& b, const Vec& X, const Vec& Y);
/// Inverse of iso_sum_to_matched; returns the stacked fiber coordinates (X, Y).
Vec iso_matched_to_sum(const MatchedPairGroupoid& M, const Vec& b, const Vec& v);

/// Left field of U = (X, Y): (<-(h |> X)(g), X^dagger(h) + <-Y(h)), at x = (g, h).
Vec matched_left_invariant(const MatchedPairGroupoid& M, const AlgebroidVector& U, const Vec& x);
/// Right field of U = (X, Y): (->X(g) - Y^dagger(g), ->(Y <| g)(h)).
Vec matched_right_invariant(const MatchedPairGroupoid& M, const AlgebroidVector& U, const Vec& x);

// ---- trivial groupoid and its decomposition ----

/// Algebroid map of phi: (xi, Y) at m -> (0, xi; xi^dagger(m), Y), ambient at the unit.
Vec a_phi(const GroupAction& a, const Vec& m, const Vec& U);
/// Same map in the unit-chart coordinates of the matched decomposition.
Vec a_phi_fiber(const GroupAction& a, const MatchedPairGroupoid& M, const Vec& m, const Vec& U);
/// Matrix of a_phi_fiber at m.
Mat a_phi_matrix(const GroupAction& a, const MatchedPairGroupoid& M, const Vec& m);

}  // namespace dmg
