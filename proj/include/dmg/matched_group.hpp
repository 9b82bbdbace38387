#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dmg/lie_group.hpp"

namespace dmg {

struct MatchedPairElement {
  Vec g, h;
};
struct MatchedAlgebraVector {
  Vec xi, eta;
};
struct MatchedCovector {
  Vec mu, nu;
};

/// Two groups acting on each other: h |> g in G (left) and h <| g in H (right).
/// Optional fields hold closed forms of the linearized actions as matrices; when a
/// field is empty the corresponding map is assembled by finite differences.
struct MatchedPairGroup {
  std::string name;
  GroupPtr G, H;
  std::function<Vec(const Vec& h, const Vec& g)> left_action;
  std::function<Vec(const Vec& h, const Vec& g)> right_action;

  /// xi -> h |> xi, alg(G) x alg(G).
  std::function<Mat(const Vec& h)> algebra_left;
  /// eta -> eta <| g, alg(H) x alg(H).
  std::function<Mat(const Vec& g)> algebra_right;
  /// eta -> eta |> g in T_g G, coord(G) x alg(H).
  std::function<Mat(const Vec& g)> lift_eta_on_g;
  /// xi -> h <| xi in T_h H, coord(H) x alg(G).
  std::function<Mat(const Vec& h)> lift_h_on_xi;
  /// Algebra-level actions eta |> xi (in g) and eta <| xi (in h).
  std::function<Vec(const Vec& eta, const Vec& xi)> eta_on_xi_left;
  std::function<Vec(const Vec& eta, const Vec& xi)> eta_on_xi_right;

  /// Same descriptor with every closed form removed.
  MatchedPairGroup generic() const;
  /// Same groups with the right action (G on H) replaced by the trivial one.
  MatchedPairGroup without_right_action() const;
  /// Same groups with the left action (H on G) replaced by the trivial one.
  MatchedPairGroup without_left_action() const;
  MatchedPairGroup without_actions() const;
};

MatchedPairGroup make_direct_product(GroupPtr G, GroupPtr H);

/// SU(2) x K with the mutual actions coming from the Iwasawa factorization of SL(2,C).
MatchedPairGroup make_sl2c();

// Mutual actions of SU(2) and K. Quaternions for A, (a, b, c) for B.

/// K on SU(2): normalized B A diag(0,1) + B^{-dagger} A diag(1,0).
Vec k_on_su2(const Vec& B, const Vec& A);
/// SU(2) on K, consistent with B A = (B |> A)(B <| A).
Vec su2_on_k(const Vec& B, const Vec& A);
/// Literal conjugation formula s e3 + A (B - s e3) A^{-1}, s = |B|^2 / (2(c+1)).
/// Not an action compatible with k_on_su2; kept for diagnostics.
Vec su2_on_k_printed(const Vec& B, const Vec& A);
/// The SU(2)-invariant vector B/(1+c) + s k used to express su2_on_k.
Vec3 k_orbit_point(const Vec3& B);

Mat2c sl2c_matrix(const MatchedPairElement& x);
Mat2c sl2c_algebra(const MatchedAlgebraVector& v);

MatchedPairElement mp_identity(const MatchedPairGroup& d);
MatchedPairElement mp_mul(const MatchedPairGroup& d, const MatchedPairElement& a,
                          const MatchedPairElement& b);
MatchedPairElement mp_inv(const MatchedPairGroup& d, const MatchedPairElement& a);
MatchedPairElement mp_random(const MatchedPairGroup& d, Rng& rng, double sigma = 0.5);

struct AxiomReport {
  std::vector<std::string> names;
  std::vector<double> violation;
  double max_violation = 0.0;
  double tol = 0.0;
  bool pass = true;
  int samples = 0;

  void record(std::size_t i, double v);
  void finish();
  std::string summary() const;
};

/// Compatibility, action, and unit laws of a matched pair of groups on random samples.
AxiomReport axiom_check_group(const MatchedPairGroup& d, int samples, Rng& rng,
                              double tol = Tolerances{}.check_tol);

// Linearized actions. Each returns the matrix of a linear map; closed forms are used
// when present, otherwise the map is differentiated along exponential curves.

Mat algebra_left(const MatchedPairGroup& d, const Vec& h);
Mat algebra_right(const MatchedPairGroup& d, const Vec& g);
Mat lift_eta_on_g(const MatchedPairGroup& d, const Vec& g);
Mat lift_h_on_xi(const MatchedPairGroup& d, const Vec& h);
Vec eta_on_xi_left(const MatchedPairGroup& d, const Vec& eta, const Vec& xi);
Vec eta_on_xi_right(const MatchedPairGroup& d, const Vec& eta, const Vec& xi);

// Transposes.

/// mu <|* h with <h |> xi, mu> = <xi, mu <|* h>.
Vec star_left(const MatchedPairGroup& d, const Vec& h, const Vec& mu);
/// g |>* nu with <eta <| g, nu> = <eta, g |>* nu>.
Vec star_right(const MatchedPairGroup& d, const Vec& g, const Vec& nu);
/// a*_h : T*_h H -> g*.
Vec a_star(const MatchedPairGroup& d, const Vec& h, const Vec& nu_h);
/// b*_g : T*_g G -> h*.
Vec b_star(const MatchedPairGroup& d, const Vec& g, const Vec& mu_g);

MatchedAlgebraVector mp_bracket(const MatchedPairGroup& d, const MatchedAlgebraVector& a,
                                const MatchedAlgebraVector& b);

/// Ad_{(g,h)^{-1}} (xi, eta).
MatchedAlgebraVector mp_Ad_inv(const MatchedPairGroup& d, const MatchedPairElement& x,
                               const MatchedAlgebraVector& v);

struct MatchedTangent {
  Vec dg, dh;
};

/// Left or right invariant field generated by (xi, eta), ambient coordinates.
MatchedTangent mp_invariant_field(const MatchedPairGroup& d, Side side,
                                  const MatchedAlgebraVector& v, const MatchedPairElement& x);

}  // namespace dmg
