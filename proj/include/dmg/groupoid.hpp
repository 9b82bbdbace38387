#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dmg/lie_group.hpp"
#include "dmg/matched_group.hpp"

namespace dmg {

/// Lie groupoid on flat coordinate charts. Arrows, base points and tangent vectors are
/// plain coordinate vectors; the descriptor gives them meaning.
///
/// The unit chart parameterizes the source fiber through the unit at b:
/// unit_chart(b, 0) = unit(b) and source(unit_chart(b, d)) = b. Its coordinate basis
/// is the basis of the algebroid fiber at b used throughout.
class Groupoid {
 public:
  virtual ~Groupoid() = default;

  virtual std::string name() const = 0;
  virtual int base_dim() const = 0;
  virtual int arrow_dim() const = 0;
  virtual int fiber_dim() const = 0;

  virtual Vec source(const Vec& x) const = 0;
  virtual Vec target(const Vec& x) const = 0;
  virtual Vec unit(const Vec& b) const = 0;
  /// Product without the composability check.
  virtual Vec mul_raw(const Vec& x, const Vec& y) const = 0;
  virtual Vec inverse(const Vec& x) const = 0;
  virtual Vec unit_chart(const Vec& b, const Vec& d) const = 0;
  /// Inverse of unit_chart on its domain: unit_chart(source(x), fiber_coords(x)) = x.
  virtual Vec fiber_coords(const Vec& x) const = 0;
  /// Projects ambient coordinates back onto valid arrows.
  virtual Vec retract(const Vec& x) const { return x; }
  /// Throws DomainError on invalid coordinates.
  virtual void validate(const Vec& x) const;

  /// Closed forms of the invariant fields, when the descriptor knows them.
  virtual std::optional<Vec> closed_left_field(const Vec& /*x*/, const Vec& /*d*/) const {
    return std::nullopt;
  }
  virtual std::optional<Vec> closed_right_field(const Vec& /*x*/, const Vec& /*d*/) const {
    return std::nullopt;
  }

  /// x * unit_chart(target(x), d): a chart of the source fiber through x.
  Vec fiber_point(const Vec& x, const Vec& d) const;
  /// Arrow with source b and the same fiber coordinates as x.
  Vec transport(const Vec& x, const Vec& b) const;
  /// Source base point plus fiber coordinates; used by chart-based Lagrangians.
  Vec chart(const Vec& x) const;

  Vec random_base(Rng& rng, double sigma = 1.0) const;
  Vec random_from(Rng& rng, const Vec& b, double sigma = 0.5) const;
  Vec random_arrow(Rng& rng, double sigma = 0.5) const;
};

using GroupoidPtr = std::shared_ptr<const Groupoid>;

/// Separation between target(x) and source(y) below which they compose.
inline constexpr double kComposeTol = 1e-9;

struct Certificate {
  Vec source, target;
  double gap = 0.0;
};

struct Composed {
  Vec arrow;
  Certificate certificate;
};

double composability_gap(const Groupoid& G, const Vec& x, const Vec& y);
/// Product of composable arrows; throws NotComposable otherwise.
Vec compose(const Groupoid& G, const Vec& x, const Vec& y);
Composed compose_certified(const Groupoid& G, const Vec& x, const Vec& y);

// ---- instances ----

class GroupAsGroupoid final : public Groupoid {
 public:
  explicit GroupAsGroupoid(GroupPtr G) : G_(std::move(G)) {}
  std::string name() const override { return G_->name(); }
  int base_dim() const override { return 0; }
  int arrow_dim() const override { return G_->coordinate_dim(); }
  int fiber_dim() const override { return G_->algebra_dim(); }
  Vec source(const Vec&) const override { return Vec(0); }
  Vec target(const Vec&) const override { return Vec(0); }
  Vec unit(const Vec&) const override { return G_->identity(); }
  Vec mul_raw(const Vec& x, const Vec& y) const override { return G_->mul(x, y); }
  Vec inverse(const Vec& x) const override { return G_->inv(x); }
  Vec unit_chart(const Vec&, const Vec& d) const override { return G_->exp(d); }
  Vec fiber_coords(const Vec& x) const override { return G_->log(x); }
  Vec retract(const Vec& x) const override { return G_->retract(x); }
  void validate(const Vec& x) const override { G_->validate(x); }
  std::optional<Vec> closed_left_field(const Vec& x, const Vec& d) const override {
    return G_->left_lift(x, d);
  }
  std::optional<Vec> closed_right_field(const Vec& x, const Vec& d) const override {
    return G_->right_lift(x, d);
  }
  const GroupPtr& group() const { return G_; }

 private:
  GroupPtr G_;
};

/// M x M with (m, m') (m', n) = (m, n).
class PairGroupoid final : public Groupoid {
 public:
  explicit PairGroupoid(int n) : n_(n) {}
  std::string name() const override { return "R^" + std::to_string(n_) + " x R^" + std::to_string(n_); }
  int base_dim() const override { return n_; }
  int arrow_dim() const override { return 2 * n_; }
  int fiber_dim() const override { return n_; }
  Vec source(const Vec& x) const override { return x.head(n_); }
  Vec target(const Vec& x) const override { return x.tail(n_); }
  Vec unit(const Vec& b) const override;
  Vec mul_raw(const Vec& x, const Vec& y) const override;
  Vec inverse(const Vec& x) const override;
  Vec unit_chart(const Vec& b, const Vec& d) const override;
  Vec fiber_coords(const Vec& x) const override { return x.tail(n_) - x.head(n_); }
  std::optional<Vec> closed_left_field(const Vec& x, const Vec& d) const override;
  std::optional<Vec> closed_right_field(const Vec& x, const Vec& d) const override;

 private:
  int n_;
};

/// Right action m.g of a group on M, with its infinitesimal generator xi -> xi^dagger(m).
struct GroupAction {
  GroupPtr group;
  int base_dim = 0;
  std::function<Vec(const Vec& m, const Vec& g)> act;
  /// Optional closed generator matrix (base_dim x algebra_dim) at m.
  std::function<Mat(const Vec& m)> generator;
};

/// SO(2) acting on R^2 by m.theta = R(theta)^T m.
GroupAction rotation_action();

/// Matrix of xi -> d/dt m.exp(t xi) at t = 0.
Mat action_generator(const GroupAction& a, const Vec& m);

/// M x G with (m, g)(mg, g') = (m, g g'); source m, target m.g.
class ActionGroupoid final : public Groupoid {
 public:
  explicit ActionGroupoid(GroupAction a) : a_(std::move(a)) {}
  std::string name() const override;
  int base_dim() const override { return a_.base_dim; }
  int arrow_dim() const override { return a_.base_dim + a_.group->coordinate_dim(); }
  int fiber_dim() const override { return a_.group->algebra_dim(); }
  Vec source(const Vec& x) const override { return x.head(a_.base_dim); }
  Vec target(const Vec& x) const override;
  Vec unit(const Vec& b) const override;
  Vec mul_raw(const Vec& x, const Vec& y) const override;
  Vec inverse(const Vec& x) const override;
  Vec unit_chart(const Vec& b, const Vec& d) const override;
  Vec fiber_coords(const Vec& x) const override { return a_.group->log(group_part(x)); }
  Vec retract(const Vec& x) const override;
  void validate(const Vec& x) const override;
  std::optional<Vec> closed_left_field(const Vec& x, const Vec& d) const override;
  std::optional<Vec> closed_right_field(const Vec& x, const Vec& d) const override;

  Vec base_part(const Vec& x) const { return x.head(a_.base_dim); }
  Vec group_part(const Vec& x) const { return x.tail(a_.group->coordinate_dim()); }
  Vec make(const Vec& m, const Vec& g) const;
  const GroupAction& action() const { return a_; }

 private:
  GroupAction a_;
};

/// M x G x M with (m, g, m')(m', g', n) = (m, g g', n).
class TrivialGroupoid final : public Groupoid {
 public:
  TrivialGroupoid(int n, GroupPtr G) : n_(n), G_(std::move(G)) {}
  std::string name() const override;
  int base_dim() const override { return n_; }
  int arrow_dim() const override { return 2 * n_ + G_->coordinate_dim(); }
  int fiber_dim() const override { return n_ + G_->algebra_dim(); }
  Vec source(const Vec& x) const override { return x.head(n_); }
  Vec target(const Vec& x) const override { return x.tail(n_); }
  Vec unit(const Vec& b) const override;
  Vec mul_raw(const Vec& x, const Vec& y) const override;
  Vec inverse(const Vec& x) const override;
  /// d = (xi, y) maps to (b, exp xi, b + y).
  Vec unit_chart(const Vec& b, const Vec& d) const override;
  Vec fiber_coords(const Vec& x) const override;
  Vec retract(const Vec& x) const override;
  void validate(const Vec& x) const override;
  std::optional<Vec> closed_left_field(const Vec& x, const Vec& d) const override;
  std::optional<Vec> closed_right_field(const Vec& x, const Vec& d) const override;

  Vec group_part(const Vec& x) const { return x.segment(n_, G_->coordinate_dim()); }
  Vec make(const Vec& m, const Vec& g, const Vec& n) const;
  const GroupPtr& group() const { return G_; }

 private:
  int n_;
  GroupPtr G_;
};

/// Matched pair of groupoids over a common base. Arrows are (g | h) with
/// target(g) = source(h); the product is (g (h |> g'), (h <| g') h').
class MatchedPairGroupoid final : public Groupoid {
 public:
  using Action = std::function<Vec(const Vec& h, const Vec& g)>;

  MatchedPairGroupoid(GroupoidPtr G, GroupoidPtr H, Action left, Action right, std::string name = {});

  std::string name() const override { return name_; }
  int base_dim() const override { return G_->base_dim(); }
  int arrow_dim() const override { return G_->arrow_dim() + H_->arrow_dim(); }
  int fiber_dim() const override { return G_->fiber_dim() + H_->fiber_dim(); }
  Vec source(const Vec& x) const override { return G_->source(g_part(x)); }
  Vec target(const Vec& x) const override { return H_->target(h_part(x)); }
  Vec unit(const Vec& b) const override;
  Vec mul_raw(const Vec& x, const Vec& y) const override;
  Vec inverse(const Vec& x) const override;
  /// d = (dX, dY): x = G.unit_chart(b, dX), then H.unit_chart(target(x), dY).
  Vec unit_chart(const Vec& b, const Vec& d) const override;
  Vec fiber_coords(const Vec& x) const override;
  Vec retract(const Vec& x) const override;
  void validate(const Vec& x) const override;

  const Groupoid& G() const { return *G_; }
  const Groupoid& H() const { return *H_; }
  const GroupoidPtr& G_ptr() const { return G_; }
  const GroupoidPtr& H_ptr() const { return H_; }
  Vec left_action(const Vec& h, const Vec& g) const { return left_(h, g); }
  Vec right_action(const Vec& h, const Vec& g) const { return right_(h, g); }
  Vec g_part(const Vec& x) const { return x.head(G_->arrow_dim()); }
  Vec h_part(const Vec& x) const { return x.tail(H_->arrow_dim()); }
  Vec join(const Vec& g, const Vec& h) const;
  Vec embed_g(const Vec& g) const { return join(g, H_->unit(G_->target(g))); }
  Vec embed_h(const Vec& h) const { return join(G_->unit(H_->source(h)), h); }

 private:
  GroupoidPtr G_, H_;
  Action left_, right_;
  std::string name_;
};

/// Matched pair group viewed as a matched pair groupoid over a point.
std::shared_ptr<MatchedPairGroupoid> matched_group_as_groupoid(const MatchedPairGroup& d);

/// (M x G) |x| (M x M) with (m', m) |> (m, g) = (m', g) and (m', m) <| (m, g) = (m'g, mg).
std::shared_ptr<MatchedPairGroupoid> make_trivial_decomposition(const GroupAction& a);

/// Phi(m, g, n) = (m, g; m.g, n) and its inverse.
Vec phi_trivial(const GroupAction& a, const Vec& x);
Vec phi_inv(const GroupAction& a, const Vec& y);

// ---- axiom suites ----

/// Source/target of products, associativity, units, inverses.
AxiomReport axiom_check_groupoid(const Groupoid& G, int samples, Rng& rng,
                                 double tol = Tolerances{}.check_tol);

/// The nine matched pair conditions plus the identity-arrow laws. The first failing
/// condition is reported through first_failure (1-based, 0 when all pass).
struct MatchedGroupoidReport : AxiomReport {
  int first_failure = 0;
};
MatchedGroupoidReport axiom_check_matched(const MatchedPairGroupoid& M, int samples, Rng& rng,
                                          double tol = Tolerances{}.check_tol);
/// Throws MatchedAxiomError naming the first violated condition.
void require_matched(const MatchedPairGroupoid& M, int samples, Rng& rng,
                     double tol = Tolerances{}.check_tol);

/// Right action p <| g of a groupoid on a space P with moment map f: P -> base.
/// Checks f(p <| g) = target(g), (p <| g) <| g' = p <| (g g'), p <| unit(f(p)) = p.
AxiomReport groupoid_action_check(const Groupoid& G, const std::function<Vec(Rng&)>& sample_p,
                                  const std::function<Vec(const Vec&)>& f,
                                  const std::function<Vec(const Vec& p, const Vec& g)>& act,
                                  int samples, Rng& rng, double tol = Tolerances{}.check_tol);

}  // namespace dmg
