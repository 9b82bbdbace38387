#include "dmg/groupoid.hpp"

#include <sstream>

#include "dmg/errors.hpp"

namespace dmg {

namespace {

Vec cat(const Vec& a, const Vec& b) {
  Vec r(a.size() + b.size());
  r << a, b;
  return r;
}

Vec cat(const Vec& a, const Vec& b, const Vec& c) { return cat(cat(a, b), c); }

Vec gauss(Rng& rng, int n, double sigma) {
  std::normal_distribution<double> d(0.0, sigma);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

void require_finite(const Vec& x, const std::string& what) {
  if (!x.allFinite()) throw DomainError(what + ": non-finite coordinates");
}

}  // namespace

// ---- Groupoid ----

void Groupoid::validate(const Vec& x) const {
  if (x.size() != arrow_dim()) throw DomainError(name() + ": wrong number of arrow coordinates");
  require_finite(x, name());
}

Vec Groupoid::fiber_point(const Vec& x, const Vec& d) const {
  return mul_raw(x, unit_chart(target(x), d));
}

Vec Groupoid::transport(const Vec& x, const Vec& b) const { return unit_chart(b, fiber_coords(x)); }

Vec Groupoid::chart(const Vec& x) const { return cat(source(x), fiber_coords(x)); }

Vec Groupoid::random_base(Rng& rng, double sigma) const { return gauss(rng, base_dim(), sigma); }

Vec Groupoid::random_from(Rng& rng, const Vec& b, double sigma) const {
  return unit_chart(b, gauss(rng, fiber_dim(), sigma));
}

Vec Groupoid::random_arrow(Rng& rng, double sigma) const {
  const Vec b = random_base(rng);
  return random_from(rng, b, sigma);
}

double composability_gap(const Groupoid& G, const Vec& x, const Vec& y) {
  return inf_norm(G.target(x) - G.source(y));
}

Composed compose_certified(const Groupoid& G, const Vec& x, const Vec& y) {
  const Vec t = G.target(x), s = G.source(y);
  const double gap = inf_norm(t - s);
  if (!(gap <= kComposeTol)) throw NotComposable(t, s, gap);
  Composed c;
  c.arrow = G.mul_raw(x, y);
  c.certificate = {G.source(x), G.target(y), gap};
  return c;
}

Vec compose(const Groupoid& G, const Vec& x, const Vec& y) { return compose_certified(G, x, y).arrow; }

// ---- pair ----

Vec PairGroupoid::unit(const Vec& b) const { return cat(b, b); }

Vec PairGroupoid::mul_raw(const Vec& x, const Vec& y) const { return cat(x.head(n_), y.tail(n_)); }

Vec PairGroupoid::inverse(const Vec& x) const { return cat(x.tail(n_), x.head(n_)); }

Vec PairGroupoid::unit_chart(const Vec& b, const Vec& d) const { return cat(b, b + d); }

std::optional<Vec> PairGroupoid::closed_left_field(const Vec&, const Vec& d) const {
  return cat(Vec::Zero(n_), d);
}

std::optional<Vec> PairGroupoid::closed_right_field(const Vec&, const Vec& d) const {
  return cat(-d, Vec::Zero(n_));
}

// ---- action ----

GroupAction rotation_action() {
  GroupAction a;
  a.group = make_so2();
  a.base_dim = 2;
  a.act = [](const Vec& m, const Vec& g) {
    const double c = std::cos(g[0]), s = std::sin(g[0]);
    Vec r(2);
    r << c * m[0] + s * m[1], -s * m[0] + c * m[1];
    return r;
  };
  a.generator = [](const Vec& m) {
    Mat J(2, 1);
    J << m[1], -m[0];
    return J;
  };
  return a;
}

Mat action_generator(const GroupAction& a, const Vec& m) {
  if (a.generator) return a.generator(m);
  const LieGroup& G = *a.group;
  const int n = G.algebra_dim();
  Mat J(a.base_dim, n);
  for (int j = 0; j < n; ++j)
    J.col(j) = fd_curve([&](double t) { return a.act(m, G.exp(t * Vec::Unit(n, j))); });
  return J;
}

std::string ActionGroupoid::name() const {
  return "R^" + std::to_string(a_.base_dim) + " x " + a_.group->name();
}

Vec ActionGroupoid::make(const Vec& m, const Vec& g) const { return cat(m, g); }

Vec ActionGroupoid::target(const Vec& x) const { return a_.act(base_part(x), group_part(x)); }

Vec ActionGroupoid::unit(const Vec& b) const { return make(b, a_.group->identity()); }

Vec ActionGroupoid::mul_raw(const Vec& x, const Vec& y) const {
  return make(base_part(x), a_.group->mul(group_part(x), group_part(y)));
}

Vec ActionGroupoid::inverse(const Vec& x) const { return make(target(x), a_.group->inv(group_part(x))); }

Vec ActionGroupoid::unit_chart(const Vec& b, const Vec& d) const { return make(b, a_.group->exp(d)); }

Vec ActionGroupoid::retract(const Vec& x) const {
  return make(base_part(x), a_.group->retract(group_part(x)));
}

void ActionGroupoid::validate(const Vec& x) const {
  Groupoid::validate(x);
  a_.group->validate(group_part(x));
}

std::optional<Vec> ActionGroupoid::closed_left_field(const Vec& x, const Vec& d) const {
  return make(Vec::Zero(a_.base_dim), a_.group->left_lift(group_part(x), d));
}

std::optional<Vec> ActionGroupoid::closed_right_field(const Vec& x, const Vec& d) const {
  const Vec m = base_part(x);
  return make(-action_generator(a_, m) * d, a_.group->right_lift(group_part(x), d));
}

// ---- trivial ----

std::string TrivialGroupoid::name() const {
  const std::string m = "R^" + std::to_string(n_);
  return m + " x " + G_->name() + " x " + m;
}

Vec TrivialGroupoid::make(const Vec& m, const Vec& g, const Vec& n) const { return cat(m, g, n); }

Vec TrivialGroupoid::unit(const Vec& b) const { return make(b, G_->identity(), b); }

Vec TrivialGroupoid::mul_raw(const Vec& x, const Vec& y) const {
  return make(x.head(n_), G_->mul(group_part(x), group_part(y)), y.tail(n_));
}

Vec TrivialGroupoid::inverse(const Vec& x) const {
  return make(x.tail(n_), G_->inv(group_part(x)), x.head(n_));
}

Vec TrivialGroupoid::unit_chart(const Vec& b, const Vec& d) const {
  const int k = G_->algebra_dim();
  return make(b, G_->exp(d.head(k)), b + d.tail(n_));
}

Vec TrivialGroupoid::fiber_coords(const Vec& x) const {
  return cat(G_->log(group_part(x)), x.tail(n_) - x.head(n_));
}

Vec TrivialGroupoid::retract(const Vec& x) const {
  return make(x.head(n_), G_->retract(group_part(x)), x.tail(n_));
}

void TrivialGroupoid::validate(const Vec& x) const {
  Groupoid::validate(x);
  G_->validate(group_part(x));
}

std::optional<Vec> TrivialGroupoid::closed_left_field(const Vec& x, const Vec& d) const {
  const int k = G_->algebra_dim();
  return make(Vec::Zero(n_), G_->left_lift(group_part(x), d.head(k)), d.tail(n_));
}

std::optional<Vec> TrivialGroupoid::closed_right_field(const Vec& x, const Vec& d) const {
  const int k = G_->algebra_dim();
  return make(-d.tail(n_), G_->right_lift(group_part(x), d.head(k)), Vec::Zero(n_));
}

// ---- matched pair ----

MatchedPairGroupoid::MatchedPairGroupoid(GroupoidPtr G, GroupoidPtr H, Action left, Action right,
                                         std::string name)
    : G_(std::move(G)), H_(std::move(H)), left_(std::move(left)), right_(std::move(right)),
      name_(std::move(name)) {
  if (G_->base_dim() != H_->base_dim())
    throw DomainError("matched pair groupoid: factors have different bases");
  if (name_.empty()) name_ = "(" + G_->name() + ") |x| (" + H_->name() + ")";
}

Vec MatchedPairGroupoid::join(const Vec& g, const Vec& h) const { return cat(g, h); }

Vec MatchedPairGroupoid::unit(const Vec& b) const { return join(G_->unit(b), H_->unit(b)); }

Vec MatchedPairGroupoid::mul_raw(const Vec& x, const Vec& y) const {
  const Vec g = g_part(x), h = h_part(x), g2 = g_part(y), h2 = h_part(y);
  return join(G_->mul_raw(g, left_(h, g2)), H_->mul_raw(right_(h, g2), h2));
}

Vec MatchedPairGroupoid::inverse(const Vec& x) const {
  const Vec gi = G_->inverse(g_part(x)), hi = H_->inverse(h_part(x));
  return join(left_(hi, gi), right_(hi, gi));
}

Vec MatchedPairGroupoid::unit_chart(const Vec& b, const Vec& d) const {
  const Vec g = G_->unit_chart(b, d.head(G_->fiber_dim()));
  return join(g, H_->unit_chart(G_->target(g), d.tail(H_->fiber_dim())));
}

Vec MatchedPairGroupoid::fiber_coords(const Vec& x) const {
  return cat(G_->fiber_coords(g_part(x)), H_->fiber_coords(h_part(x)));
}

Vec MatchedPairGroupoid::retract(const Vec& x) const {
  return join(G_->retract(g_part(x)), H_->retract(h_part(x)));
}

void MatchedPairGroupoid::validate(const Vec& x) const {
  Groupoid::validate(x);
  G_->validate(g_part(x));
  H_->validate(h_part(x));
  const double gap = inf_norm(G_->target(g_part(x)) - H_->source(h_part(x)));
  if (!(gap <= kComposeTol)) throw DomainError(name_ + ": target of g differs from source of h");
}

std::shared_ptr<MatchedPairGroupoid> matched_group_as_groupoid(const MatchedPairGroup& d) {
  return std::make_shared<MatchedPairGroupoid>(std::make_shared<GroupAsGroupoid>(d.G),
                                               std::make_shared<GroupAsGroupoid>(d.H),
                                               d.left_action, d.right_action, d.name);
}

std::shared_ptr<MatchedPairGroupoid> make_trivial_decomposition(const GroupAction& a) {
  auto G = std::make_shared<ActionGroupoid>(a);
  auto H = std::make_shared<PairGroupoid>(a.base_dim);
  const int n = a.base_dim;
  // h = (m', m), g = (m, g).
  auto left = [n](const Vec& h, const Vec& g) { return cat(h.head(n), g.tail(g.size() - n)); };
  auto right = [n, act = a.act](const Vec& h, const Vec& g) {
    const Vec grp = g.tail(g.size() - n);
    return cat(act(h.head(n), grp), act(h.tail(n), grp));
  };
  return std::make_shared<MatchedPairGroupoid>(G, H, left, right, "(" + G->name() + ") |x| (" + H->name() + ")");
}

Vec phi_trivial(const GroupAction& a, const Vec& x) {
  const int n = a.base_dim, k = a.group->coordinate_dim();
  if (x.size() != 2 * n + k) throw DomainError("phi: wrong number of coordinates");
  require_finite(x, "phi");
  const Vec m = x.head(n), g = x.segment(n, k);
  return cat(cat(m, g), cat(a.act(m, g), x.tail(n)));
}

Vec phi_inv(const GroupAction& a, const Vec& y) {
  const int n = a.base_dim, k = a.group->coordinate_dim();
  if (y.size() != 3 * n + k) throw DomainError("phi_inv: wrong number of coordinates");
  require_finite(y, "phi_inv");
  return cat(y.head(n + k), y.tail(n));
}

// ---- axiom suites ----

AxiomReport axiom_check_groupoid(const Groupoid& G, int samples, Rng& rng, double tol) {
  AxiomReport r;
  r.names = {"source(x y) = source(x)", "target(x y) = target(y)", "(x y) z = x (y z)",
             "source(unit(b)) = target(unit(b)) = b", "unit laws", "inverse laws"};
  r.violation.assign(r.names.size(), 0.0);
  r.tol = tol;
  r.samples = samples;
  for (int i = 0; i < samples; ++i) {
    const Vec x = G.random_arrow(rng);
    const Vec y = G.random_from(rng, G.target(x));
    const Vec z = G.random_from(rng, G.target(y));
    const Vec xy = compose(G, x, y);
    r.record(0, inf_norm(G.source(xy) - G.source(x)));
    r.record(1, inf_norm(G.target(xy) - G.target(y)));
    r.record(2, inf_norm(compose(G, xy, z) - compose(G, x, compose(G, y, z))));
    const Vec b = G.random_base(rng);
    const Vec e = G.unit(b);
    r.record(3, std::max(inf_norm(G.source(e) - b), inf_norm(G.target(e) - b)));
    r.record(4, std::max(inf_norm(G.mul_raw(x, G.unit(G.target(x))) - x),
                         inf_norm(G.mul_raw(G.unit(G.source(x)), x) - x)));
    const Vec xi = G.inverse(x);
    r.record(5, std::max(inf_norm(compose(G, x, xi) - G.unit(G.source(x))),
                         inf_norm(compose(G, xi, x) - G.unit(G.target(x)))));
  }
  r.finish();
  return r;
}

MatchedGroupoidReport axiom_check_matched(const MatchedPairGroupoid& M, int samples, Rng& rng,
                                          double tol) {
  const Groupoid &G = M.G(), &H = M.H();
  MatchedGroupoidReport r;
  r.names = {"(i) source(h |> g') = source(h)",
             "(ii) (h'h) |> g' = h' |> (h |> g')",
             "(iii) unit |> g' = g'",
             "(iv) target(h <| g') = target(g')",
             "(v) h <| (g'g) = (h <| g') <| g",
             "(vi) h <| unit = h",
             "(vii) target(h |> g') = source(h <| g')",
             "(viii) h |> (g'g) = (h |> g')((h <| g') |> g)",
             "(ix) (h'h) <| g' = (h' <| (h |> g'))(h <| g')",
             "h |> unit = unit, unit <| g = unit"};
  r.violation.assign(r.names.size(), 0.0);
  r.tol = tol;
  r.samples = samples;
  auto L = [&](const Vec& h, const Vec& g) { return M.left_action(h, g); };
  auto R = [&](const Vec& h, const Vec& g) { return M.right_action(h, g); };
  for (int i = 0; i < samples; ++i) {
    const Vec b = G.random_base(rng);
    const Vec g1 = G.random_from(rng, b);                    // g'
    const Vec g2 = G.random_from(rng, G.target(g1));         // g
    const Vec h = H.inverse(H.random_from(rng, b));          // target(h) = source(g')
    const Vec h1 = H.inverse(H.random_from(rng, H.source(h)));  // h'
    const Vec hg = L(h, g1), hrg = R(h, g1);
    r.record(0, inf_norm(G.source(hg) - H.source(h)));
    r.record(1, inf_norm(L(H.mul_raw(h1, h), g1) - L(h1, hg)));
    r.record(2, inf_norm(L(H.unit(G.source(g1)), g1) - g1));
    r.record(3, inf_norm(H.target(hrg) - G.target(g1)));
    r.record(4, inf_norm(R(h, G.mul_raw(g1, g2)) - R(hrg, g2)));
    r.record(5, inf_norm(R(h, G.unit(H.target(h))) - h));
    r.record(6, inf_norm(G.target(hg) - H.source(hrg)));
    r.record(7, inf_norm(L(h, G.mul_raw(g1, g2)) - G.mul_raw(hg, L(hrg, g2))));
    r.record(8, inf_norm(R(H.mul_raw(h1, h), g1) - H.mul_raw(R(h1, hg), hrg)));
    r.record(9, std::max(inf_norm(L(h, G.unit(H.target(h))) - G.unit(H.source(h))),
                         inf_norm(R(H.unit(G.source(g1)), g1) - H.unit(G.target(g1)))));
  }
  r.finish();
  for (std::size_t i = 0; i < r.violation.size(); ++i)
    if (!(r.violation[i] <= tol)) {
      r.first_failure = static_cast<int>(i) + 1;
      break;
    }
  return r;
}

void require_matched(const MatchedPairGroupoid& M, int samples, Rng& rng, double tol) {
  const auto r = axiom_check_matched(M, samples, rng, tol);
  if (!r.pass) throw MatchedAxiomError(r.first_failure, r.violation[r.first_failure - 1]);
}

AxiomReport groupoid_action_check(const Groupoid& G, const std::function<Vec(Rng&)>& sample_p,
                                  const std::function<Vec(const Vec&)>& f,
                                  const std::function<Vec(const Vec& p, const Vec& g)>& act,
                                  int samples, Rng& rng, double tol) {
  AxiomReport r;
  r.names = {"(i) f(p <| g) = target(g)", "(ii) (p <| g) <| g' = p <| (g g')",
             "(iii) p <| unit(f(p)) = p"};
  r.violation.assign(r.names.size(), 0.0);
  r.tol = tol;
  r.samples = samples;
  for (int i = 0; i < samples; ++i) {
    const Vec p = sample_p(rng);
    const Vec g = G.random_from(rng, f(p));
    const Vec g2 = G.random_from(rng, G.target(g));
    const Vec pg = act(p, g);
    r.record(0, inf_norm(f(pg) - G.target(g)));
    r.record(1, inf_norm(act(pg, g2) - act(p, G.mul_raw(g, g2))));
    r.record(2, inf_norm(act(p, G.unit(f(p))) - p));
  }
  r.finish();
  return r;
}

}  // namespace dmg
