#include "dmg/del.hpp"

#include <optional>
#include <sstream>

#include "dmg/errors.hpp"

namespace dmg {

namespace {

const Tolerances kTol{};

Vec cat(const Vec& a, const Vec& b) {
  Vec r(a.size() + b.size());
  r << a, b;
  return r;
}

Vec fine_gradient(const std::function<double(const Vec&)>& f, const Vec& x) {
  Vec g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    g[i] = fd_directional_fine(f, x, Vec::Unit(x.size(), i));
  return g;
}

void require_composable(const Groupoid& G, const Vec& x, const Vec& y) {
  const double gap = composability_gap(G, x, y);
  if (!(gap <= kComposeTol)) throw NotComposable(G.target(x), G.source(y), gap);
}

/// Retraction of (g | h) coordinates of a matched pair group.
Vec mp_retract(const MatchedPairGroup& d, const Vec& x) {
  const int ng = d.G->coordinate_dim();
  return cat(d.G->retract(x.head(ng)), d.H->retract(x.tail(d.H->coordinate_dim())));
}

Vec mp_gradient(const MatchedPairGroup& d, const DiscreteLagrangian& L, const Vec& x) {
  if (L.gradient) return L.gradient(x);
  return fine_gradient([&](const Vec& y) { return L.value(mp_retract(d, y)); }, x);
}

}  // namespace

double differential(const Groupoid& G, const DiscreteLagrangian& L, const Vec& x, const Vec& v) {
  if (L.gradient) return L.gradient(x).dot(v);
  return fd_directional_fine([&](const Vec& y) { return L.value(G.retract(y)); }, x, v);
}

Vec lagrangian_gradient(const Groupoid& G, const DiscreteLagrangian& L, const Vec& x) {
  if (L.gradient) return L.gradient(x);
  return fine_gradient([&](const Vec& y) { return L.value(G.retract(y)); }, x);
}

Trajectory make_trajectory(const Groupoid& G, std::vector<Vec> arrows) {
  Trajectory t;
  t.arrows = std::move(arrows);
  for (std::size_t k = 0; k + 1 < t.arrows.size(); ++k) {
    const Vec tx = G.target(t.arrows[k]), sy = G.source(t.arrows[k + 1]);
    const double gap = inf_norm(tx - sy);
    if (!(gap <= kComposeTol)) throw NotComposable(tx, sy, gap);
    t.certificates.push_back({G.source(t.arrows[k]), G.target(t.arrows[k + 1]), gap});
  }
  return t;
}

double action_sum(const Groupoid& G, const DiscreteLagrangian& L, const Trajectory& traj) {
  double s = 0.0;
  for (std::size_t k = 0; k < traj.arrows.size(); ++k) {
    if (k + 1 < traj.arrows.size()) require_composable(G, traj.arrows[k], traj.arrows[k + 1]);
    s += L.value(traj.arrows[k]);
  }
  return s;
}

Vec del_residual(const Groupoid& G, const DiscreteLagrangian& L, const Vec& xk, const Vec& xk1) {
  require_composable(G, xk, xk1);
  const Vec b = G.target(xk);
  const int n = G.fiber_dim();
  Vec r(n);
  for (int i = 0; i < n; ++i) {
    const AlgebroidVector E{b, Vec::Unit(n, i)};
    r[i] = differential(G, L, xk, left_invariant(G, E, xk)) -
           differential(G, L, xk1, right_invariant(G, E, xk1));
  }
  return r;
}

Vec del_residual_group(const LieGroup& G, const DiscreteLagrangian& L, const Vec& gk, const Vec& gk1) {
  auto grad = [&](const Vec& g) {
    if (L.gradient) return L.gradient(g);
    return fine_gradient([&](const Vec& y) { return L.value(G.retract(y)); }, g);
  };
  return Vec(G.lift_matrix(Side::Left, gk).transpose() * grad(gk) -
             G.lift_matrix(Side::Right, gk1).transpose() * grad(gk1));
}

Vec del_residual_matched(const MatchedPairGroupoid& M, const DiscreteLagrangian& L, const Vec& xk,
                         const Vec& xk1) {
  require_composable(M, xk, xk1);
  const Groupoid &G = M.G(), &H = M.H();
  const Vec gk = M.g_part(xk), hk = M.h_part(xk), gk1 = M.g_part(xk1), hk1 = M.h_part(xk1);
  const Vec zg = Vec::Zero(G.arrow_dim()), zh = Vec::Zero(H.arrow_dim());
  const Vec b = M.target(xk);
  const int ng = G.fiber_dim(), nh = H.fiber_dim();
  auto dL = [&](const Vec& x, const Vec& vg, const Vec& vh) { return differential(M, L, x, cat(vg, vh)); };
  Vec r(ng + nh);
  for (int i = 0; i < ng; ++i) {
    const AlgebroidVector X{b, Vec::Unit(ng, i)};
    const double t1 = dL(xk, left_invariant(G, h_on_X(M, hk, X), gk), zh);
    const double t2 = -dL(xk1, right_invariant(G, X, gk1), zh);
    const double t4 = dL(xk, zg, x_dagger(M, X, hk));
    r[i] = t1 + t2 + t4;
  }
  for (int i = 0; i < nh; ++i) {
    const AlgebroidVector Y{b, Vec::Unit(nh, i)};
    const double t3 = dL(xk1, y_dagger(M, Y, gk1), zh);
    const double t5 = dL(xk, zg, left_invariant(H, Y, hk));
    const double t6 = -dL(xk1, zg, right_invariant(H, y_on_g(M, Y, gk1), hk1));
    r[ng + i] = t3 + t5 + t6;
  }
  return r;
}

// ---- matched pair groups ----

MatchedCovector mp_momenta(const MatchedPairGroup& d, const DiscreteLagrangian& L, const Vec& x) {
  const int ng = d.G->coordinate_dim(), nh = d.H->coordinate_dim();
  const Vec grad = mp_gradient(d, L, x);
  const Vec g = x.head(ng), h = x.tail(nh);
  return {d.G->lift_matrix(Side::Right, g).transpose() * grad.head(ng),
          d.H->lift_matrix(Side::Right, h).transpose() * grad.tail(nh)};
}

Vec del_residual_matched_group(const MatchedPairGroup& d, const DiscreteLagrangian& L, const Vec& xk,
                               const Vec& xk1, Reduction red) {
  const int ng = d.G->coordinate_dim(), nh = d.H->coordinate_dim();
  if (xk.size() != ng + nh || xk1.size() != ng + nh)
    throw TagError("matched group residual: coordinates do not match the descriptor");
  const Vec gk = xk.head(ng), hk = xk.tail(nh), gk1 = xk1.head(ng);
  const Vec grad_k = mp_gradient(d, L, xk), grad_k1 = mp_gradient(d, L, xk1);
  const auto mk = mp_momenta(d, L, xk), mk1 = mp_momenta(d, L, xk1);
  const Vec transported_mu = d.G->Ad(gk).transpose() * mk.mu;
  const Vec transported_nu = d.H->Ad(hk).transpose() * mk.nu;
  const bool left = red == Reduction::Full || red == Reduction::RightTrivial;
  const bool right = red == Reduction::Full || red == Reduction::LeftTrivial;
  Vec mu_part = (left ? star_left(d, hk, transported_mu) : transported_mu) - mk1.mu;
  Vec nu_part = transported_nu - (right ? star_right(d, gk1, mk1.nu) : mk1.nu);
  if (right) mu_part += a_star(d, hk, grad_k.tail(nh));
  if (left) nu_part -= b_star(d, gk1, grad_k1.head(ng));
  return cat(mu_part, nu_part);
}

Vec del_residual_matched_group_fields(const MatchedPairGroup& d, const DiscreteLagrangian& L,
                                      const Vec& xk, const Vec& xk1) {
  const int ng = d.G->coordinate_dim(), nh = d.H->coordinate_dim();
  const int ag = d.G->algebra_dim(), ah = d.H->algebra_dim();
  const Vec grad_k = mp_gradient(d, L, xk), grad_k1 = mp_gradient(d, L, xk1);
  const MatchedPairElement pk{xk.head(ng), xk.tail(nh)}, pk1{xk1.head(ng), xk1.tail(nh)};
  Vec r(ag + ah);
  for (int i = 0; i < ag + ah; ++i) {
    const Vec e = Vec::Unit(ag + ah, i);
    const MatchedAlgebraVector v{e.head(ag), e.tail(ah)};
    const auto fl = mp_invariant_field(d, Side::Left, v, pk);
    const auto fr = mp_invariant_field(d, Side::Right, v, pk1);
    r[i] = grad_k.dot(cat(fl.dg, fl.dh)) - grad_k1.dot(cat(fr.dg, fr.dh));
  }
  return r;
}

// ---- solving ----

StepInfo solve_junction(const Groupoid& G, const JunctionResidual& residual, const Vec& xk,
                        const std::optional<Vec>& guess, const Tolerances& tol) {
  const Vec b = G.target(xk);
  const Vec start = guess ? *guess : G.transport(xk, b);
  if (!(inf_norm(G.source(start) - b) <= kComposeTol))
    throw BasePointMismatch("solve_junction: guess does not start at the target of the previous arrow");
  auto F = [&](const Vec& d) { return residual(xk, G.fiber_point(start, d)); };
  const int n = G.fiber_dim();
  std::optional<NewtonResult> found;
  try {
    found = newton_solve(F, Vec::Zero(n), tol);
  } catch (const NoConvergence&) {
    // Restarts along the fiber axes, in a fixed order.
    for (double s : {0.5, -0.5, 1.0, -1.0, 2.0, -2.0, 4.0, -4.0}) {
      for (int i = 0; i < n && !found; ++i) {
        try {
          found = newton_solve(F, s * Vec::Unit(n, i), tol);
        } catch (const NoConvergence&) {
        } catch (const SingularJacobian&) {
        }
      }
      if (found) break;
    }
    if (!found) throw;
  }
  const NewtonResult& nr = *found;
  const double cond = condition_estimate(fd_jacobian(F, nr.x, tol));
  if (!(cond <= tol.singular_cond)) throw SingularJacobian(cond);
  StepInfo s;
  s.arrow = G.retract(G.fiber_point(start, nr.x));
  s.iterations = nr.iterations;
  s.residual = inf_norm(residual(xk, s.arrow));
  return s;
}

Vec del_step(const Groupoid& G, const DiscreteLagrangian& L, const Vec& xk,
             const std::optional<Vec>& guess, const Tolerances& tol) {
  return solve_junction(G, [&](const Vec& a, const Vec& c) { return del_residual(G, L, a, c); }, xk,
                        guess, tol)
      .arrow;
}

Trajectory solve_trajectory(const Groupoid& G, const DiscreteLagrangian& L, const Vec& x1, int n,
                            const JunctionResidual& residual, const Tolerances& tol,
                            double oracle_tol) {
  if (n < 1) throw DomainError("trajectory needs at least one arrow");
  const JunctionResidual R =
      residual ? residual : [&](const Vec& a, const Vec& c) { return del_residual(G, L, a, c); };
  std::vector<Vec> arrows{G.retract(x1)};
  std::vector<double> norms;
  for (int k = 1; k < n; ++k) {
    const auto s = solve_junction(G, R, arrows.back(), std::nullopt, tol);
    norms.push_back(s.residual);
    arrows.push_back(s.arrow);
  }
  Trajectory t = make_trajectory(G, std::move(arrows));
  t.residual_norms = std::move(norms);
  const auto o = variational_oracle(G, L, t);
  for (std::size_t k = 0; k < o.per_junction.size(); ++k) {
    const double v = inf_norm(o.per_junction[k]);
    t.oracle.push_back(v);
    if (!(v <= oracle_tol)) {
      std::ostringstream os;
      os << "variational check failed at step " << k + 1 << ": " << v;
      throw EvaluationError(os.str(), t.arrows[k + 1]);
    }
  }
  return t;
}

double variational_derivative(const Groupoid& G, const DiscreteLagrangian& L, const Trajectory& traj,
                              std::size_t k, const Vec& X) {
  if (k + 1 >= traj.arrows.size()) throw DomainError("variational_derivative: no junction at this index");
  const Vec b = G.target(traj.arrows[k]);
  require_composable(G, traj.arrows[k], traj.arrows[k + 1]);
  auto sum = [&](double t) {
    const Vec c = G.unit_chart(b, t * X);
    double s = 0.0;
    for (std::size_t j = 0; j < traj.arrows.size(); ++j) {
      if (j == k)
        s += L.value(G.mul_raw(traj.arrows[j], c));
      else if (j == k + 1)
        s += L.value(G.mul_raw(G.inverse(c), traj.arrows[j]));
      else
        s += L.value(traj.arrows[j]);
    }
    return Vec::Constant(1, s);
  };
  return fd_curve(sum, kTol)[0];
}

OracleReport variational_oracle(const Groupoid& G, const DiscreteLagrangian& L, const Trajectory& traj) {
  OracleReport r;
  const int n = G.fiber_dim();
  for (std::size_t k = 0; k + 1 < traj.arrows.size(); ++k) {
    Vec v(n);
    for (int i = 0; i < n; ++i) v[i] = variational_derivative(G, L, traj, k, Vec::Unit(n, i));
    r.max_abs = std::max(r.max_abs, inf_norm(v));
    r.per_junction.push_back(v);
  }
  return r;
}

MomentumReport momentum_evolution(const GroupAsGroupoid& G, const DiscreteLagrangian& L,
                                  const Trajectory& traj) {
  const LieGroup& grp = *G.group();
  MomentumReport r;
  for (std::size_t k = 0; k < traj.arrows.size(); ++k) {
    const Vec& g = traj.arrows[k];
    r.records.push_back({k, grp.lift_matrix(Side::Right, g).transpose() * lagrangian_gradient(G, L, g), Vec()});
  }
  for (std::size_t k = 0; k + 1 < r.records.size(); ++k) {
    const Vec pred = grp.Ad(traj.arrows[k]).transpose() * r.records[k].mu;
    r.max_defect = std::max(r.max_defect, (r.records[k + 1].mu - pred).norm());
  }
  return r;
}

Vec action_forcing(const ActionGroupoid& G, const DiscreteLagrangian& L, const Vec& xk1) {
  const LieGroup& grp = *G.action().group;
  const Vec m = G.base_part(xk1), g = G.group_part(xk1);
  const int n = grp.algebra_dim();
  Vec f(n);
  for (int j = 0; j < n; ++j)
    f[j] = fd_curve(
        [&](double t) {
          return Vec::Constant(1, L.value(G.make(G.action().act(m, grp.exp(t * Vec::Unit(n, j))), g)));
        },
        kTol)[0];
  return f;
}

MomentumReport momentum_evolution(const ActionGroupoid& G, const DiscreteLagrangian& L,
                                  const Trajectory& traj) {
  const LieGroup& grp = *G.action().group;
  const int nb = G.base_dim();
  MomentumReport r;
  for (std::size_t k = 0; k < traj.arrows.size(); ++k) {
    const Vec& x = traj.arrows[k];
    const Vec grad = lagrangian_gradient(G, L, x);
    r.records.push_back({k, grp.lift_matrix(Side::Right, G.group_part(x)).transpose() * grad.tail(grad.size() - nb), Vec()});
  }
  for (std::size_t k = 0; k + 1 < r.records.size(); ++k) {
    const Vec pred = grp.Ad(G.group_part(traj.arrows[k])).transpose() * r.records[k].mu +
                     action_forcing(G, L, traj.arrows[k + 1]);
    r.max_defect = std::max(r.max_defect, (r.records[k + 1].mu - pred).norm());
  }
  return r;
}

MomentumReport momentum_evolution(const MatchedPairGroup& d, const DiscreteLagrangian& L,
                                  const Trajectory& traj, Reduction red) {
  MomentumReport r;
  for (std::size_t k = 0; k < traj.arrows.size(); ++k) {
    const auto m = mp_momenta(d, L, traj.arrows[k]);
    r.records.push_back({k, m.mu, m.nu});
  }
  for (std::size_t k = 0; k + 1 < traj.arrows.size(); ++k)
    r.max_defect = std::max(
        r.max_defect, del_residual_matched_group(d, L, traj.arrows[k], traj.arrows[k + 1], red).norm());
  return r;
}

// ---- built-in Lagrangians ----

DiscreteLagrangian constant_lagrangian(double c) {
  return {"constant", [c](const Vec&) { return c; }, [](const Vec& x) { return Vec(Vec::Zero(x.size())); }};
}

DiscreteLagrangian kinetic_lagrangian(GroupoidPtr G, Vec w) {
  if (w.size() == 0) w = Vec::Ones(G->fiber_dim());
  if (w.size() != G->fiber_dim()) throw DomainError("kinetic weights: wrong length");
  return {"kinetic", [G, w](const Vec& x) {
            const Vec f = G->fiber_coords(x);
            return 0.5 * f.dot(w.cwiseProduct(f));
          },
          {}};
}

DiscreteLagrangian coupled_lagrangian(GroupoidPtr G, Mat Q) {
  const int n = G->base_dim() + G->fiber_dim();
  if (Q.rows() != n || Q.cols() != n) throw DomainError("coupled Lagrangian: wrong matrix size");
  return {"coupled", [G, Q](const Vec& x) {
            const Vec c = G->chart(x);
            return 0.5 * c.dot(Q * c);
          },
          {}};
}

DiscreteLagrangian potential_lagrangian(GroupoidPtr G, double eps) {
  return {"potential", [G, eps](const Vec& x) {
            const Vec f = G->fiber_coords(x);
            const Vec c = G->chart(x);
            return 0.5 * f.squaredNorm() + eps * (1.0 - c.array().cos()).sum();
          },
          {}};
}

DiscreteLagrangian moser_veselov_lagrangian(const Mat3& J) {
  return {"moser_veselov",
          [J](const Vec& x) { return ((Mat3::Identity() - SO3Group::to_matrix(x)) * J).trace(); },
          [J](const Vec&) {
            const Mat3 Jt = -J.transpose();
            return SO3Group::from_matrix(Jt);
          }};
}

DiscreteLagrangian pair_lagrangian(int n) {
  return {"pair_quadratic", [n](const Vec& x) { return 0.5 * (x.tail(n) - x.head(n)).squaredNorm(); },
          [n](const Vec& x) {
            const Vec d = x.tail(n) - x.head(n);
            return cat(-d, d);
          }};
}

namespace {

Vec rotate_t(const Vec& m, double th) {
  const double c = std::cos(th), s = std::sin(th);
  Vec r(2);
  r << c * m[0] + s * m[1], -s * m[0] + c * m[1];
  return r;
}

}  // namespace

DiscreteLagrangian trivial_lagrangian(double w, double kappa) {
  return {"trivial_quadratic", [w, kappa](const Vec& x) {
            const Vec m = x.head(2), n = x.tail(2);
            const double th = x[2];
            return 0.5 * (n - m).squaredNorm() + 0.5 * w * th * th + kappa * rotate_t(m, th).dot(n);
          },
          {}};
}

DiscreteLagrangian trivial_matched_lagrangian(double w, double kappa) {
  return {"trivial_quadratic_matched", [w, kappa](const Vec& x) {
            const Vec m = x.head(2), p = x.segment(3, 2), n = x.tail(2);
            const double th = x[2];
            return 0.5 * (n - m).squaredNorm() + 0.5 * w * th * th + kappa * p.dot(n);
          },
          {}};
}

DiscreteLagrangian sl2c_lagrangian(const Vec3& wa, const Vec3& wb, double kappa) {
  auto su2 = make_su2();
  auto k = make_k();
  return {"sl2c_quadratic", [su2, k, wa, wb, kappa](const Vec& x) {
            const Vec3 a = su2->log(x.head(4)), b = k->log(x.tail(3));
            return 0.5 * a.dot(wa.cwiseProduct(a)) + 0.5 * b.dot(wb.cwiseProduct(b)) + kappa * a.dot(b);
          },
          {}};
}

}  // namespace dmg
