#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dmg/algebroid.hpp"
#include "dmg/groupoid.hpp"
#include "dmg/matched_group.hpp"

namespace dmg {

/// Real function of arrow coordinates. The gradient, when given, is with respect to
/// the ambient coordinates; otherwise differentials come from finite differences of
/// value o retract.
struct DiscreteLagrangian {
  std::string name;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
};

/// <dL(x), v> for a tangent vector v at x.
double differential(const Groupoid& G, const DiscreteLagrangian& L, const Vec& x, const Vec& v);
/// Ambient gradient of L at x (closed form or finite differences).
Vec lagrangian_gradient(const Groupoid& G, const DiscreteLagrangian& L, const Vec& x);

struct Trajectory {
  std::vector<Vec> arrows;
  std::vector<Certificate> certificates;  ///< one per adjacent pair
  std::vector<double> residual_norms;     ///< one per junction
  std::vector<double> oracle;             ///< variational check per junction
};

/// Attaches composability certificates; throws NotComposable.
Trajectory make_trajectory(const Groupoid& G, std::vector<Vec> arrows);

double action_sum(const Groupoid& G, const DiscreteLagrangian& L, const Trajectory& traj);

/// Components <dL, <-E_i(x_k)> - <dL, ->E_i(x_{k+1})> over the unit-chart basis at
/// target(x_k) = source(x_{k+1}).
Vec del_residual(const Groupoid& G, const DiscreteLagrangian& L, const Vec& xk, const Vec& xk1);

/// Group case written with translated differentials:
/// (T l_{g_k})^T dL(g_k) - (T r_{g_{k+1}})^T dL(g_{k+1}).
Vec del_residual_group(const LieGroup& G, const DiscreteLagrangian& L, const Vec& gk, const Vec& gk1);

/// Matched pair groupoid residual assembled from the six terms
/// <-(h_k |> X)(g_k), ->X(g_{k+1}), Y^dagger(g_{k+1}), X^dagger(h_k), <-Y(h_k), ->(Y <| g_{k+1})(h_{k+1}).
Vec del_residual_matched(const MatchedPairGroupoid& M, const DiscreteLagrangian& L, const Vec& xk,
                         const Vec& xk1);

// ---- matched pair groups ----

/// Right-translated differentials mu = (T r_g)^T d_g L, nu = (T r_h)^T d_h L at x = (g | h).
MatchedCovector mp_momenta(const MatchedPairGroup& d, const DiscreteLagrangian& L, const Vec& x);

enum class Reduction { Full, RightTrivial, LeftTrivial, BothTrivial };

/// Momentum form of the matched group residual:
///   mu-part  (Ad_{g_k}^T mu_k) <|* h_k + a*_{h_k} d_h L_k - mu_{k+1}
///   nu-part  Ad_{h_k}^T nu_k - b*_{g_{k+1}} d_g L_{k+1} - g_{k+1} |>* nu_{k+1}
/// The reduced variants drop the terms of the action declared trivial, keeping the
/// remaining ones from d.
Vec del_residual_matched_group(const MatchedPairGroup& d, const DiscreteLagrangian& L, const Vec& xk,
                               const Vec& xk1, Reduction r = Reduction::Full);

/// Same residual paired directly against the matched invariant fields.
Vec del_residual_matched_group_fields(const MatchedPairGroup& d, const DiscreteLagrangian& L,
                                      const Vec& xk, const Vec& xk1);

// ---- solving ----

using JunctionResidual = std::function<Vec(const Vec& xk, const Vec& xk1)>;

struct StepInfo {
  Vec arrow;
  int iterations = 0;
  double residual = 0.0;
};

/// Solves residual(xk, x) = 0 for x in the source fiber over target(xk), starting at
/// guess (default: xk transported to that fiber). Throws SingularJacobian when the
/// residual does not determine the step.
StepInfo solve_junction(const Groupoid& G, const JunctionResidual& residual, const Vec& xk,
                        const std::optional<Vec>& guess = std::nullopt, const Tolerances& tol = {});

Vec del_step(const Groupoid& G, const DiscreteLagrangian& L, const Vec& xk,
             const std::optional<Vec>& guess = std::nullopt, const Tolerances& tol = {});

/// N arrows starting at x1, each step solved and then checked by the variational oracle.
/// Throws EvaluationError naming the step if the oracle exceeds oracle_tol.
Trajectory solve_trajectory(const Groupoid& G, const DiscreteLagrangian& L, const Vec& x1, int n,
                            const JunctionResidual& residual = {}, const Tolerances& tol = {},
                            double oracle_tol = 1e-6);

/// d/dt of the action sum under x_k -> x_k c(t), x_{k+1} -> c(t)^{-1} x_{k+1}, c the
/// unit-chart curve along X at junction k (between arrows k and k+1).
double variational_derivative(const Groupoid& G, const DiscreteLagrangian& L, const Trajectory& traj,
                              std::size_t k, const Vec& X);

struct OracleReport {
  std::vector<Vec> per_junction;
  double max_abs = 0.0;
};

/// Directional derivatives along every unit-chart basis direction at every junction.
OracleReport variational_oracle(const Groupoid& G, const DiscreteLagrangian& L, const Trajectory& traj);

struct MomentumRecord {
  std::size_t step = 0;
  Vec mu;
  Vec nu;
};

struct MomentumReport {
  std::vector<MomentumRecord> records;
  double max_defect = 0.0;
};

/// mu_k = (T r_{g_k})^T dL(g_k); defect max |mu_{k+1} - Ad_{g_k}^T mu_k|.
MomentumReport momentum_evolution(const GroupAsGroupoid& G, const DiscreteLagrangian& L,
                                  const Trajectory& traj);

/// Action groupoid version; the recursion carries the forcing
/// d/dt L(m_{k+1} . exp(t xi), g_{k+1}) with m_{k+1} the target of arrow k.
MomentumReport momentum_evolution(const ActionGroupoid& G, const DiscreteLagrangian& L,
                                  const Trajectory& traj);
/// Forcing term at junction k (derivative of the base slot along the orbit map).
Vec action_forcing(const ActionGroupoid& G, const DiscreteLagrangian& L, const Vec& xk1);

/// Matched group version: mu and nu per arrow, defect is the largest residual of the
/// momentum form along the trajectory.
MomentumReport momentum_evolution(const MatchedPairGroup& d, const DiscreteLagrangian& L,
                                  const Trajectory& traj, Reduction r = Reduction::Full);

// ---- built-in Lagrangians ----

DiscreteLagrangian constant_lagrangian(double c);
/// 1/2 sum_i w_i f_i^2 over fiber coordinates f; unit weights when w is empty.
DiscreteLagrangian kinetic_lagrangian(GroupoidPtr G, Vec w = {});
/// 1/2 c^T Q c over the full chart c = (source, fiber coordinates), Q symmetric positive definite.
DiscreteLagrangian coupled_lagrangian(GroupoidPtr G, Mat Q);
/// Kinetic term plus eps * sum_i (1 - cos c_i) over the chart.
DiscreteLagrangian potential_lagrangian(GroupoidPtr G, double eps);
/// tr((I - R) J) on SO(3) in row-major coordinates, with its closed gradient.
DiscreteLagrangian moser_veselov_lagrangian(const Mat3& J);
/// 1/2 |y - x|^2 on the pair groupoid R^n x R^n.
DiscreteLagrangian pair_lagrangian(int n);
/// 1/2 |n - m|^2 + 1/2 w theta^2 + kappa <m.g, n> on R^2 x SO(2) x R^2.
DiscreteLagrangian trivial_lagrangian(double w, double kappa);
/// The same function on the matched decomposition, reading m.g from the middle slot.
DiscreteLagrangian trivial_matched_lagrangian(double w, double kappa);
/// 1/2 a^T Wa a + 1/2 b^T Wb b + kappa a . b with a = log A, b = log B on SU(2) x K.
DiscreteLagrangian sl2c_lagrangian(const Vec3& wa, const Vec3& wb, double kappa);

}  // namespace dmg
