#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dmg {

struct EvaluationError : std::runtime_error {
  Eigen::VectorXd point;
  EvaluationError(const std::string& what, Eigen::VectorXd p)
      : std::runtime_error(what), point(std::move(p)) {}
};

struct SingularJacobian : std::runtime_error {
  double condition;
  explicit SingularJacobian(double cond)
      : std::runtime_error("singular Jacobian, condition estimate " + std::to_string(cond)),
        condition(cond) {}
};

struct NoConvergence : std::runtime_error {
  double last_residual;
  int iterations;
  NoConvergence(double r, int it)
      : std::runtime_error("Newton iteration did not converge after " + std::to_string(it) +
                           " iterations, residual " + std::to_string(r)),
        last_residual(r), iterations(it) {}
};

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct TagError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NotComposable : std::runtime_error {
  Eigen::VectorXd target_of_first;
  Eigen::VectorXd source_of_second;
  NotComposable(Eigen::VectorXd bx, Eigen::VectorXd ay, double gap)
      : std::runtime_error("arrows not composable, gap " + std::to_string(gap)),
        target_of_first(std::move(bx)), source_of_second(std::move(ay)) {}
};

struct BasePointMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MatchedAxiomError : std::runtime_error {
  int condition;
  double violation;
  MatchedAxiomError(int cond, double v)
      : std::runtime_error("matched-pair condition " + std::to_string(cond) + " violated by " +
                           std::to_string(v)),
        condition(cond), violation(v) {}
};

struct FormulaMismatch : std::runtime_error {
  int step;
  double deviation;
  FormulaMismatch(int k, double d)
      : std::runtime_error("closed-form and generic residuals disagree at step " +
                           std::to_string(k) + " by " + std::to_string(d)),
        step(k), deviation(d) {}
};

}  // namespace dmg
