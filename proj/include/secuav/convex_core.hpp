#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace secuav {

// What a term oracle must fill in.
enum class EvalNeeds { Value, Gradient, Hessian };

/// Output of one term oracle, in the coordinates of the term's support.
struct TermEval {
  double value = 0.0;
  std::vector<double> grad;  // |support|
  std::vector<double> hess;  // |support|², row-major
};

/// A smooth function of the variables listed in `support`. The oracle sees
/// only those coordinates, in support order, and sizes grad/hess itself.
struct Term {
  std::vector<std::size_t> support;
  std::function<void(std::span<const double> local, EvalNeeds needs, TermEval& out)> eval;
};

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

/// maximize Σ objective terms (concave)
/// subject to c_i(x) ≤ 0 for every constraint term (convex),
///            lower ≤ x ≤ upper.
/// x0 must satisfy every inequality strictly.
struct ConcaveProgram {
  std::size_t dim = 0;
  std::vector<Term> objective;
  std::vector<Term> constraints;
  std::vector<double> lower;  // empty, or dim entries (−inf for none)
  std::vector<double> upper;  // empty, or dim entries (+inf for none)
  std::vector<double> x0;

  /// Number of barrier terms: constraints plus finite box sides.
  std::size_t barrier_count() const;
};

enum class SolverStatus { Converged, IterationLimit, NumericFailure };

const char* to_string(SolverStatus status);

struct SolverReport {
  std::vector<double> x_star;
  double objective_value = 0.0;
  double kkt_residual = 0.0;  // bound on f* − f(x*): (m + centering slack) / t
  int barrier_iterations = 0;  // total Newton steps
  int barrier_stages = 0;
  SolverStatus status = SolverStatus::NumericFailure;
  std::string message;
};

struct IterateInfo {
  int stage = 0;
  int iteration = 0;
  double t = 0.0;
  double barrier_value = 0.0;  // t·f(x) + Σ log(−c_i(x)) + box logs
  double objective = 0.0;
  std::span<const double> x;
};

struct SolverOptions {
  double tol = 1e-6;  // target bound on the duality gap
  int max_inner_iterations = 10000;
  double t0 = 1.0;
  double t_growth = 10.0;
  double armijo = 1e-4;
  double shrink = 0.5;
  double min_step = 1e-14;
  double centering_tol = 1e-10;  // Newton decrement λ²/2 per stage
  std::function<void(const IterateInfo&)> on_iterate;
};

/// Log-barrier interior-point method with damped Newton centering.
SolverReport solve(const ConcaveProgram& prog, const SolverOptions& opts = {});

// Dense helpers for tests and diagnostics.
double objective_value(const ConcaveProgram& prog, std::span<const double> x);
std::vector<double> objective_gradient(const ConcaveProgram& prog, std::span<const double> x);
double constraint_value(const ConcaveProgram& prog, std::size_t i, std::span<const double> x);
std::vector<double> constraint_gradient(const ConcaveProgram& prog, std::size_t i, std::span<const double> x);
double max_constraint(const ConcaveProgram& prog, std::span<const double> x);

/// True when every constraint and box side holds with strict inequality.
bool strictly_feasible(const ConcaveProgram& prog, std::span<const double> x);

/// Largest violation of midpoint concavity of f / convexity of c_i along the
/// segment [x, y]; non-positive up to roundoff for a well-formed program.
double midpoint_shape_violation(const ConcaveProgram& prog, std::span<const double> x,
                                std::span<const double> y);

}  // namespace secuav
