#include "secuav/convex_core.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>

#include "secuav/errors.hpp"

namespace secuav {

const char* to_string(SolverStatus status) {
  switch (status) {
    case SolverStatus::Converged:
      return "converged";
    case SolverStatus::IterationLimit:
      return "iteration-limit";
    case SolverStatus::NumericFailure:
      return "numeric-failure";
  }
  return "unknown";
}

std::size_t ConcaveProgram::barrier_count() const {
  std::size_t m = constraints.size();
  for (double l : lower) m += std::isfinite(l) ? 1 : 0;
  for (double u : upper) m += std::isfinite(u) ? 1 : 0;
  return m;
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

void check_program(const ConcaveProgram& prog) {
  if (prog.x0.size() != prog.dim) throw ValidationError("concave program: x0 has wrong dimension");
  if (!prog.lower.empty() && prog.lower.size() != prog.dim) {
    throw ValidationError("concave program: lower bounds have wrong dimension");
  }
  if (!prog.upper.empty() && prog.upper.size() != prog.dim) {
    throw ValidationError("concave program: upper bounds have wrong dimension");
  }
  auto check_term = [&](const Term& term) {
    for (auto i : term.support) {
      if (i >= prog.dim) throw ValidationError("concave program: term support out of range");
    }
    if (!term.eval) throw ValidationError("concave program: term without oracle");
  };
  for (const auto& t : prog.objective) check_term(t);
  for (const auto& t : prog.constraints) check_term(t);
}

double lower_of(const ConcaveProgram& p, std::size_t i) { return p.lower.empty() ? -kUnbounded : p.lower[i]; }
double upper_of(const ConcaveProgram& p, std::size_t i) { return p.upper.empty() ? kUnbounded : p.upper[i]; }

// Evaluates one term at x, in support coordinates.
class TermEvaluator {
 public:
  void run(const Term& term, std::span<const double> x, EvalNeeds needs) {
    local_.resize(term.support.size());
    for (std::size_t a = 0; a < term.support.size(); ++a) local_[a] = x[term.support[a]];
    out_.value = 0.0;
    const std::size_t s = term.support.size();
    if (needs != EvalNeeds::Value) out_.grad.assign(s, 0.0);
    if (needs == EvalNeeds::Hessian) out_.hess.assign(s * s, 0.0);
    term.eval(local_, needs, out_);
  }
  const TermEval& result() const { return out_; }

 private:
  std::vector<double> local_;
  TermEval out_;
};

struct BarrierState {
  double value = 0.0;      // φ_t
  double objective = 0.0;  // f
  bool feasible = true;
};

class BarrierProblem {
 public:
  explicit BarrierProblem(const ConcaveProgram& prog) : prog_(prog) {}

  // φ_t(x) = t·f(x) + Σ log(−c_i(x)) + Σ box logs. Gradient and Hessian
  // (of −φ, lower triangle) are produced on request.
  BarrierState evaluate(std::span<const double> x, double t, EvalNeeds needs, Eigen::VectorXd* grad,
                        std::vector<Triplet>* neg_hess) {
    BarrierState st;
    const bool want_grad = needs != EvalNeeds::Value;
    const bool want_hess = needs == EvalNeeds::Hessian;
    if (want_grad) grad->setZero(static_cast<Eigen::Index>(prog_.dim));
    if (want_hess) neg_hess->clear();

    for (std::size_t i = 0; i < prog_.dim; ++i) {
      const double l = lower_of(prog_, i);
      const double u = upper_of(prog_, i);
      if (std::isfinite(l)) {
        const double gap = x[i] - l;
        if (!(gap > 0.0)) return infeasible();
        st.value += std::log(gap);
        if (want_grad) (*grad)[i] += 1.0 / gap;
        if (want_hess) neg_hess->emplace_back(i, i, 1.0 / (gap * gap));
      }
      if (std::isfinite(u)) {
        const double gap = u - x[i];
        if (!(gap > 0.0)) return infeasible();
        st.value += std::log(gap);
        if (want_grad) (*grad)[i] -= 1.0 / gap;
        if (want_hess) neg_hess->emplace_back(i, i, 1.0 / (gap * gap));
      }
    }

    for (const auto& term : prog_.constraints) {
      eval_.run(term, x, needs);
      const auto& r = eval_.result();
      const double c = r.value;
      if (!(c < 0.0) || !std::isfinite(c)) return infeasible();
      st.value += std::log(-c);
      if (!want_grad) continue;
      const auto& sup = term.support;
      for (std::size_t a = 0; a < sup.size(); ++a) (*grad)[sup[a]] += r.grad[a] / c;
      if (!want_hess) continue;
      const double inv = 1.0 / c;
      for (std::size_t a = 0; a < sup.size(); ++a) {
        for (std::size_t b = 0; b < sup.size(); ++b) {
          if (sup[a] < sup[b]) continue;
          const double h = -r.hess[a * sup.size() + b] * inv + r.grad[a] * r.grad[b] * inv * inv;
          neg_hess->emplace_back(sup[a], sup[b], h);
        }
      }
    }

    for (const auto& term : prog_.objective) {
      eval_.run(term, x, needs);
      const auto& r = eval_.result();
      if (!std::isfinite(r.value)) return infeasible();
      st.objective += r.value;
      if (!want_grad) continue;
      const auto& sup = term.support;
      for (std::size_t a = 0; a < sup.size(); ++a) (*grad)[sup[a]] += t * r.grad[a];
      if (!want_hess) continue;
      for (std::size_t a = 0; a < sup.size(); ++a) {
        for (std::size_t b = 0; b < sup.size(); ++b) {
          if (sup[a] < sup[b]) continue;
          const double h = -t * r.hess[a * sup.size() + b];
          neg_hess->emplace_back(sup[a], sup[b], h);
        }
      }
    }
    st.value += t * st.objective;
    return st;
  }

 private:
  static BarrierState infeasible() {
    BarrierState st;
    st.feasible = false;
    return st;
  }

  const ConcaveProgram& prog_;
  TermEvaluator eval_;
};

// Solves (−∇²φ) d = ∇φ with symmetric diagonal equilibration and a ridge
// that grows until the factorization is positive definite.
class NewtonSystem {
 public:
  explicit NewtonSystem(std::size_t dim) : dim_(static_cast<Eigen::Index>(dim)) {}

  bool solve(const std::vector<Triplet>& neg_hess, const Eigen::VectorXd& grad, Eigen::VectorXd& step) {
    SpMat m(dim_, dim_);
    m.setFromTriplets(neg_hess.begin(), neg_hess.end());
    Eigen::VectorXd diag = Eigen::VectorXd::Ones(dim_);
    for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
      for (SpMat::InnerIterator it(m, k); it; ++it) {
        if (it.row() == it.col()) diag[it.row()] = it.value();
      }
    }
    Eigen::VectorXd scale(dim_);
    for (Eigen::Index i = 0; i < dim_; ++i) scale[i] = diag[i] > 1e-300 ? 1.0 / std::sqrt(diag[i]) : 1.0;
    SpMat scaled = scale.asDiagonal() * m * scale.asDiagonal();
    SpMat ridge_id(dim_, dim_);
    ridge_id.setIdentity();

    if (!analyzed_) {
      ldlt_.analyzePattern(scaled);
      analyzed_ = true;
    }
    const Eigen::VectorXd rhs = scale.cwiseProduct(grad);
    for (double ridge = 1e-12; ridge <= 1.0; ridge *= 100.0) {
      SpMat regular = scaled + ridge * ridge_id;
      ldlt_.factorize(regular);
      if (ldlt_.info() != Eigen::Success) continue;
      if ((ldlt_.vectorD().array() <= 0.0).any()) continue;
      step = scale.cwiseProduct(ldlt_.solve(rhs));
      if (step.allFinite()) return true;
    }
    return false;
  }

 private:
  Eigen::Index dim_;
  bool analyzed_ = false;
  Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
};

}  // namespace

SolverReport solve(const ConcaveProgram& prog, const SolverOptions& opts) {
  check_program(prog);
  SolverReport report;
  if (!strictly_feasible(prog, prog.x0)) {
    throw ValidationError("concave program: start point is not strictly feasible");
  }
  const double m = static_cast<double>(prog.barrier_count());
  BarrierProblem barrier(prog);
  NewtonSystem newton(prog.dim);

  std::vector<double> x = prog.x0;
  std::vector<double> trial(prog.dim);
  Eigen::VectorXd grad;
  Eigen::VectorXd step;
  std::vector<Triplet> neg_hess;

  double t = opts.t0;
  double centering_gap = 0.0;
  int total = 0;
  auto finish = [&](SolverStatus status, std::string msg) {
    report.x_star = x;
    report.objective_value = objective_value(prog, x);
    report.kkt_residual = (m + centering_gap) / t;
    report.barrier_iterations = total;
    report.status = status;
    report.message = std::move(msg);
    return report;
  };

  // Problems without inequalities are solved by a single centering at t0.
  const bool unconstrained = m == 0.0;
  for (int stage = 0;; ++stage) {
    report.barrier_stages = stage + 1;
    for (int it = 0;; ++it) {
      if (total >= opts.max_inner_iterations) {
        return finish(SolverStatus::IterationLimit, "inner iteration limit reached");
      }
      const auto st = barrier.evaluate(x, t, EvalNeeds::Hessian, &grad, &neg_hess);
      if (!newton.solve(neg_hess, grad, step)) {
        return finish(SolverStatus::NumericFailure, "Newton system could not be factorized");
      }
      const double decrement = grad.dot(step);  // λ²
      centering_gap = std::max(0.0, 0.5 * decrement);
      if (centering_gap <= opts.centering_tol) break;

      // Longest step that keeps the box strictly satisfied.
      double s = 1.0;
      for (std::size_t i = 0; i < prog.dim; ++i) {
        const double d = step[static_cast<Eigen::Index>(i)];
        if (d < 0.0 && std::isfinite(lower_of(prog, i))) s = std::min(s, 0.99 * (lower_of(prog, i) - x[i]) / d);
        if (d > 0.0 && std::isfinite(upper_of(prog, i))) s = std::min(s, 0.99 * (upper_of(prog, i) - x[i]) / d);
      }
      bool accepted = false;
      BarrierState next;
      while (s >= opts.min_step) {
        for (std::size_t i = 0; i < prog.dim; ++i) trial[i] = x[i] + s * step[static_cast<Eigen::Index>(i)];
        next = barrier.evaluate(trial, t, EvalNeeds::Value, nullptr, nullptr);
        // Strict increase is required: at large t the Armijo term can fall
        // below the resolution of φ.
        if (next.feasible && next.value > st.value && next.value - st.value >= opts.armijo * s * decrement) {
          accepted = true;
          break;
        }
        s *= opts.shrink;
      }
      if (!accepted) {
        // Roundoff floor: the model decrease is below what φ can resolve.
        if (centering_gap <= 1e-9 * std::max(1.0, std::abs(st.value))) break;
        return finish(SolverStatus::NumericFailure, "line search failed to make progress");
      }
      x.swap(trial);
      ++total;
      if (opts.on_iterate) opts.on_iterate({stage, it, t, next.value, next.objective, x});
    }
    if (unconstrained || (m + centering_gap) / t <= opts.tol) break;
    t *= opts.t_growth;
  }
  return finish(SolverStatus::Converged, {});
}

double objective_value(const ConcaveProgram& prog, std::span<const double> x) {
  TermEvaluator ev;
  double f = 0.0;
  for (const auto& term : prog.objective) {
    ev.run(term, x, EvalNeeds::Value);
    f += ev.result().value;
  }
  return f;
}

std::vector<double> objective_gradient(const ConcaveProgram& prog, std::span<const double> x) {
  TermEvaluator ev;
  std::vector<double> g(prog.dim, 0.0);
  for (const auto& term : prog.objective) {
    ev.run(term, x, EvalNeeds::Gradient);
    for (std::size_t a = 0; a < term.support.size(); ++a) g[term.support[a]] += ev.result().grad[a];
  }
  return g;
}

double constraint_value(const ConcaveProgram& prog, std::size_t i, std::span<const double> x) {
  TermEvaluator ev;
  ev.run(prog.constraints.at(i), x, EvalNeeds::Value);
  return ev.result().value;
}

std::vector<double> constraint_gradient(const ConcaveProgram& prog, std::size_t i, std::span<const double> x) {
  TermEvaluator ev;
  const auto& term = prog.constraints.at(i);
  ev.run(term, x, EvalNeeds::Gradient);
  std::vector<double> g(prog.dim, 0.0);
  for (std::size_t a = 0; a < term.support.size(); ++a) g[term.support[a]] += ev.result().grad[a];
  return g;
}

double max_constraint(const ConcaveProgram& prog, std::span<const double> x) {
  double worst = -kUnbounded;
  TermEvaluator ev;
  for (const auto& term : prog.constraints) {
    ev.run(term, x, EvalNeeds::Value);
    worst = std::max(worst, ev.result().value);
  }
  for (std::size_t i = 0; i < prog.dim; ++i) {
    worst = std::max(worst, lower_of(prog, i) - x[i]);
    worst = std::max(worst, x[i] - upper_of(prog, i));
  }
  return worst;
}

bool strictly_feasible(const ConcaveProgram& prog, std::span<const double> x) {
  if (x.size() != prog.dim) return false;
  for (std::size_t i = 0; i < prog.dim; ++i) {
    if (!std::isfinite(x[i])) return false;
    if (!(x[i] > lower_of(prog, i)) || !(x[i] < upper_of(prog, i))) return false;
  }
  TermEvaluator ev;
  for (const auto& term : prog.constraints) {
    ev.run(term, x, EvalNeeds::Value);
    if (!(ev.result().value < 0.0)) return false;
  }
  return true;
}

double midpoint_shape_violation(const ConcaveProgram& prog, std::span<const double> x, std::span<const double> y) {
  std::vector<double> mid(prog.dim);
  for (std::size_t i = 0; i < prog.dim; ++i) mid[i] = 0.5 * (x[i] + y[i]);
  // Concave f: f(mid) ≥ (f(x) + f(y)) / 2.
  double worst = 0.5 * (objective_value(prog, x) + objective_value(prog, y)) - objective_value(prog, mid);
  for (std::size_t i = 0; i < prog.constraints.size(); ++i) {
    // Convex c: c(mid) ≤ (c(x) + c(y)) / 2.
    worst = std::max(worst, constraint_value(prog, i, mid) -
                                0.5 * (constraint_value(prog, i, x) + constraint_value(prog, i, y)));
  }
  return worst;
}

}  // namespace secuav
