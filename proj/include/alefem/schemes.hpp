#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "alefem/ale.hpp"
#include "alefem/fem/assembly.hpp"
#include "alefem/fem/linear_algebra.hpp"
#include "alefem/fem/norms.hpp"
#include "alefem/fem/space.hpp"
#include "alefem/problems.hpp"

namespace alefem {

using fem::SparseMatrix;
using fem::Vector;

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// m*: motion terms use the exactly integrated flux (discrete SCL holds).
/// c*: classical comparators using the endpoint flux dt * C(dt) w(dt).
enum class Scheme { mIE, mCN, mBDF2, mBDF3, cIE, cCN, cBDF2 };

inline std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::mIE: return "mIE";
    case Scheme::mCN: return "mCN";
    case Scheme::mBDF2: return "mBDF2";
    case Scheme::mBDF3: return "mBDF3";
    case Scheme::cIE: return "cIE";
    case Scheme::cCN: return "cCN";
    case Scheme::cBDF2: return "cBDF2";
  }
  return "?";
}

inline Scheme parse_scheme(const std::string& s) {
  for (Scheme k : {Scheme::mIE, Scheme::mCN, Scheme::mBDF2, Scheme::mBDF3, Scheme::cIE, Scheme::cCN, Scheme::cBDF2})
    if (to_string(k) == s) return k;
  throw std::invalid_argument("unknown scheme '" + s + "'");
}

inline bool is_classical(Scheme s) { return s == Scheme::cIE || s == Scheme::cCN || s == Scheme::cBDF2; }

/// Number of solution levels the scheme reads (u_n, u_{n-1}, ...).
inline int history_depth(Scheme s) {
  switch (s) {
    case Scheme::mBDF2:
    case Scheme::cBDF2: return 2;
    case Scheme::mBDF3: return 3;
    default: return 1;
  }
}

/// How multistep schemes produce their missing history levels.
enum class Startup {
  implicit_euler,  ///< mBDF2: one IE step; mBDF3: one IE step, then one BDF2 step
  crank_nicolson   ///< the missing levels are produced by CN steps
};

/// Which solution the motion operators of past intervals multiply in BDF
/// schemes. `unknown` is the formulation as written (all act on u_{n+1}).
enum class PastMotionTarget { unknown, interval_end };

/// Geometry used by the Crank-Nicolson terms d(u_n) and b(f_n).
enum class CnGeometry {
  trapezoidal,  ///< start-of-interval geometry for the u_n / f_n terms (second order)
  interval_end  ///< interval-end geometry for both halves (first order on moving grids)
};

struct SchemeConfig {
  Scheme scheme = Scheme::mIE;
  double dt = 0.01;
  double final_time = 0.1;
  VelocityStrategy strategy = VelocityStrategy::piecewise_constant;
  int degree = 1;
  Startup startup = Startup::implicit_euler;
  PastMotionTarget past_motion = PastMotionTarget::unknown;
  CnGeometry cn_geometry = CnGeometry::trapezoidal;
  double solver_tolerance = 1e-10;

  std::size_t steps() const {
    validate();
    return static_cast<std::size_t>(std::llround(final_time / dt));
  }

  void validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("SchemeConfig: dt must be positive");
    if (!(final_time >= dt)) throw std::invalid_argument("SchemeConfig: final time must be >= dt");
    const double n = std::round(final_time / dt);
    if (std::fabs(n * dt - final_time) > 1e-12 * std::max(1.0, final_time))
      throw std::invalid_argument("SchemeConfig: final time is not an integer multiple of dt");
    if (degree != 1 && degree != 2) throw std::invalid_argument("SchemeConfig: degree must be 1 or 2");
  }
};

// ---------------------------------------------------------------------------
// Step systems
// ---------------------------------------------------------------------------

/// Operators of one interval [t_n, t_{n+1}].
struct StepOperators {
  SparseMatrix mass_end;  ///< int psi u J_{n+1}
  SparseMatrix stiffness; ///< d_{n,n+1}: geometry at the interval end, includes dt and alpha
  SparseMatrix motion;    ///< motion operator of the interval (exact or endpoint flux)
  Vector load_end;        ///< b_{n,n+1}(f_{n+1})
  Vector load_start;      ///< b_{n,n+1}(f_n) (CN only)
  Vector stiffness_start_applied; ///< d(u_n) (CN only)
};

/// A solution level: u_k and the mass-weighted vector q_k = M(J_k) u_k.
struct Level {
  Vector u;
  Vector mass_weighted;
};

struct LinearSystem {
  SparseMatrix lhs;
  Vector rhs;
};

/// Motion operator of a past interval with its BDF weight (as it appears on
/// the left-hand side). `applied_to == nullptr` means it multiplies u_{n+1}.
struct PastMotionTerm {
  const SparseMatrix* matrix;
  double weight;
  const Vector* applied_to = nullptr;
};

namespace detail {
inline void add_past_motion(LinearSystem& sys, std::initializer_list<PastMotionTerm> terms) {
  for (const PastMotionTerm& term : terms) {
    if (term.applied_to == nullptr)
      sys.lhs += term.weight * (*term.matrix);
    else
      sys.rhs -= term.weight * ((*term.matrix) * (*term.applied_to));
  }
}
}  // namespace detail

/// [M_{n+1} + A - Mot] u_{n+1} = q_n + b_{n+1}
inline LinearSystem implicit_euler_system(const StepOperators& ops, const Level& n) {
  return {ops.mass_end + ops.stiffness - ops.motion, n.mass_weighted + ops.load_end};
}

/// [M_{n+1} + A/2 - Mot/2] u_{n+1} = q_n - d(u_n) / 2 + Mot u_n / 2 + (b_n + b_{n+1}) / 2
inline LinearSystem crank_nicolson_system(const StepOperators& ops, const Level& n) {
  SparseMatrix lhs = ops.mass_end + 0.5 * ops.stiffness - 0.5 * ops.motion;
  Vector rhs = n.mass_weighted - 0.5 * ops.stiffness_start_applied + 0.5 * (ops.motion * n.u) +
               0.5 * (ops.load_start + ops.load_end);
  return {std::move(lhs), std::move(rhs)};
}

/// (3/2) M_{n+1} u - 2 q_n + (1/2) q_{n-1} + A u - b
///   - (3/2) Mot_{n,n+1} u + (1/2) Mot_{n-1,n} u = 0
inline LinearSystem bdf2_system(const StepOperators& ops, const Level& n, const Level& nm1,
                                const SparseMatrix& motion_nm1, PastMotionTarget target = PastMotionTarget::unknown) {
  LinearSystem sys{1.5 * ops.mass_end + ops.stiffness - 1.5 * ops.motion,
                   2.0 * n.mass_weighted - 0.5 * nm1.mass_weighted + ops.load_end};
  const bool at_end = target == PastMotionTarget::interval_end;
  detail::add_past_motion(sys, {{&motion_nm1, 0.5, at_end ? &n.u : nullptr}});
  return sys;
}

/// (11/6) M_{n+1} u - 3 q_n + (3/2) q_{n-1} - (1/3) q_{n-2} + A u - b
///   - (11/6) Mot_{n,n+1} u + (7/6) Mot_{n-1,n} u - (1/3) Mot_{n-2,n-1} u = 0
inline LinearSystem bdf3_system(const StepOperators& ops, const Level& n, const Level& nm1, const Level& nm2,
                                const SparseMatrix& motion_nm1, const SparseMatrix& motion_nm2,
                                PastMotionTarget target = PastMotionTarget::unknown) {
  LinearSystem sys{(11.0 / 6.0) * ops.mass_end + ops.stiffness - (11.0 / 6.0) * ops.motion,
                   3.0 * n.mass_weighted - 1.5 * nm1.mass_weighted + (1.0 / 3.0) * nm2.mass_weighted + ops.load_end};
  const bool at_end = target == PastMotionTarget::interval_end;
  detail::add_past_motion(sys, {{&motion_nm1, 7.0 / 6.0, at_end ? &n.u : nullptr},
                                {&motion_nm2, -1.0 / 3.0, at_end ? &nm1.u : nullptr}});
  return sys;
}

/// Classical BDF2: the grid-velocity terms are evaluated once, at t_{n+1},
/// as dt f(t_{n+1}, y_{n+1}) in the ODE form.
inline LinearSystem classical_bdf2_system(const StepOperators& ops, const Level& n, const Level& nm1) {
  return {1.5 * ops.mass_end + ops.stiffness - ops.motion,
          2.0 * n.mass_weighted - 0.5 * nm1.mass_weighted + ops.load_end};
}

// ---------------------------------------------------------------------------
// Stepper
// ---------------------------------------------------------------------------

class TanglingError : public std::runtime_error {
 public:
  TanglingError(std::size_t step, double jmin)
      : std::runtime_error("grid tangling in step " + std::to_string(step) + ": J(t) = " + std::to_string(jmin)),
        step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

class StepFailure : public std::runtime_error {
 public:
  StepFailure(std::size_t step, const std::string& what)
      : std::runtime_error("step " + std::to_string(step) + ": " + what), step_(step) {}
  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

struct StepRecord {
  std::size_t step = 0;
  double t = 0.0;
  double l2_norm = 0.0;
  double l2_error = std::numeric_limits<double>::quiet_NaN();
  double scl_residual = 0.0;  ///< max-norm of the weak SCL residual of the flux used
  double min_jacobian = 1.0;
  double max_abs_deviation = std::numeric_limits<double>::quiet_NaN();  ///< max |u - exact| over dofs
  Scheme scheme_used = Scheme::mIE;
};

struct RunRecord {
  SchemeConfig config;
  std::vector<StepRecord> steps;
  Vector final_solution;
};

/// Everything assembled for one step before boundary conditions.
struct PreparedStep {
  double t_end = 0.0;
  Scheme scheme_used = Scheme::mIE;
  StepOperators ops;
  LinearSystem system;
  DisplacementField displacement_end;
  GridVelocity velocity;
  std::vector<double> jacobian_end;
  double scl_residual = 0.0;
  double min_jacobian = 0.0;
};

/// Time stepper holding the solution, displacement and motion history.
class Stepper {
 public:
  Stepper(const fem::FeSpace& space, SchemeConfig config, Problem problem)
      : space_(space), config_(config), problem_(std::move(problem)), solver_(config.solver_tolerance) {
    config_.validate();
    if (config_.degree != space_.degree()) throw std::invalid_argument("Stepper: config degree differs from space degree");
    const Mesh& mesh = space_.mesh();
    displacement_ = sample_displacement(problem_.map, mesh, 0.0);
    jacobian_ = element_jacobians(mesh, displacement_);
    const auto pos = space_.displaced_dof_coords(displacement_);
    Level l0;
    l0.u = space_.interpolate_at(pos, [&](const Point& x) { return problem_.initial(x, 0.0); });
    l0.mass_weighted = fem::assemble_weighted_mass(space_, jacobian_) * l0.u;
    levels_.push_front(std::move(l0));
    record_.config = config_;
    record_.steps.push_back(make_record(0, 0.0, 0.0, 1.0));
  }

  const SchemeConfig& config() const { return config_; }
  std::size_t step_index() const { return step_; }
  double time() const { return static_cast<double>(step_) * config_.dt; }
  const Vector& solution() const { return levels_.front().u; }
  const std::deque<Level>& levels() const { return levels_; }
  const DisplacementField& displacement() const { return displacement_; }
  const std::vector<double>& jacobian() const { return jacobian_; }
  const RunRecord& record() const { return record_; }

  /// Scheme actually used for the next step, accounting for startup.
  Scheme effective_scheme() const {
    const int have = static_cast<int>(levels_.size());
    const Scheme s = config_.scheme;
    if (history_depth(s) <= have) return s;
    const bool cn = config_.startup == Startup::crank_nicolson;
    if (is_classical(s)) return cn ? Scheme::cCN : Scheme::cIE;
    if (cn) return Scheme::mCN;
    return have == 1 ? Scheme::mIE : Scheme::mBDF2;
  }

  /// Assemble the operators and the unconstrained system of the next step.
  PreparedStep prepare_step() const {
    const Mesh& mesh = space_.mesh();
    const double dt = config_.dt;
    PreparedStep p;
    p.t_end = static_cast<double>(step_ + 1) * dt;
    p.scheme_used = effective_scheme();
    p.displacement_end = sample_displacement(problem_.map, mesh, p.t_end);

    if (config_.strategy == VelocityStrategy::piecewise_constant) {
      p.velocity = velocity_piecewise_constant(displacement_, p.displacement_end, dt);
    } else {
      // First interval: start from the secant velocity, so it reduces to the
      // piecewise-constant interpolant.
      const std::vector<Vec2d> w0 =
          step_ == 0 ? velocity_piecewise_constant(displacement_, p.displacement_end, dt).start : velocity_end_;
      p.velocity = velocity_continuous(displacement_, p.displacement_end, w0, dt);
    }

    const IntervalGeometry geom = build_interval_geometry(mesh, displacement_, p.velocity);
    p.min_jacobian = min_sampled_jacobian(geom);
    if (!(p.min_jacobian > 0.0)) throw TanglingError(step_ + 1, p.min_jacobian);

    p.jacobian_end = element_jacobians(mesh, p.displacement_end);
    const auto cofactor_end = element_cofactors(mesh, p.displacement_end);
    const auto flux = is_classical(config_.scheme) ? endpoint_flux_field(mesh, geom) : integrated_flux_field(geom);
    p.scl_residual = max_abs(scl_residual(mesh, jacobian_, p.jacobian_end, flux));

    StepOperators& ops = p.ops;
    ops.mass_end = fem::assemble_weighted_mass(space_, p.jacobian_end);
    ops.stiffness = fem::assemble_pulled_back_stiffness(space_, problem_.alpha, dt, cofactor_end, p.jacobian_end);
    ops.motion = fem::assemble_mesh_motion_operator(space_, flux);
    ops.load_end = load(p.displacement_end, p.t_end, p.jacobian_end);
    const bool cn = p.scheme_used == Scheme::mCN || p.scheme_used == Scheme::cCN;
    if (cn) {
      const bool at_end = config_.cn_geometry == CnGeometry::interval_end;
      ops.load_start = load(displacement_, time(), at_end ? p.jacobian_end : jacobian_);
      ops.stiffness_start_applied =
          at_end ? Vector(ops.stiffness * levels_[0].u)
                 : Vector(fem::assemble_pulled_back_stiffness(space_, problem_.alpha, dt, element_cofactors(mesh, displacement_),
                                                              jacobian_) *
                          levels_[0].u);
    }

    const PastMotionTarget target = config_.past_motion;
    switch (p.scheme_used) {
      case Scheme::mIE:
      case Scheme::cIE: p.system = implicit_euler_system(ops, levels_[0]); break;
      case Scheme::mCN:
      case Scheme::cCN: p.system = crank_nicolson_system(ops, levels_[0]); break;
      case Scheme::mBDF2: p.system = bdf2_system(ops, levels_[0], levels_[1], motions_[0], target); break;
      case Scheme::mBDF3:
        p.system = bdf3_system(ops, levels_[0], levels_[1], levels_[2], motions_[0], motions_[1], target);
        break;
      case Scheme::cBDF2: p.system = classical_bdf2_system(ops, levels_[0], levels_[1]); break;
    }
    return p;
  }

  /// Advance one interval; returns the record of the new time level.
  const StepRecord& advance() {
    PreparedStep p = prepare_step();
    const auto pos = space_.displaced_dof_coords(p.displacement_end);
    const auto& bdofs = space_.boundary_dofs();
    std::vector<double> bvals(bdofs.size());
    for (std::size_t k = 0; k < bdofs.size(); ++k) bvals[k] = problem_.dirichlet(pos[bdofs[k]], p.t_end);
    fem::apply_dirichlet(p.system.lhs, p.system.rhs, bdofs, bvals);

    Level next;
    try {
      next.u = solver_.solve(p.system.lhs, p.system.rhs);
    } catch (const fem::SolverError& err) {
      throw StepFailure(step_ + 1, err.what());
    }
    next.mass_weighted = p.ops.mass_end * next.u;

    levels_.push_front(std::move(next));
    while (static_cast<int>(levels_.size()) > 3) levels_.pop_back();
    motions_.push_front(std::move(p.ops.motion));
    while (motions_.size() > 2) motions_.pop_back();

    displacement_ = std::move(p.displacement_end);
    jacobian_ = std::move(p.jacobian_end);
    velocity_end_ = p.velocity.end_values();
    ++step_;
    record_.steps.push_back(make_record(step_, p.t_end, p.scl_residual, p.min_jacobian));
    record_.steps.back().scheme_used = p.scheme_used;
    return record_.steps.back();
  }

  /// Advance until the configured scheme has its full history.
  void bootstrap() {
    while (static_cast<int>(levels_.size()) < history_depth(config_.scheme) && step_ < config_.steps()) advance();
  }

  RunRecord run() {
    const std::size_t n = config_.steps();
    while (step_ < n) advance();
    record_.final_solution = solution();
    return record_;
  }

 private:
  Vector load(const DisplacementField& disp, double t, const std::vector<double>& jac) const {
    if (!problem_.source) return Vector::Zero(static_cast<Eigen::Index>(space_.n_dofs()));
    const fem::PhysicalPlacement place{&space_.mesh(), &disp};
    return fem::assemble_load(space_, config_.dt, jac,
                              [&](const fem::QuadPoint& q) { return problem_.source(place(q), t); });
  }

  StepRecord make_record(std::size_t step, double t, double scl, double jmin) const {
    StepRecord r;
    r.step = step;
    r.t = t;
    r.scl_residual = scl;
    r.min_jacobian = jmin;
    r.scheme_used = config_.scheme;
    const Vector& u = levels_.front().u;
    r.l2_norm = fem::l2_norm_current_domain(space_, u, jacobian_);
    if (problem_.exact) {
      const fem::PhysicalPlacement place{&space_.mesh(), &displacement_};
      r.l2_error = fem::l2_error_vs_exact(space_, u, [&](const fem::QuadPoint& q) { return problem_.exact(place(q), t); },
                                          jacobian_);
      const auto pos = space_.displaced_dof_coords(displacement_);
      double dev = 0.0;
      for (std::size_t i = 0; i < space_.n_dofs(); ++i)
        dev = std::max(dev, std::fabs(u[static_cast<Eigen::Index>(i)] - problem_.exact(pos[i], t)));
      r.max_abs_deviation = dev;
    }
    return r;
  }

  const fem::FeSpace& space_;
  SchemeConfig config_;
  Problem problem_;
  fem::SparseSolver solver_;

  std::size_t step_ = 0;
  std::deque<Level> levels_;           // most recent first
  std::deque<SparseMatrix> motions_;   // motion operators of past intervals, most recent first
  DisplacementField displacement_;
  std::vector<double> jacobian_;
  std::vector<Vec2d> velocity_end_;
  RunRecord record_;
};

/// Run a full simulation on `space` from t = 0 to config.final_time.
inline RunRecord run_simulation(const fem::FeSpace& space, const SchemeConfig& config, const Problem& problem) {
  Stepper stepper(space, config, problem);
  return stepper.run();
}

}  // namespace alefem
