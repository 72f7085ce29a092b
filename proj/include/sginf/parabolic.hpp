#pragma once

// Finite-difference model of the coupled system
//
//   du/dt = Laplace(u) - (1 + |x|^2)^beta x . grad(u) + V(x) u,   u: R^d -> R^2,
//
// on the box [-L, L]^d with homogeneous Neumann boundaries, its implicit
// time stepping, and the measurement of operator-norm convergence of the
// discrete semigroup.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <json.hpp>

#include "sginf/field_expr.hpp"
#include "sginf/spectral.hpp"

namespace sginf::pde {

using SparseMatrix = Eigen::SparseMatrix<double>;

class Grid {
 public:
  /// Throws InputError unless d in {1,2}, 0 < h < L and 2L/h is integral.
  Grid(int d, double half_width, double spacing);

  int dim() const { return d_; }
  double half_width() const { return half_width_; }
  double spacing() const { return h_; }
  int per_axis() const { return per_axis_; }
  int points() const { return d_ == 1 ? per_axis_ : per_axis_ * per_axis_; }

  /// Coordinates of point `p` (row-major over axes, x fastest).
  std::vector<double> coords(int p) const;

 private:
  int d_;
  double half_width_;
  double h_;
  int per_axis_;
};

/// V(x) = v(x) [[-1,-1],[-2,-2]] + w(x) [[-1,-1],[-1,-1]] unless a custom
/// matrix field replaces it.
class PotentialSpec {
 public:
  using MatrixField = std::function<Eigen::Matrix2d(std::span<const double>)>;

  PotentialSpec(FieldExpr v, FieldExpr w, double beta);
  static PotentialSpec custom(MatrixField field, double beta);

  Eigen::Matrix2d at(std::span<const double> x) const;
  double beta() const { return beta_; }
  static constexpr int components = 2;

  /// Throws InputError if v or w is non-positive or non-finite on the grid.
  void validate_on(const Grid& grid) const;

 private:
  PotentialSpec(MatrixField field, double beta, bool custom);

  std::optional<FieldExpr> v_, w_;
  MatrixField field_;
  double beta_;
  bool custom_ = false;
};

/// Drift b(x) = -(1 + |x|^2)^beta x, component `axis`.
double drift(std::span<const double> x, double beta, int axis);

struct GridOperator {
  SparseMatrix matrix;  // (2M) x (2M), component-major: index = c * M + p
  int points = 0;
  int components = 2;
  double max_cell_peclet = 0.0;
  std::vector<std::string> warnings;

  int size() const { return static_cast<int>(matrix.rows()); }
};

/// Central differences for the Laplacian, first-order upwind drift (by the
/// sign of b_j(x)), Neumann ghost points by reflection, and V(x) added
/// pointwise as 2x2 blocks.
GridOperator assemble_operator(const Grid& grid, const PotentialSpec& pot);

struct DissipativityCheck {
  bool ok = false;
  double worst = 0.0;
};

/// worst = max over grid points of mu_inf(V(x)); ok iff worst <= 1e-12.
DissipativityCheck check_dissipativity(const PotentialSpec& pot, const Grid& grid);

struct LyapunovCheck {
  bool ok = false;
  double min_residual = 0.0;
};

/// Residual of lambda0 phi - Laplace(phi) - b . grad(phi) for phi = 1 + |x|^2,
/// i.e. lambda0 (1 + r^2) - 2d + 2 r^2 (1 + r^2)^beta, minimized over the grid.
LyapunovCheck check_lyapunov(const Grid& grid, double beta, double lambda0);

enum class Scheme { ImplicitEuler, CrankNicolson };

Scheme parse_scheme(const std::string& name);
const char* to_string(Scheme s);

class Propagator {
 public:
  /// Throws InputError for tau <= 0 and NumericalError if the implicit
  /// matrix cannot be factorized.
  Propagator(const GridOperator& op, double tau, Scheme scheme);

  int size() const { return n_; }
  double tau() const { return tau_; }
  Scheme scheme() const { return scheme_; }

  /// One step applied in place.
  void step(Eigen::Ref<Eigen::VectorXd> u) const;

  /// Applies `steps` steps to every column. Columns are independent solves
  /// and are distributed over OpenMP threads; the result does not depend on
  /// the thread count.
  RealMatrix advance(const RealMatrix& columns, long steps) const;
  /// Single-threaded reference for advance().
  RealMatrix advance_serial(const RealMatrix& columns, long steps) const;

  /// Number of steps that make up time t; throws InputError unless t/tau is
  /// a non-negative integer (to 1e-9 relative).
  long steps_for(double t) const;

  RealMatrix dense_snapshot(double t) const;
  RealMatrix dense_snapshot_serial(double t) const;

 private:
  int n_;
  double tau_;
  Scheme scheme_;
  SparseMatrix explicit_part_;  // I + tau/2 A for Crank-Nicolson
  Eigen::SparseLU<SparseMatrix> lu_;
};

/// Dense snapshots are limited to this many unknowns.
inline constexpr int kMaxDenseUnknowns = 4000;

struct ConvergenceRow {
  double t = 0.0;
  double diff_norm = 0.0;  // ||T_{t+probe} - T_t||_inf
  double op_norm = 0.0;    // ||T_t||_inf
  int rank = 0;            // numerical_rank(T_t, 1e-8)
};

struct ConvergenceSummary {
  std::vector<ConvergenceRow> rows;
  std::optional<double> t_star;
  /// Singular values of T_{t*} above both rank_tol * sigma_max and the
  /// geometric tail estimate 2 diff / (1 - q) of ||T_{t*} - T_inf||.
  std::optional<int> limit_rank;
  std::optional<double> idempotency_defect;  // ||T_{2t*} - T_{t*}||_inf
  double max_op_norm = 0.0;
};

struct MeasureOptions {
  double diff_threshold = 1e-6;
  double rank_tol = 1e-8;
  bool parallel = true;
};

/// Probes T_t at t = 0, probe, 2 probe, ... while t + probe <= t_max.
ConvergenceSummary measure_convergence(const Propagator& prop, double t_max, double probe,
                                       const MeasureOptions& opts = {});

/// The constant field (1, -1) on every grid point.
Eigen::VectorXd equilibrium_field(const GridOperator& op);

/// ||step(u) - u||_inf for the equilibrium field.
double equilibrium_step_defect(const Propagator& prop, const GridOperator& op);

struct Scenario {
  int d = 1;
  double half_width = 6.0;
  double spacing = 0.1;
  double beta = 1.0;
  std::string v = "0.5+1/(1+x^2)";
  std::string w = "0.3";
  double lambda0 = 2.0;
  double tau = 0.01;
  Scheme scheme = Scheme::ImplicitEuler;
  double t_max = 50.0;
  double probe = 0.5;

  /// Throws InputError naming the offending field.
  static Scenario from_json(const nlohmann::json& j);
};

struct ScenarioResult {
  DissipativityCheck dissipativity;
  LyapunovCheck lyapunov;
  double equilibrium_defect = 0.0;
  std::vector<std::string> warnings;
  int unknowns = 0;
  ConvergenceSummary convergence;
};

ScenarioResult run_scenario(const Scenario& sc, const MeasureOptions& opts = {});

}  // namespace sginf::pde
