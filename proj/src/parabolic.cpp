#include "sginf/parabolic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <omp.h>

#include "sginf/errors.hpp"

namespace sginf::pde {

Grid::Grid(int d, double half_width, double spacing) : d_(d), half_width_(half_width), h_(spacing) {
  if (d != 1 && d != 2) throw InputError("grid: d must be 1 or 2");
  if (!(half_width > 0.0) || !(spacing > 0.0)) throw InputError("grid: L and h must be positive");
  if (!(spacing < half_width)) throw InputError("grid: h must be smaller than L");
  const double cells = 2.0 * half_width / spacing;
  const double rounded = std::round(cells);
  if (std::abs(cells - rounded) > 1e-9 * std::max(1.0, cells)) {
    std::ostringstream os;
    os << "grid: 2L/h = " << cells << " is not an integer";
    throw InputError(os.str());
  }
  per_axis_ = static_cast<int>(rounded) + 1;
}

std::vector<double> Grid::coords(int p) const {
  std::vector<double> x(d_);
  int rest = p;
  for (int a = 0; a < d_; ++a) {
    const int i = rest % per_axis_;
    rest /= per_axis_;
    x[a] = -half_width_ + i * h_;
  }
  return x;
}

PotentialSpec::PotentialSpec(FieldExpr v, FieldExpr w, double beta) : v_(std::move(v)), w_(std::move(w)), beta_(beta) {
  if (!(beta > 0.0)) throw InputError("potential: beta must be > 0");
  field_ = [v = *v_, w = *w_](std::span<const double> x) {
    const double vx = v(x), wx = w(x);
    Eigen::Matrix2d m;
    // Same value on both entries of a row keeps (1, -1) an exact null vector.
    const double r1 = -vx - wx;
    const double r2 = -2.0 * vx - wx;
    m << r1, r1, r2, r2;
    return m;
  };
}

PotentialSpec::PotentialSpec(MatrixField field, double beta, bool custom)
    : field_(std::move(field)), beta_(beta), custom_(custom) {
  if (!(beta > 0.0)) throw InputError("potential: beta must be > 0");
}

PotentialSpec PotentialSpec::custom(MatrixField field, double beta) {
  return PotentialSpec(std::move(field), beta, true);
}

Eigen::Matrix2d PotentialSpec::at(std::span<const double> x) const { return field_(x); }

void PotentialSpec::validate_on(const Grid& grid) const {
  if (custom_) return;
  for (int p = 0; p < grid.points(); ++p) {
    const auto x = grid.coords(p);
    for (const auto* f : {&*v_, &*w_}) {
      const double val = (*f)(x);
      if (!std::isfinite(val) || val < 0.0) {
        std::ostringstream os;
        os << "potential field \"" << f->source() << "\" is " << val << " at x[0] = " << x[0]
           << "; expected a finite value >= 0";
        throw InputError(os.str());
      }
    }
  }
}

double drift(std::span<const double> x, double beta, int axis) {
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  return -std::pow(1.0 + r2, beta) * x[axis];
}

GridOperator assemble_operator(const Grid& grid, const PotentialSpec& pot) {
  const int m = grid.points();
  const int n_axis = grid.per_axis();
  const double h = grid.spacing();
  const double diff = 1.0 / (h * h);

  GridOperator op;
  op.points = m;
  op.components = PotentialSpec::components;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(m) * (2 + 6 * grid.dim()));

  auto stride = [&](int axis) { return axis == 0 ? 1 : n_axis; };

  for (int p = 0; p < m; ++p) {
    const auto x = grid.coords(p);
    std::vector<std::pair<int, double>> row;  // transport stencil, one component

    for (int a = 0; a < grid.dim(); ++a) {
      const int i = (p / stride(a)) % n_axis;
      // Neumann: the ghost node mirrors the first interior neighbour.
      const int left = i > 0 ? p - stride(a) : p + stride(a);
      const int right = i < n_axis - 1 ? p + stride(a) : p - stride(a);

      row.emplace_back(left, diff);
      row.emplace_back(right, diff);
      row.emplace_back(p, -2.0 * diff);

      const double b = drift(x, pot.beta(), a);
      op.max_cell_peclet = std::max(op.max_cell_peclet, std::abs(b) * h);
      if (b > 0.0) {
        row.emplace_back(right, b / h);
        row.emplace_back(p, -b / h);
      } else if (b < 0.0) {
        row.emplace_back(left, -b / h);
        row.emplace_back(p, b / h);
      }
    }

    for (int c = 0; c < op.components; ++c)
      for (const auto& [col, val] : row) trip.emplace_back(c * m + p, c * m + col, val);

    const Eigen::Matrix2d v = pot.at(x);
    for (int c = 0; c < 2; ++c)
      for (int k = 0; k < 2; ++k)
        if (v(c, k) != 0.0) trip.emplace_back(c * m + p, k * m + p, v(c, k));
  }

  op.matrix.resize(op.components * m, op.components * m);
  op.matrix.setFromTriplets(trip.begin(), trip.end());
  op.matrix.makeCompressed();

  if (op.max_cell_peclet > 1e3) {
    std::ostringstream os;
    os << "grid too coarse for the drift: max |b| h = " << op.max_cell_peclet
       << " exceeds the diffusion scale by more than 1e3";
    op.warnings.push_back(os.str());
  }
  return op;
}

DissipativityCheck check_dissipativity(const PotentialSpec& pot, const Grid& grid) {
  DissipativityCheck out;
  out.worst = -INFINITY;
  for (int p = 0; p < grid.points(); ++p) {
    const auto x = grid.coords(p);
    out.worst = std::max(out.worst, log_norm_inf(RealMatrix(pot.at(x))));
  }
  out.ok = out.worst <= 1e-12;
  return out;
}

LyapunovCheck check_lyapunov(const Grid& grid, double beta, double lambda0) {
  if (!(lambda0 > 0.0)) throw InputError("lyapunov: lambda0 must be > 0");
  LyapunovCheck out;
  out.min_residual = INFINITY;
  const double d = grid.dim();
  for (int p = 0; p < grid.points(); ++p) {
    const auto x = grid.coords(p);
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    const double residual = lambda0 * (1.0 + r2) - 2.0 * d + 2.0 * r2 * std::pow(1.0 + r2, beta);
    out.min_residual = std::min(out.min_residual, residual);
  }
  out.ok = out.min_residual >= 0.0;
  return out;
}

Scheme parse_scheme(const std::string& name) {
  if (name == "implicit_euler") return Scheme::ImplicitEuler;
  if (name == "crank_nicolson") return Scheme::CrankNicolson;
  throw InputError("scheme must be \"implicit_euler\" or \"crank_nicolson\", got \"" + name + "\"");
}

const char* to_string(Scheme s) {
  return s == Scheme::ImplicitEuler ? "implicit_euler" : "crank_nicolson";
}

Propagator::Propagator(const GridOperator& op, double tau, Scheme scheme)
    : n_(op.size()), tau_(tau), scheme_(scheme) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InputError("propagator: tau must be > 0");
  SparseMatrix id(n_, n_);
  id.setIdentity();
  const double theta = scheme == Scheme::ImplicitEuler ? 1.0 : 0.5;
  SparseMatrix implicit_part = id - (theta * tau) * op.matrix;
  if (scheme == Scheme::CrankNicolson) explicit_part_ = id + (0.5 * tau) * op.matrix;
  lu_.analyzePattern(implicit_part);
  lu_.factorize(implicit_part);
  if (lu_.info() != Eigen::Success) {
    throw NumericalError("propagator: implicit matrix is singular for this step size", tau);
  }
}

void Propagator::step(Eigen::Ref<Eigen::VectorXd> u) const {
  if (scheme_ == Scheme::CrankNicolson) {
    Eigen::VectorXd rhs = explicit_part_ * u;
    u = lu_.solve(rhs);
  } else {
    Eigen::VectorXd rhs = u;
    u = lu_.solve(rhs);
  }
}

RealMatrix Propagator::advance_serial(const RealMatrix& columns, long steps) const {
  RealMatrix out = columns;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    Eigen::VectorXd u = out.col(j);
    for (long s = 0; s < steps; ++s) step(u);
    out.col(j) = u;
  }
  return out;
}

RealMatrix Propagator::advance(const RealMatrix& columns, long steps) const {
  RealMatrix out = columns;
  const auto cols = static_cast<long>(out.cols());
#pragma omp parallel for schedule(dynamic, 4)
  for (long j = 0; j < cols; ++j) {
    Eigen::VectorXd u = out.col(j);
    for (long s = 0; s < steps; ++s) step(u);
    out.col(j) = u;
  }
  return out;
}

long Propagator::steps_for(double t) const {
  if (!(t >= 0.0)) throw InputError("snapshot time must be >= 0");
  const double k = t / tau_;
  const double rounded = std::round(k);
  if (std::abs(k - rounded) > 1e-9 * std::max(1.0, k)) {
    std::ostringstream os;
    os << "time " << t << " is not a multiple of tau = " << tau_;
    throw InputError(os.str());
  }
  return static_cast<long>(rounded);
}

RealMatrix Propagator::dense_snapshot(double t) const {
  if (n_ > kMaxDenseUnknowns) throw InputError("dense snapshot exceeds the 4000-unknown memory guard");
  return advance(RealMatrix::Identity(n_, n_), steps_for(t));
}

RealMatrix Propagator::dense_snapshot_serial(double t) const {
  if (n_ > kMaxDenseUnknowns) throw InputError("dense snapshot exceeds the 4000-unknown memory guard");
  return advance_serial(RealMatrix::Identity(n_, n_), steps_for(t));
}

namespace {

double inf_norm(const RealMatrix& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

}  // namespace

ConvergenceSummary measure_convergence(const Propagator& prop, double t_max, double probe,
                                       const MeasureOptions& opts) {
  if (!(probe > 0.0) || !(t_max >= 2.0 * probe)) {
    throw InputError("measure_convergence: need t_max >= 2 * probe > 0");
  }
  const int n = prop.size();
  if (n > kMaxDenseUnknowns) {
    std::ostringstream os;
    os << "measure_convergence: " << n << " unknowns exceed the dense-snapshot guard of " << kMaxDenseUnknowns;
    throw InputError(os.str());
  }
  const long k = prop.steps_for(probe);
  auto advance = [&](const RealMatrix& m) { return opts.parallel ? prop.advance(m, k) : prop.advance_serial(m, k); };

  ConvergenceSummary out;
  RealMatrix current = RealMatrix::Identity(n, n);
  RealMatrix at_star;
  const long probes = static_cast<long>(std::floor(t_max / probe + 1e-9));
  for (long i = 0; i + 1 <= probes; ++i) {
    const double t = static_cast<double>(i) * probe;
    RealMatrix next = advance(current);
    ConvergenceRow row;
    row.t = t;
    row.diff_norm = inf_norm(next - current);
    row.op_norm = inf_norm(current);
    row.rank = numerical_rank(current.cast<Complex>(), opts.rank_tol);
    out.max_op_norm = std::max(out.max_op_norm, row.op_norm);
    if (!out.t_star && row.diff_norm < opts.diff_threshold) {
      out.t_star = t;
      // Singular values below the estimated distance to the limit cannot be
      // told apart from zero; the tail is bounded geometrically from the
      // last two differences, doubled for safety.
      double tail = row.diff_norm;
      if (!out.rows.empty() && out.rows.back().diff_norm > 0.0) {
        const double q = std::min(row.diff_norm / out.rows.back().diff_norm, 0.99);
        tail = row.diff_norm / (1.0 - q);
      }
      const Eigen::VectorXd sv = Eigen::BDCSVD<RealMatrix>(current).singularValues();
      const double cut = std::max(opts.rank_tol * (sv.size() ? sv(0) : 0.0), 2.0 * tail);
      out.limit_rank = static_cast<int>((sv.array() > cut).count());
      at_star = current;
    }
    out.rows.push_back(row);
    current = std::move(next);
  }
  if (out.t_star) out.idempotency_defect = inf_norm(at_star * at_star - at_star);
  return out;
}

Eigen::VectorXd equilibrium_field(const GridOperator& op) {
  Eigen::VectorXd u(op.size());
  u.head(op.points).setOnes();
  u.tail(op.points).setConstant(-1.0);
  return u;
}

double equilibrium_step_defect(const Propagator& prop, const GridOperator& op) {
  const Eigen::VectorXd u0 = equilibrium_field(op);
  Eigen::VectorXd u = u0;
  prop.step(u);
  return (u - u0).cwiseAbs().maxCoeff();
}

namespace {

double number_field(const nlohmann::json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j[key].is_number()) throw InputError(std::string("scenario field \"") + key + "\": expected a number");
  return j[key].get<double>();
}

std::string expr_field(const nlohmann::json& j, const char* key, const std::string& fallback) {
  if (!j.contains(key)) return fallback;
  if (j[key].is_number()) {
    std::ostringstream os;
    os.precision(17);
    os << j[key].get<double>();
    return os.str();
  }
  if (!j[key].is_string()) throw InputError(std::string("scenario field \"") + key + "\": expected an expression");
  return j[key].get<std::string>();
}

}  // namespace

Scenario Scenario::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("scenario: expected a JSON object");
  Scenario sc;
  if (j.contains("d")) {
    if (!j["d"].is_number_integer()) throw InputError("scenario field \"d\": expected 1 or 2");
    sc.d = j["d"].get<int>();
  }
  sc.half_width = number_field(j, "L", sc.half_width);
  sc.spacing = number_field(j, "h", sc.spacing);
  sc.beta = number_field(j, "beta", sc.beta);
  sc.v = expr_field(j, "v", sc.v);
  sc.w = expr_field(j, "w", sc.w);
  sc.lambda0 = number_field(j, "lambda0", sc.lambda0);
  sc.tau = number_field(j, "tau", sc.tau);
  if (j.contains("scheme")) {
    if (!j["scheme"].is_string()) throw InputError("scenario field \"scheme\": expected a string");
    sc.scheme = parse_scheme(j["scheme"].get<std::string>());
  }
  sc.t_max = number_field(j, "t_max", sc.t_max);
  sc.probe = number_field(j, "probe", sc.probe);
  // Parse the expressions eagerly so syntax errors surface as input errors.
  FieldExpr::parse(sc.v);
  FieldExpr::parse(sc.w);
  return sc;
}

ScenarioResult run_scenario(const Scenario& sc, const MeasureOptions& opts) {
  const Grid grid(sc.d, sc.half_width, sc.spacing);
  const PotentialSpec pot(FieldExpr::parse(sc.v), FieldExpr::parse(sc.w), sc.beta);
  pot.validate_on(grid);

  ScenarioResult out;
  out.dissipativity = check_dissipativity(pot, grid);
  out.lyapunov = check_lyapunov(grid, sc.beta, sc.lambda0);
  const GridOperator op = assemble_operator(grid, pot);
  out.warnings = op.warnings;
  out.unknowns = op.size();
  const Propagator prop(op, sc.tau, sc.scheme);
  out.equilibrium_defect = equilibrium_step_defect(prop, op);
  out.convergence = measure_convergence(prop, sc.t_max, sc.probe, opts);
  return out;
}

}  // namespace sginf::pde
