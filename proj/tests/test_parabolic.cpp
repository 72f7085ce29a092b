#include <gtest/gtest.h>

#include <cmath>

#include "sginf/errors.hpp"
#include "sginf/parabolic.hpp"

using namespace sginf;
using namespace sginf::pde;

namespace {

PotentialSpec example_potential(double beta = 1.0) {
  return PotentialSpec(FieldExpr::parse("0.5+1/(1+x^2)"), FieldExpr::parse("0.3"), beta);
}

PotentialSpec zero_potential() { return PotentialSpec(FieldExpr::constant(0), FieldExpr::constant(0), 1.0); }

GridOperator scalar_operator(double a) {
  GridOperator op;
  op.matrix.resize(1, 1);
  op.matrix.insert(0, 0) = a;
  op.points = 1;
  op.components = 1;
  return op;
}

GridOperator zero_operator(int n) {
  GridOperator op;
  op.matrix.resize(n, n);
  op.points = n;
  op.components = 1;
  return op;
}

double inf_norm(const RealMatrix& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

}  // namespace

TEST(Grid, Validation) {
  const Grid g(1, 6.0, 0.1);
  EXPECT_EQ(g.per_axis(), 121);
  EXPECT_EQ(g.points(), 121);
  EXPECT_DOUBLE_EQ(g.coords(0)[0], -6.0);
  EXPECT_NEAR(g.coords(120)[0], 6.0, 1e-12);
  const Grid g2(2, 1.0, 0.5);
  EXPECT_EQ(g2.points(), 25);
  EXPECT_DOUBLE_EQ(g2.coords(7)[0], 0.0);
  EXPECT_DOUBLE_EQ(g2.coords(7)[1], -0.5);
  EXPECT_THROW(Grid(3, 1.0, 0.1), InputError);
  EXPECT_THROW(Grid(1, 1.0, 0.3), InputError);
  EXPECT_THROW(Grid(1, 1.0, 0.0), InputError);
}

TEST(Potential, NullVectorAndValidation) {
  const auto pot = example_potential();
  for (double x : {-6.0, -1.0, 0.0, 2.5}) {
    const double pt[] = {x};
    const Eigen::Matrix2d v = pot.at(pt);
    EXPECT_EQ((v * Eigen::Vector2d(1, -1)).cwiseAbs().maxCoeff(), 0.0);
  }
  const PotentialSpec negative(FieldExpr::parse("x"), FieldExpr::constant(0.3), 1.0);
  EXPECT_THROW(negative.validate_on(Grid(1, 1.0, 0.5)), InputError);
  EXPECT_THROW(PotentialSpec(FieldExpr::constant(1), FieldExpr::constant(1), 0.0), InputError);
}

TEST(Drift, PointsInward) {
  const double x[] = {2.0};
  EXPECT_DOUBLE_EQ(drift(x, 1.0, 0), -(1 + 4.0) * 2.0);
  const double y[] = {1.0, -1.0};
  EXPECT_DOUBLE_EQ(drift(y, 0.5, 1), std::sqrt(3.0));
}

TEST(AssembleOperator, ConstantsAreAnnihilatedWithoutPotential) {
  const Grid g(1, 2.0, 0.25);
  const auto op = assemble_operator(g, zero_potential());
  EXPECT_EQ(op.size(), 2 * g.points());
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(op.size());
  EXPECT_LT((op.matrix * ones).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(AssembleOperator, EquilibriumIsInTheKernel) {
  for (int d : {1, 2}) {
    const Grid g(d, 2.0, 0.25);
    const auto op = assemble_operator(g, example_potential());
    EXPECT_LT((op.matrix * equilibrium_field(op)).cwiseAbs().maxCoeff(), 1e-12) << "d = " << d;
  }
}

TEST(AssembleOperator, CoarseGridWarns) {
  const auto op = assemble_operator(Grid(1, 30.0, 1.0), PotentialSpec(FieldExpr::constant(1),
                                                                        FieldExpr::constant(1), 2.0));
  EXPECT_FALSE(op.warnings.empty());
  EXPECT_GT(op.max_cell_peclet, 1e3);
}

TEST(Dissipativity, Examples) {
  const Grid g(1, 6.0, 0.1);
  const auto ex = check_dissipativity(example_potential(), g);
  EXPECT_TRUE(ex.ok);
  EXPECT_LE(std::abs(ex.worst), 1e-12);
  const auto id = check_dissipativity(PotentialSpec::custom([](auto) { return Eigen::Matrix2d::Identity(); }, 1.0), g);
  EXPECT_FALSE(id.ok);
  EXPECT_DOUBLE_EQ(id.worst, 1.0);
  const auto zero = check_dissipativity(zero_potential(), g);
  EXPECT_TRUE(zero.ok);
  EXPECT_EQ(zero.worst, 0.0);
}

TEST(Lyapunov, Examples) {
  const auto one = check_lyapunov(Grid(1, 6.0, 0.1), 1.0, 2.0);
  EXPECT_TRUE(one.ok);
  EXPECT_NEAR(one.min_residual, 0.0, 1e-12);
  const auto two = check_lyapunov(Grid(2, 2.0, 0.5), 1.0, 4.0);
  EXPECT_TRUE(two.ok);
  EXPECT_NEAR(two.min_residual, 0.0, 1e-12);
  const auto bad = check_lyapunov(Grid(2, 2.0, 0.5), 1.0, 1.0);
  EXPECT_FALSE(bad.ok);
  EXPECT_NEAR(bad.min_residual, -3.0, 1e-12);
}

TEST(Propagator, ZeroOperatorIsIdentity) {
  const Propagator p(zero_operator(4), 0.1, Scheme::ImplicitEuler);
  EXPECT_EQ(p.dense_snapshot(1.0), RealMatrix::Identity(4, 4));
  const Propagator cn(zero_operator(4), 0.1, Scheme::CrankNicolson);
  EXPECT_EQ(cn.dense_snapshot(1.0), RealMatrix::Identity(4, 4));
}

TEST(Propagator, ScalarDecay) {
  const Propagator p(scalar_operator(-1.0), 1.0, Scheme::ImplicitEuler);
  for (int k = 0; k < 6; ++k) EXPECT_DOUBLE_EQ(p.dense_snapshot(k)(0, 0), std::pow(2.0, -k));
  const Propagator cn(scalar_operator(-1.0), 1.0, Scheme::CrankNicolson);
  EXPECT_DOUBLE_EQ(cn.dense_snapshot(2)(0, 0), 1.0 / 9.0);
}

TEST(Propagator, Errors) {
  EXPECT_THROW(Propagator(scalar_operator(-1.0), 0.0, Scheme::ImplicitEuler), InputError);
  // I - tau * A is singular for A = 1, tau = 1.
  EXPECT_THROW(Propagator(scalar_operator(1.0), 1.0, Scheme::ImplicitEuler), NumericalError);
  const Propagator p(scalar_operator(-1.0), 0.3, Scheme::ImplicitEuler);
  EXPECT_THROW(p.steps_for(0.5), InputError);
  EXPECT_EQ(p.steps_for(0.9), 3);
}

TEST(Propagator, ParallelSnapshotIsBitwiseSerial) {
  const Grid g(1, 3.0, 0.1);
  const auto op = assemble_operator(g, example_potential());
  const Propagator p(op, 0.01, Scheme::ImplicitEuler);
  const RealMatrix a = p.dense_snapshot(0.5);
  const RealMatrix b = p.dense_snapshot_serial(0.5);
  EXPECT_EQ(a, b);
}

TEST(Propagator, SemigroupConsistencyAndContractivity) {
  const Grid g(1, 3.0, 0.1);
  const auto op = assemble_operator(g, example_potential());
  for (Scheme s : {Scheme::ImplicitEuler, Scheme::CrankNicolson}) {
    const Propagator p(op, 0.01, s);
    const RealMatrix t1 = p.dense_snapshot(0.3);
    const RealMatrix t2 = p.dense_snapshot(0.6);
    EXPECT_LE(inf_norm(t2 - t1 * t1), 1e-10);
  }
  const Propagator ie(op, 0.01, Scheme::ImplicitEuler);
  EXPECT_LE(inf_norm(ie.dense_snapshot(0.01)), 1.0 + 10 * 0.1);
  EXPECT_LE(equilibrium_step_defect(ie, op), 1e-12);
}

TEST(MeasureConvergence, ZeroOperator) {
  const Propagator p(zero_operator(3), 0.5, Scheme::ImplicitEuler);
  const auto s = measure_convergence(p, 2.0, 0.5);
  ASSERT_FALSE(s.rows.empty());
  for (const auto& r : s.rows) EXPECT_EQ(r.diff_norm, 0.0);
  ASSERT_TRUE(s.t_star.has_value());
  EXPECT_EQ(*s.t_star, 0.0);
  EXPECT_EQ(s.limit_rank, 3);
}

TEST(MeasureConvergence, ScalarDecayHasRankZeroLimit) {
  const Propagator p(scalar_operator(-1.0), 0.5, Scheme::ImplicitEuler);
  const auto s = measure_convergence(p, 40.0, 1.0);
  for (std::size_t i = 1; i < s.rows.size(); ++i) {
    EXPECT_NEAR(s.rows[i].diff_norm / s.rows[i - 1].diff_norm, 1.0 / 2.25, 1e-12);
  }
  ASSERT_TRUE(s.t_star.has_value());
  EXPECT_EQ(s.limit_rank, 0);
}

TEST(MeasureConvergence, SizeGuard) {
  const Grid g(2, 3.0, 0.1);  // 61^2 points, two components
  const auto op = assemble_operator(g, example_potential());
  const Propagator p(op, 0.01, Scheme::ImplicitEuler);
  EXPECT_THROW(measure_convergence(p, 1.0, 0.5), InputError);
  EXPECT_THROW(p.dense_snapshot(0.01), InputError);
}

TEST(Scenario, FromJsonDefaultsAndErrors) {
  const auto sc = Scenario::from_json(nlohmann::json::parse(R"({"h": 0.2, "scheme": "crank_nicolson"})"));
  EXPECT_EQ(sc.d, 1);
  EXPECT_DOUBLE_EQ(sc.spacing, 0.2);
  EXPECT_EQ(sc.scheme, Scheme::CrankNicolson);
  EXPECT_THROW(Scenario::from_json(nlohmann::json::parse(R"({"h": "x"})")), InputError);
  EXPECT_THROW(Scenario::from_json(nlohmann::json::parse(R"({"scheme": "rk4"})")), InputError);
  EXPECT_THROW(Scenario::from_json(nlohmann::json::parse(R"({"d": 1.5})")), InputError);
  EXPECT_THROW(Scenario::from_json(nlohmann::json::parse(R"j({"v": "sin(x)"})j")), InputError);
}

TEST(Scenario, SmallRunConverges) {
  Scenario sc;
  sc.half_width = 3.0;
  sc.spacing = 0.2;
  sc.tau = 0.02;
  sc.t_max = 20.0;
  const auto res = run_scenario(sc);
  EXPECT_TRUE(res.dissipativity.ok);
  EXPECT_TRUE(res.lyapunov.ok);
  EXPECT_LE(res.equilibrium_defect, 1e-12);
  ASSERT_TRUE(res.convergence.t_star.has_value());
  EXPECT_GE(*res.convergence.limit_rank, 1);
  EXPECT_LE(res.convergence.max_op_norm, 1.0 + 10 * sc.spacing);
}

TEST(Scenario, DoublingTheBoxBarelyMovesTheLimit) {
  Scenario a;
  a.half_width = 3.0;
  a.spacing = 0.2;
  a.tau = 0.02;
  a.t_max = 30.0;
  Scenario b = a;
  b.half_width = 6.0;
  const auto ra = run_scenario(a);
  const auto rb = run_scenario(b);
  ASSERT_TRUE(ra.convergence.t_star && rb.convergence.t_star);
  EXPECT_EQ(ra.convergence.limit_rank, rb.convergence.limit_rank);
  EXPECT_LE(std::abs(*ra.convergence.t_star - *rb.convergence.t_star), 0.05 * *ra.convergence.t_star);
}
