#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "sginf/errors.hpp"
#include "sginf/infinity.hpp"
#include "test_util.hpp"

using namespace sginf;
using testutil::eye;
using testutil::max_abs;
using testutil::real_matrix;

namespace {

ComplexMatrix diag(std::vector<Complex> d) {
  ComplexMatrix m = ComplexMatrix::Zero(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

bool has_tag(const ConvergenceReport& r, const std::string& tag) {
  for (const auto& x : r.reasons)
    if (x.tag == tag) return true;
  return false;
}

const ComplexMatrix kSwap = real_matrix({{0, 1}, {1, 0}});

// T = S diag(d) S^{-1} with a well-conditioned random S.
struct Planted {
  ComplexMatrix t;
  ComplexMatrix s;
  ComplexMatrix s_inv;
};

Planted plant(std::mt19937_64& gen, const std::vector<Complex>& d) {
  const int n = static_cast<int>(d.size());
  ComplexMatrix s = eye(n) + 0.3 * testutil::random_complex(gen, n) / std::sqrt(static_cast<double>(n));
  const ComplexMatrix s_inv = s.inverse();
  return {s * diag(d) * s_inv, s, s_inv};
}

}  // namespace

TEST(InfinityDecomposition, SwapMatrix) {
  const auto dec = infinity_decomposition(SemigroupSpec::discrete(kSwap));
  EXPECT_TRUE(dec.bounded);
  EXPECT_TRUE(dec.exists_compact);
  EXPECT_LT(max_abs(dec.p_inf - eye(2)), 1e-12);
  ASSERT_EQ(dec.peripheral.eigenvalues.size(), 2u);
  std::vector<double> re;
  for (auto z : dec.peripheral.eigenvalues) re.push_back(z.real());
  std::sort(re.begin(), re.end());
  EXPECT_NEAR(re[0], -1.0, 1e-12);
  EXPECT_NEAR(re[1], 1.0, 1e-12);
  EXPECT_EQ(dec.stable_spectral_radius, 0.0);
  EXPECT_EQ(dec.group.kind, GroupKind::FiniteCyclic);
  EXPECT_EQ(dec.group.order, 2);
  EXPECT_EQ(dec.e_inf_basis.cols(), 2);
}

TEST(InfinityDecomposition, StrictContraction) {
  const auto dec = infinity_decomposition(SemigroupSpec::discrete(diag({0.5, 1.0 / 3.0})));
  EXPECT_TRUE(dec.exists_compact);
  EXPECT_EQ(max_abs(dec.p_inf), 0.0);
  EXPECT_NEAR(dec.stable_spectral_radius, 0.5, 1e-15);
  EXPECT_EQ(dec.group.kind, GroupKind::Trivial);
  EXPECT_TRUE(dec.peripheral.eigenvalues.empty());
}

TEST(InfinityDecomposition, ContinuousDiagonal) {
  const auto dec = infinity_decomposition(SemigroupSpec::continuous(diag({-1.0, 0.0})));
  EXPECT_LT(max_abs(dec.p_inf - diag({0.0, 1.0})), 1e-14);
  ASSERT_EQ(dec.peripheral.eigenvalues.size(), 1u);
  EXPECT_NEAR(std::abs(dec.peripheral.eigenvalues[0] - 1.0), 0.0, 1e-14);
  EXPECT_EQ(dec.group.kind, GroupKind::Trivial);
  EXPECT_NEAR(dec.stable_spectral_radius, std::exp(-1.0), 1e-15);
}

TEST(InfinityDecomposition, UnboundedHasNoCompactSemigroup) {
  const auto dec = infinity_decomposition(SemigroupSpec::discrete(real_matrix({{1, 1}, {0, 1}})));
  EXPECT_FALSE(dec.bounded);
  EXPECT_FALSE(dec.exists_compact);
  EXPECT_NE(dec.diagnostic.find("not power-bounded"), std::string::npos);
  const auto rep = converges(SemigroupSpec::discrete(2.0 * eye(2)));
  EXPECT_FALSE(rep.converges());
  EXPECT_NE(rep.decomposition.diagnostic.find("not power-bounded"), std::string::npos);
}

TEST(InfinityDecompositionProperty, SplittingAndKernel) {
  std::mt19937_64 gen(31);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 3 + trial % 5;
    std::vector<Complex> d;
    for (int i = 0; i < n; ++i) {
      const double ang = 2 * M_PI * ud(gen);
      d.push_back(i < 1 + trial % 2 ? std::polar(1.0, ang) : std::polar(0.8 * ud(gen), ang));
    }
    const auto pl = plant(gen, d);
    const auto sg = SemigroupSpec::discrete(pl.t);
    const auto dec = infinity_decomposition(sg);
    ASSERT_TRUE(dec.exists_compact);
    const ComplexMatrix q = eye(n) - dec.p_inf;
    double prev = INFINITY;
    for (int s : {1, 5, 40, 200, 1000}) {
      const ComplexMatrix ts = sample(sg, s);
      EXPECT_LE(norm2(ts * dec.p_inf - dec.p_inf * ts), 1e-8);
      const double tail = norm2(ts * q);
      if (s >= 200) {
        EXPECT_LT(tail, prev + 1e-12);
      }
      prev = tail;
    }
    EXPECT_LT(prev, 1e-8);
    // Kernel: x with P x = 0 decays; x in E_inf does not.
    const ComplexVector x = q * testutil::random_complex(gen, n).col(0);
    EXPECT_LT((sample(sg, 1000) * x).norm(), 1e-8 * (1 + x.norm()));
    const ComplexVector y = dec.p_inf * testutil::random_complex(gen, n).col(0);
    double inf_norm = INFINITY;
    for (int s : {1, 10, 100, 1000}) inf_norm = std::min(inf_norm, (sample(sg, s) * y).norm());
    EXPECT_GT(inf_norm, 1e-3 * y.norm());
  }
}

TEST(Converges, SwapDoesNotConvergeInDiscreteTime) {
  const auto rep = converges(SemigroupSpec::discrete(kSwap));
  EXPECT_FALSE(rep.converges());
  EXPECT_FALSE(rep.limit.has_value());
  EXPECT_TRUE(has_tag(rep, "discrete-time-obstruction"));
  EXPECT_FALSE(rep.divisibility_gate);
}

TEST(Converges, ContinuousDiagonalConverges) {
  const auto rep = converges(SemigroupSpec::continuous(diag({-1.0, 0.0})));
  ASSERT_TRUE(rep.converges());
  EXPECT_LT(max_abs(*rep.limit - diag({0.0, 1.0})), 1e-14);
  EXPECT_EQ(rep.limit_rank, 1);
  EXPECT_TRUE(rep.divisibility_gate);
}

TEST(Converges, IdempotentIsItsOwnLimit) {
  const ComplexMatrix t = 0.5 * real_matrix({{1, 1}, {1, 1}});
  const auto rep = converges(SemigroupSpec::discrete(t));
  ASSERT_TRUE(rep.converges());
  EXPECT_LT(max_abs(*rep.limit - t), 1e-12);
  EXPECT_LT(max_abs(matrix_power(t, 1000) - t), 1e-12);
  EXPECT_EQ(rep.limit_rank, 1);
}

TEST(ConvergesProperty, MatchesBruteForcePowers) {
  std::mt19937_64 gen(32);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  int agree = 0, total = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 2 + trial % 6;
    std::vector<Complex> d;
    for (int i = 0; i < n; ++i) {
      Complex z;
      switch ((trial + i) % 4) {
        case 0: z = 1.0; break;
        case 1: z = std::polar(1.0, 0.2 + 5.8 * ud(gen)); break;  // margin >= 0.05 from 1
        default: z = std::polar(0.9 * ud(gen), 2 * M_PI * ud(gen));
      }
      d.push_back(z);
    }
    const auto pl = plant(gen, d);
    const auto rep = converges(SemigroupSpec::discrete(pl.t));
    const ComplexMatrix tn = matrix_power(pl.t, 10000);
    const bool oracle = induced_norm(pl.t * tn - tn, NormP::Inf) <= 1e-6;
    ++total;
    if (oracle == rep.converges()) ++agree;
    EXPECT_EQ(oracle, rep.converges()) << "trial " << trial;
  }
  EXPECT_EQ(agree, total);
}

TEST(AbelProbe, FirstOrderPoleAtMinusOne) {
  const auto res = abel_pole_probe(kSwap, -1.0);
  EXPECT_EQ(res.classification, PoleClass::FirstOrderPole);
  ASSERT_TRUE(res.projection.has_value());
  EXPECT_LT(norm2(*res.projection - 0.5 * real_matrix({{1, -1}, {-1, 1}})), 1e-8);
  const auto dec = eig_decompose(kSwap);
  const auto* item = dec.nearest(-1.0);
  EXPECT_LT(norm2(*res.projection - item->projection), 1e-8);
  EXPECT_EQ(res.schedule.size(), 16u);
}

TEST(AbelProbe, ResolventPointAndHigherOrderPole) {
  EXPECT_EQ(abel_pole_probe(0.5 * eye(2), 1.0).classification, PoleClass::ResolventPoint);
  EXPECT_FALSE(abel_pole_probe(0.5 * eye(2), 1.0).projection.has_value());
  EXPECT_EQ(abel_pole_probe(real_matrix({{1, 1}, {0, 1}}), 1.0).classification, PoleClass::HigherOrderPole);
}

TEST(AbelProbe, Preconditions) {
  EXPECT_THROW(abel_pole_probe(eye(2), 0.5), PreconditionError);
  EXPECT_THROW(abel_pole_probe(eye(2), 1.0, 2), PreconditionError);
}

TEST(AbelProbeProperty, AgreesWithPlantedProjection) {
  std::mt19937_64 gen(33);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Complex lambda = std::polar(1.0, 2 * M_PI * ud(gen));
    std::vector<Complex> d{lambda};
    for (int i = 1; i < 8; ++i) d.push_back(std::polar(0.85 * ud(gen), 2 * M_PI * ud(gen)));
    const auto pl = plant(gen, d);
    const ComplexMatrix oracle = pl.s.col(0) * pl.s_inv.row(0);
    const auto res = abel_pole_probe(pl.t, lambda);
    ASSERT_EQ(res.classification, PoleClass::FirstOrderPole) << "trial " << trial;
    EXPECT_LE(norm2(*res.projection - oracle), 1e-6) << "trial " << trial;
  }
}

TEST(QuasiCompactness, Examples) {
  const auto w = quasi_compactness_witness(diag({1.0, 0.5}), 1, 1);
  ASSERT_TRUE(w.has_value());
  EXPECT_EQ(w->power, 1);
  EXPECT_EQ(w->rank, 1);
  EXPECT_NEAR(w->gap, 0.5, 1e-14);

  EXPECT_FALSE(quasi_compactness_witness(eye(5), 3, 4).has_value());

  const ComplexMatrix nil = real_matrix({{0, 1, 0}, {0, 0, 1}, {0, 0, 0}});
  const auto z = quasi_compactness_witness(nil, 3, 0);
  ASSERT_TRUE(z.has_value());
  EXPECT_EQ(z->power, 3);
  EXPECT_EQ(z->rank, 0);
  EXPECT_NEAR(z->gap, 1.0, 1e-15);
}

TEST(GroupStructure, Examples) {
  EXPECT_EQ(group_structure({1.0, {Complex(1.0)}, 1e-8}).kind, GroupKind::Trivial);
  const auto g = group_structure({1.0, {Complex(1.0), Complex(-1.0), Complex(0, 1)}, 1e-8});
  EXPECT_EQ(g.kind, GroupKind::FiniteCyclic);
  EXPECT_EQ(g.order, 4);
  const Complex irr = std::polar(1.0, 2 * M_PI * std::sqrt(2.0) / 10);
  const auto t = group_structure({1.0, {irr}, 1e-8}, 1000000, 1e-9);
  EXPECT_EQ(t.kind, GroupKind::TorusClosure);
  EXPECT_EQ(t.rank, 1);
  EXPECT_EQ(group_structure({1.0, {}, 1e-8}).kind, GroupKind::Trivial);
}

TEST(GroupStructure, TorusRankIsALowerBound) {
  const Complex a = std::polar(1.0, 2 * M_PI * std::sqrt(2.0) / 10);
  const Complex b = std::polar(1.0, 2 * M_PI * std::sqrt(3.0) / 10);
  const auto g = group_structure({1.0, {a, b, a * b}, 1e-8}, 10000, 1e-9);
  EXPECT_EQ(g.kind, GroupKind::TorusClosure);
  EXPECT_GE(g.rank, 1);
  EXPECT_LE(g.rank, 2);
}

TEST(IsCyclic, FullRootGroupsOnly) {
  EXPECT_TRUE(is_cyclic({1.0, {Complex(1.0), Complex(-1.0)}, 1e-8}));
  EXPECT_FALSE(is_cyclic({1.0, {Complex(1.0), Complex(0, 1)}, 1e-8}));
  const Complex w = std::polar(1.0, 2 * M_PI / 3);
  EXPECT_TRUE(is_cyclic({1.0, {Complex(1.0), w, w * w}, 1e-8}));
}

TEST(FindReturnTimes, Examples) {
  const std::vector<double> a{M_PI};
  EXPECT_EQ(find_return_times(a, 0.1, 100), 2);
  const std::vector<double> b{2 * M_PI / 3, M_PI};
  EXPECT_EQ(find_return_times(b, 0.1, 100), 6);
  EXPECT_EQ(find_return_times({}, 0.1, 100), 1);
  const std::vector<double> c{2 * M_PI / 7};
  EXPECT_EQ(find_return_times(c, 1e-9, 6), std::nullopt);
}

TEST(PositiveConvergence, Examples) {
  const auto swap = positive_convergence_check(SemigroupSpec::discrete(kSwap));
  EXPECT_FALSE(swap.converges());
  EXPECT_TRUE(has_tag(swap, "cyclic-peripheral-spectrum"));
  for (const auto& r : swap.reasons)
    if (r.tag == "cyclic-peripheral-spectrum") {
      EXPECT_EQ(r.verdict, "pass");
    }

  const auto gen = positive_convergence_check(SemigroupSpec::continuous(real_matrix({{-1, 1}, {1, -1}})));
  ASSERT_TRUE(gen.converges());
  EXPECT_LT(max_abs(*gen.limit - 0.5 * real_matrix({{1, 1}, {1, 1}})), 1e-12);
  EXPECT_EQ(gen.limit_rank, 1);

  const auto prim = positive_convergence_check(SemigroupSpec::discrete(real_matrix({{0.5, 0.5}, {0.25, 0.75}})));
  EXPECT_TRUE(prim.converges());
}

TEST(PositiveConvergence, RejectsNegativeEntry) {
  try {
    positive_convergence_check(SemigroupSpec::discrete(real_matrix({{0.5, -0.1}, {0, 0.5}})));
    FAIL() << "expected PreconditionError";
  } catch (const PreconditionError& e) {
    EXPECT_NE(std::string(e.what()).find("(0,1)"), std::string::npos) << e.what();
  }
}

TEST(StrongPositivity, PrimitiveMatchesPerronOuterProduct) {
  const ComplexMatrix t = real_matrix({{0.5, 0.5}, {0.25, 0.75}});
  const auto rep = strong_positivity_convergence(SemigroupSpec::discrete(t));
  ASSERT_TRUE(rep.converges());
  EXPECT_EQ(rep.limit_rank, 1);
  // Right Perron vector (1,1), left (1,2)/3 by hand.
  const ComplexMatrix oracle = real_matrix({{1, 2}, {1, 2}}) / 3.0;
  EXPECT_LT(max_abs(*rep.limit - oracle), 1e-12);
  EXPECT_LT(max_abs(matrix_power(t, 1000) - oracle), 1e-12);
}

TEST(StrongPositivity, IndeterminateWhenConditionFails) {
  EXPECT_EQ(strong_positivity_convergence(SemigroupSpec::discrete(kSwap)).verdict, Verdict::Indeterminate);
  EXPECT_EQ(strong_positivity_convergence(SemigroupSpec::discrete(eye(2))).verdict, Verdict::Indeterminate);
}

TEST(SubsemigroupConsistency, Examples) {
  const auto a = subsemigroup_consistency(SemigroupSpec::continuous(diag({-1.0, 0.0})), 1.0);
  EXPECT_TRUE(a.coincide);
  EXPECT_LT(a.deviation, 1e-10);

  ComplexMatrix rot = ComplexMatrix::Zero(3, 3);
  rot(0, 1) = -M_PI;
  rot(1, 0) = M_PI;
  rot(2, 2) = -1.0;
  const auto b = subsemigroup_consistency(SemigroupSpec::continuous(rot), 2.0);
  EXPECT_TRUE(b.coincide);
  EXPECT_EQ(b.rank_continuous, 2);
  EXPECT_EQ(b.rank_discrete, 2);
  EXPECT_LT(b.deviation, 1e-8);

  const auto c = subsemigroup_consistency(SemigroupSpec::continuous(rot.topLeftCorner(2, 2)), 1.0);
  EXPECT_TRUE(c.coincide);
  EXPECT_LT(c.deviation, 1e-8);
  EXPECT_EQ(c.rank_discrete, 2);
}

TEST(SubsemigroupConsistency, FlagsAliasing) {
  // e^{2 * i pi} == e^{2 * (-i pi)}: distinct generator eigenvalues collapse.
  const ComplexMatrix rot = real_matrix({{0, -M_PI}, {M_PI, 0}});
  EXPECT_TRUE(subsemigroup_consistency(SemigroupSpec::continuous(rot), 2.0).aliased);
  EXPECT_FALSE(subsemigroup_consistency(SemigroupSpec::continuous(rot), 0.7).aliased);
}

TEST(Sqrt2Gap, Examples) {
  const auto swap = sqrt2_gap_check(kSwap);
  EXPECT_TRUE(swap.gap_ok);
  EXPECT_NEAR(swap.distance, 2.0, 1e-12);
  const auto id = sqrt2_gap_check(eye(3));
  EXPECT_TRUE(id.gap_ok);
  EXPECT_EQ(id.distance, 0.0);
  const auto cyc = sqrt2_gap_check(real_matrix({{0, 0, 1}, {1, 0, 0}, {0, 1, 0}}));
  EXPECT_TRUE(cyc.gap_ok);
  EXPECT_NEAR(cyc.distance, std::sqrt(3.0), 1e-12);
}

TEST(Sqrt2Gap, PreconditionNamesFailedCheck) {
  try {
    sqrt2_gap_check(real_matrix({{0.5, 0}, {0, 2}}));
    FAIL() << "expected PreconditionError";
  } catch (const PreconditionError& e) {
    EXPECT_FALSE(std::string(e.what()).empty());
  }
  EXPECT_THROW(sqrt2_gap_check(real_matrix({{-1, 0}, {0, 1}})), PreconditionError);
}
