#pragma once

// Semigroup-at-infinity analysis in finite dimension: projection at
// infinity, stable/reversible splitting, peripheral group structure, Abel
// pole probes, quasi-compactness witnesses and the convergence predicates.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sginf/semigroup.hpp"
#include "sginf/spectral.hpp"

namespace sginf {

struct PeripheralSet {
  double circle_radius = 1.0;
  std::vector<Complex> eigenvalues;
  double tol = 1e-8;
};

enum class GroupKind { Trivial, FiniteCyclic, TorusClosure };

const char* to_string(GroupKind k);

struct GroupDescriptor {
  GroupKind kind = GroupKind::Trivial;
  std::int64_t order = 1;  // FiniteCyclic
  int rank = 0;            // TorusClosure, a detected lower bound
  std::vector<double> peripheral_arguments;
};

struct AnalyzerOptions {
  Tolerances tol;
  std::int64_t k_max = 10000;
  double root_tol = 1e-9;
};

struct InfinityDecomposition {
  bool bounded = false;
  bool exists_compact = false;
  bool borderline = false;
  std::string diagnostic;
  ComplexMatrix p_inf;
  ComplexMatrix e_inf_basis;  // orthonormal columns spanning range(P_inf)
  PeripheralSet peripheral;   // unit-circle values (e^{i beta} for generators)
  std::vector<Complex> generator_peripheral;  // continuous mode: i beta on the axis
  std::vector<int> peripheral_pole_orders;
  std::vector<int> peripheral_multiplicities;
  double stable_spectral_radius = 0.0;
  GroupDescriptor group;
};

enum class Verdict { Converges, DoesNotConverge, Indeterminate };

const char* to_string(Verdict v);

struct Reason {
  std::string tag;
  std::string verdict;  // "pass", "fail", "n/a", ...
  std::string anchor;
};

struct ConvergenceReport {
  Verdict verdict = Verdict::DoesNotConverge;
  std::optional<ComplexMatrix> limit;
  std::optional<int> limit_rank;
  std::vector<Reason> reasons;
  bool divisibility_gate = false;
  InfinityDecomposition decomposition;

  bool converges() const { return verdict == Verdict::Converges; }
};

InfinityDecomposition infinity_decomposition(const SemigroupSpec& sg, const AnalyzerOptions& opts = {});

/// Converges iff the semigroup at infinity exists and 1 is the only
/// unimodular eigenvalue (0 the only imaginary-axis eigenvalue of A).
ConvergenceReport converges(const SemigroupSpec& sg, const AnalyzerOptions& opts = {});

enum class PoleClass { ResolventPoint, FirstOrderPole, HigherOrderPole };

const char* to_string(PoleClass c);

struct PoleProbeResult {
  PoleClass classification = PoleClass::ResolventPoint;
  std::optional<ComplexMatrix> projection;
  std::vector<Complex> schedule;
  std::vector<double> norms;  // ||D_k||_2 along the schedule
  double final_norm = 0.0;
  double cauchy_defect = 0.0;       // distance between the last two extrapolations
  double idempotency_defect = 0.0;  // ||P^2 - P||_2, first-order poles only
};

struct AbelOptions {
  double eps0 = 1e-6;
};

/// Evaluates D_k = (mu_k - lambda) R(mu_k, T) along mu_k = lambda (1 + 2^{-k}),
/// k = 1..steps, and extrapolates the last three iterates (Richardson in
/// h = 2^{-k}). Growth past 1/eps0, or sustained doubling of ||D_k|| in the
/// tail, classifies a higher-order pole; an extrapolated limit below eps0 a
/// resolvent point; anything else a first-order pole with P the limit.
PoleProbeResult abel_pole_probe(const ComplexMatrix& t, Complex lambda, int steps = 16,
                                const AbelOptions& opts = {});

struct QuasiCompactWitness {
  int power = 0;
  int rank = 0;
  double gap = 0.0;  // 1 - ||T^n - K_r||_2
};

/// First (n, r) in lexicographic order with ||T^n - K_r||_2 < 1, K_r the
/// best rank-r approximant (truncated SVD).
std::optional<QuasiCompactWitness> quasi_compactness_witness(const ComplexMatrix& t, int max_power,
                                                             int max_rank);

GroupDescriptor group_structure(const PeripheralSet& peripheral, std::int64_t k_max = 10000,
                                double tol = 1e-9);

/// Group generated by {e^{i beta_j t}: t >= 0} for imaginary-axis
/// eigenvalues i beta_j of a generator.
GroupDescriptor continuous_group_structure(std::span<const double> betas, double tol = 1e-9);

/// Closed under lambda -> lambda^k for all k (within tol)?
bool is_cyclic(const PeripheralSet& peripheral, std::int64_t k_max = 10000, double tol = 1e-9);

/// Smallest n in [1, n_max] with max_i |e^{i n theta_i} - 1| < eps.
std::optional<std::int64_t> find_return_times(std::span<const double> thetas, double eps,
                                              std::int64_t n_max);

/// Entrywise >= -tol (discrete: T real; continuous: A real and Metzler, so
/// every e^{tA} is positive). Throws PreconditionError naming the entry.
void require_positive(const SemigroupSpec& sg, double tol = 1e-12);
bool is_positive(const SemigroupSpec& sg, double tol = 1e-12);

/// Perron-Frobenius route: checks peripheral cyclicity and gates the
/// verdict on essential divisibility of the index monoid.
ConvergenceReport positive_convergence_check(const SemigroupSpec& sg, const AnalyzerOptions& opts = {});

struct StrongPositivityOptions {
  AnalyzerOptions analyzer;
  int discrete_horizon = 0;  // 0: max(64, (n-1)^2 + 1)
  double t_max = 100.0;
  int grid_points = 24;  // geometric grid t_max * 2^{-j}
  double positivity_tol = 1e-12;
};

/// Rank <= 1 criterion: if every canonical basis vector is mapped to a
/// strictly positive vector by some sampled T_s, the limit exists and has
/// rank <= 1. An exhausted horizon yields Verdict::Indeterminate.
ConvergenceReport strong_positivity_convergence(const SemigroupSpec& sg,
                                                const StrongPositivityOptions& opts = {});

struct SubsemigroupConsistency {
  bool coincide = false;
  double deviation = 0.0;
  bool aliased = false;  // e^{s0 i beta_j} == e^{s0 i beta_k} for some j != k
  int rank_continuous = 0;
  int rank_discrete = 0;
};

/// Compares P_inf of (e^{tA})_{t>=0} with P_inf of ((e^{s0 A})^n)_{n>=0}.
SubsemigroupConsistency subsemigroup_consistency(const SemigroupSpec& sg, double s0,
                                                 const AnalyzerOptions& opts = {},
                                                 double tol = 1e-8);

struct GapCheck {
  bool gap_ok = false;
  double distance = 0.0;
};

/// ||T - I||_2 for a positive, doubly power-bounded T; a non-identity T of
/// this kind sits at distance >= sqrt(2) from I.
GapCheck sqrt2_gap_check(const ComplexMatrix& t, double tol = 1e-9);

}  // namespace sginf
