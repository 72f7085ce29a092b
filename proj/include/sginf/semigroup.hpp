#pragma once

// One-parameter operator semigroups on C^n: discrete powers T^n and
// exponentials e^{tA}, tagged with the algebraic descriptor of the index
// monoid.

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sginf/spectral.hpp"

namespace sginf {

enum class MonoidKind { Naturals, NonNegReals, NonNegRealsPower, Dyadics, NonNegRationals, MaxLattice };

struct IndexMonoid {
  MonoidKind kind = MonoidKind::Naturals;
  int power = 1;  // only meaningful for NonNegRealsPower

  static IndexMonoid naturals() { return {MonoidKind::Naturals, 1}; }
  static IndexMonoid nonneg_reals() { return {MonoidKind::NonNegReals, 1}; }
  static IndexMonoid nonneg_reals_power(int n);
  static IndexMonoid dyadics() { return {MonoidKind::Dyadics, 1}; }
  static IndexMonoid nonneg_rationals() { return {MonoidKind::NonNegRationals, 1}; }
  static IndexMonoid max_lattice() { return {MonoidKind::MaxLattice, 1}; }

  /// "naturals", "nonneg_reals", "nonneg_reals^3", "dyadics",
  /// "nonneg_rationals", "max_lattice".
  static IndexMonoid parse(const std::string& name);
  std::string name() const;

  bool essentially_divisible() const;

  friend bool operator==(const IndexMonoid&, const IndexMonoid&) = default;
};

/// Catalogue lookup; divisibility of arbitrary monoids is not decided.
bool is_essentially_divisible(const IndexMonoid& m);

enum class TimeMode { Discrete, Continuous };

/// Immutable semigroup description. Discrete mode holds T, continuous mode
/// holds the generator A.
class SemigroupSpec {
 public:
  static SemigroupSpec discrete(ComplexMatrix t, NormP p = NormP::Inf,
                                IndexMonoid monoid = IndexMonoid::naturals());
  static SemigroupSpec continuous(ComplexMatrix a, NormP p = NormP::Inf,
                                  IndexMonoid monoid = IndexMonoid::nonneg_reals());

  static SemigroupSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  TimeMode mode() const { return mode_; }
  bool is_discrete() const { return mode_ == TimeMode::Discrete; }
  const ComplexMatrix& matrix() const { return matrix_; }
  const IndexMonoid& monoid() const { return monoid_; }
  NormP norm_p() const { return norm_p_; }
  int dim() const { return static_cast<int>(matrix_.rows()); }

 private:
  SemigroupSpec(TimeMode mode, ComplexMatrix m, IndexMonoid monoid, NormP p);

  TimeMode mode_;
  ComplexMatrix matrix_;
  IndexMonoid monoid_;
  NormP norm_p_;
};

/// T_s: T^s for discrete semigroups (s must be a non-negative integer),
/// e^{sA} for continuous ones. Throws DomainError otherwise.
ComplexMatrix sample(const SemigroupSpec& sg, double s);

struct Tolerances {
  /// Half-width of the band around |lambda| = 1 (or Re lambda = 0).
  double circle = 1e-8;
  /// Eigenvalues within `borderline` of the boundary but outside the band
  /// are flagged as undecidable in floating point.
  double borderline = 1e-6;
  EigOptions eig;
};

/// Spectral split of the semigroup's matrix (T or A) relative to the unit
/// circle (discrete) or the imaginary axis (continuous).
struct SpectrumSplit {
  SpectralDecomposition decomposition;
  std::vector<int> peripheral;
  std::vector<int> stable;
  std::vector<int> unstable;
  bool borderline = false;

  /// Sum of projections over the peripheral items.
  ComplexMatrix peripheral_projection() const;
  bool peripheral_semisimple() const;
};

SpectrumSplit split_spectrum(const SemigroupSpec& sg, const Tolerances& tol = {});

struct Boundedness {
  bool bounded = false;
  double bound = 0.0;  // +inf when unbounded
};

/// Decided spectrally: no spectrum outside the closed unit disc (left half
/// plane) and semisimple peripheral eigenvalues. The returned bound is an
/// upper bound for sup_s ||T_s||_p built from sampling over the transient
/// plus a tail estimate.
Boundedness is_bounded(const SemigroupSpec& sg, const Tolerances& tol = {});

/// Discrete: ||T||_p <= 1 + tol. Continuous with p = inf: mu_inf(A) <= tol.
/// Continuous otherwise: ||e^{tA}||_p <= 1 + tol at each of `times`.
bool is_contractive(const SemigroupSpec& sg, std::span<const double> times, double tol = 1e-12);

}  // namespace sginf
