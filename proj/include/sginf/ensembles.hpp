#pragma once

// Seeded random matrix families and the predicate suite each one exercises.
// Members are independent, so an ensemble runs data-parallel over OpenMP;
// run_serial() is the single-threaded reference.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "sginf/spectral.hpp"

namespace sginf::ensemble {

/// Recorded in every report so runs can be reproduced in other languages:
/// std::mt19937_64 seeded with (seed XOR member index), doubles from the top
/// 53 bits, normals by Box-Muller, integers by rejection.
inline constexpr const char* kPrngName = "mt19937_64/u53-boxmuller-v1";

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform();                      // [0, 1)
  double uniform(double lo, double hi);  // [lo, hi)
  double normal();
  int uniform_int(int lo, int hi);  // inclusive
  bool bernoulli(double p) { return uniform() < p; }
  std::vector<int> permutation(int n);

 private:
  std::mt19937_64 gen_;
};

inline std::uint64_t member_seed(std::uint64_t seed, std::uint64_t index) { return seed ^ index; }

enum class Kind { Positive, MonomialUnimodular, PContractive, Primitive };

Kind parse_kind(const std::string& name);
const char* to_string(Kind k);

/// Entrywise non-negative, spectral radius 1, semisimple peripheral
/// spectrum: direct sums of strictly positive and block-cyclic pieces,
/// permuted.
ComplexMatrix positive_power_bounded(Rng& rng);

/// T = D P with P a non-identity permutation and D a positive diagonal whose
/// cycle products are 1, so the spectrum is unimodular and semisimple.
ComplexMatrix monomial_unimodular(Rng& rng);

struct PContractiveSample {
  ComplexMatrix t;
  NormP p;
};

/// Signed permutation matrices: isometries of ell^p (p in {1, inf}), hence
/// p-contractive and doubly power-bounded.
PContractiveSample p_contractive(Rng& rng);

/// Primitive non-negative matrix (Hamiltonian cycle plus a self-loop plus
/// random fill) scaled to Perron root 1.
ComplexMatrix primitive_normalized(Rng& rng);

/// lim_j T^{2^j} by repeated squaring, then the Perron outer product
/// u v^T / (v^T u) from its column and row sums. Independent of the
/// eigen-decomposition path.
RealMatrix perron_outer_product_oracle(const RealMatrix& t);

struct MemberResult {
  bool pass = false;
  double margin = 0.0;
  std::string note;
};

struct Statistics {
  Kind kind = Kind::Positive;
  int count = 0;
  std::uint64_t seed = 0;
  int passed = 0;
  double worst_margin = 0.0;
  std::string margin_name;
  std::vector<int> failures;

  nlohmann::json to_json() const;
};

MemberResult run_member(Kind kind, std::uint64_t seed, int index);

/// Throws PreconditionError for count < 1.
Statistics run(Kind kind, int count, std::uint64_t seed);
Statistics run_serial(Kind kind, int count, std::uint64_t seed);

}  // namespace sginf::ensemble
