#include "sginf/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sginf/errors.hpp"
#include "sginf/matrix_io.hpp"
#include "sginf/roots.hpp"

namespace sginf {

IndexMonoid IndexMonoid::nonneg_reals_power(int n) {
  if (n < 1) throw InputError("nonneg_reals^n requires n >= 1");
  return {MonoidKind::NonNegRealsPower, n};
}

IndexMonoid IndexMonoid::parse(const std::string& name) {
  if (name == "naturals") return naturals();
  if (name == "nonneg_reals") return nonneg_reals();
  if (name == "dyadics") return dyadics();
  if (name == "nonneg_rationals") return nonneg_rationals();
  if (name == "max_lattice") return max_lattice();
  const std::string prefix = "nonneg_reals^";
  if (name.rfind(prefix, 0) == 0) {
    try {
      std::size_t used = 0;
      const int n = std::stoi(name.substr(prefix.size()), &used);
      if (used == name.size() - prefix.size()) return nonneg_reals_power(n);
    } catch (const std::logic_error&) {
    }
  }
  throw InputError("unknown monoid \"" + name + "\"");
}

std::string IndexMonoid::name() const {
  switch (kind) {
    case MonoidKind::Naturals: return "naturals";
    case MonoidKind::NonNegReals: return "nonneg_reals";
    case MonoidKind::NonNegRealsPower: return "nonneg_reals^" + std::to_string(power);
    case MonoidKind::Dyadics: return "dyadics";
    case MonoidKind::NonNegRationals: return "nonneg_rationals";
    case MonoidKind::MaxLattice: return "max_lattice";
  }
  return "?";
}

bool IndexMonoid::essentially_divisible() const {
  switch (kind) {
    case MonoidKind::NonNegReals:
    case MonoidKind::NonNegRealsPower:
    case MonoidKind::NonNegRationals:
    case MonoidKind::MaxLattice:
      return true;
    case MonoidKind::Naturals:
    case MonoidKind::Dyadics:
      return false;
  }
  return false;
}

bool is_essentially_divisible(const IndexMonoid& m) { return m.essentially_divisible(); }

SemigroupSpec::SemigroupSpec(TimeMode mode, ComplexMatrix m, IndexMonoid monoid, NormP p)
    : mode_(mode), matrix_(std::move(m)), monoid_(monoid), norm_p_(p) {
  validate_matrix(matrix_);
  if (mode_ == TimeMode::Discrete && monoid_.kind != MonoidKind::Naturals) {
    throw InputError("discrete semigroups are indexed by the naturals, not " + monoid_.name());
  }
  if (mode_ == TimeMode::Continuous && monoid_.kind != MonoidKind::NonNegReals &&
      monoid_.kind != MonoidKind::Dyadics && monoid_.kind != MonoidKind::NonNegRationals) {
    throw InputError("continuous semigroups cannot be indexed by " + monoid_.name());
  }
}

SemigroupSpec SemigroupSpec::discrete(ComplexMatrix t, NormP p, IndexMonoid monoid) {
  return SemigroupSpec(TimeMode::Discrete, std::move(t), monoid, p);
}

SemigroupSpec SemigroupSpec::continuous(ComplexMatrix a, NormP p, IndexMonoid monoid) {
  return SemigroupSpec(TimeMode::Continuous, std::move(a), monoid, p);
}

namespace {

NormP parse_norm(const nlohmann::json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "Inf" || s == "infinity") return NormP::Inf;
    if (s == "1") return NormP::One;
    if (s == "2") return NormP::Two;
  } else if (j.is_number_integer()) {
    if (j.get<int>() == 1) return NormP::One;
    if (j.get<int>() == 2) return NormP::Two;
  }
  throw InputError("field \"norm_p\": expected 1, 2 or \"inf\"");
}

}  // namespace

SemigroupSpec SemigroupSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("semigroup: expected a JSON object");
  if (!j.contains("mode") || !j["mode"].is_string()) throw InputError("semigroup: missing field \"mode\"");
  if (!j.contains("matrix")) throw InputError("semigroup: missing field \"matrix\"");
  const auto mode = j["mode"].get<std::string>();
  const NormP p = j.contains("norm_p") ? parse_norm(j["norm_p"]) : NormP::Inf;
  ComplexMatrix m = matrix_from_json(j["matrix"]);
  if (mode == "discrete") {
    const auto monoid = j.contains("monoid") ? IndexMonoid::parse(j["monoid"].get<std::string>())
                                             : IndexMonoid::naturals();
    return discrete(std::move(m), p, monoid);
  }
  if (mode == "continuous") {
    const auto monoid = j.contains("monoid") ? IndexMonoid::parse(j["monoid"].get<std::string>())
                                             : IndexMonoid::nonneg_reals();
    return continuous(std::move(m), p, monoid);
  }
  throw InputError("field \"mode\": expected \"discrete\" or \"continuous\"");
}

nlohmann::json SemigroupSpec::to_json() const {
  nlohmann::json norm = norm_p_ == NormP::Inf ? nlohmann::json("inf")
                                              : nlohmann::json(norm_p_ == NormP::One ? 1 : 2);
  return {{"mode", is_discrete() ? "discrete" : "continuous"},
          {"matrix", matrix_to_json(matrix_)},
          {"monoid", monoid_.name()},
          {"norm_p", norm}};
}

ComplexMatrix sample(const SemigroupSpec& sg, double s) {
  if (!std::isfinite(s) || s < 0.0) {
    std::ostringstream os;
    os << "semigroup index must be finite and >= 0, got " << s;
    throw DomainError(os.str());
  }
  if (sg.is_discrete()) {
    if (s != std::floor(s)) {
      std::ostringstream os;
      os << "discrete semigroup index must be an integer, got " << s;
      throw DomainError(os.str());
    }
    return matrix_power(sg.matrix(), static_cast<long long>(s));
  }
  return matrix_exponential(sg.matrix(), s);
}

ComplexMatrix SpectrumSplit::peripheral_projection() const {
  const int n = decomposition.dim();
  ComplexMatrix p = ComplexMatrix::Zero(n, n);
  for (int i : peripheral) p += decomposition.items[i].projection;
  return p;
}

bool SpectrumSplit::peripheral_semisimple() const {
  return std::all_of(peripheral.begin(), peripheral.end(),
                     [&](int i) { return decomposition.items[i].pole_order == 1; });
}

SpectrumSplit split_spectrum(const SemigroupSpec& sg, const Tolerances& tol) {
  SpectrumSplit out;
  out.decomposition = eig_decompose(sg.matrix(), tol.eig);
  for (int i = 0; i < static_cast<int>(out.decomposition.items.size()); ++i) {
    const Complex lambda = out.decomposition.items[i].eigenvalue;
    // Signed distance to the boundary: > 0 outside (unstable).
    const double offset = sg.is_discrete() ? std::abs(lambda) - 1.0 : lambda.real();
    if (std::abs(offset) <= tol.circle) {
      out.peripheral.push_back(i);
    } else if (offset < 0.0) {
      out.stable.push_back(i);
    } else {
      out.unstable.push_back(i);
    }
    if (std::abs(offset) > tol.circle && std::abs(offset) <= tol.borderline) out.borderline = true;
  }
  return out;
}

namespace {

constexpr double kTransientFloor = 1e-12;
constexpr long long kMaxDiscreteHorizon = 100000;
constexpr int kMaxGridSamples = 20000;

// sup_n ||sum_j lambda_j^n P_j|| over the peripheral part of a discrete
// semigroup. Exact over one period when every lambda_j is a root of unity,
// otherwise the certified triangle-inequality bound.
double discrete_peripheral_sup(const SpectrumSplit& split, const ComplexMatrix& t, NormP p) {
  if (split.peripheral.empty()) return 0.0;
  std::int64_t period = 1;
  bool periodic = true;
  for (int i : split.peripheral) {
    const auto order =
        root_of_unity_order(std::arg(split.decomposition.items[i].eigenvalue), 10000, 1e-9);
    if (!order) {
      periodic = false;
      break;
    }
    period = lcm64(period, *order);
    if (period > 10000) {
      periodic = false;
      break;
    }
  }
  const ComplexMatrix proj = split.peripheral_projection();
  if (periodic) {
    double sup = 0.0;
    ComplexMatrix q = proj;
    for (std::int64_t n = 0; n < period; ++n) {
      sup = std::max(sup, induced_norm(q, p));
      q = t * q;
    }
    return sup;
  }
  double sum = 0.0;
  for (int i : split.peripheral) sum += induced_norm(split.decomposition.items[i].projection, p);
  return sum;
}

Boundedness discrete_bound(const SemigroupSpec& sg, const SpectrumSplit& split) {
  const NormP p = sg.norm_p();
  const ComplexMatrix& t = sg.matrix();
  const int n = sg.dim();
  const ComplexMatrix proj = split.peripheral_projection();
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);

  ComplexMatrix power = id;
  ComplexMatrix stable = id - proj;
  double sampled = induced_norm(power, p);
  double stable_sup = induced_norm(stable, p);
  double stable_now = stable_sup;
  long long h = 0;
  while (stable_now > kTransientFloor && h < kMaxDiscreteHorizon) {
    power = power * t;
    stable = t * stable;
    ++h;
    sampled = std::max(sampled, induced_norm(power, p));
    stable_now = induced_norm(stable, p);
    stable_sup = std::max(stable_sup, stable_now);
  }
  // For m = qh + r: ||S_m|| <= ||S_h||^q ||S_r||.
  double tail_stable = stable_now * stable_sup;
  if (stable_now >= 1.0) tail_stable = std::numeric_limits<double>::infinity();
  const double tail = discrete_peripheral_sup(split, t, p) + tail_stable;
  return {true, std::max(sampled, tail)};
}

// Maximum of ||e^{tA} X||_p over a uniform grid on [0, horizon] times the
// between-grid factor e^{delta * max(mu_p(A), 0)}.
double grid_sup(const ComplexMatrix& a, const ComplexMatrix& x, double horizon, NormP p) {
  const double anorm = induced_norm(a, NormP::One);
  double delta = anorm > 0.0 ? std::min(0.05, 0.1 / anorm) : 0.05;
  if (horizon / delta > kMaxGridSamples) delta = horizon / kMaxGridSamples;
  const int steps = static_cast<int>(std::ceil(horizon / delta));
  if (steps > 0) delta = horizon / steps;
  const double factor = std::exp(delta * std::max(log_norm(a, p), 0.0));
  const ComplexMatrix step = matrix_exponential(a, delta);
  ComplexMatrix cur = x;
  double sup = induced_norm(cur, p);
  for (int k = 0; k < steps; ++k) {
    cur = step * cur;
    sup = std::max(sup, induced_norm(cur, p));
  }
  return sup * (steps > 0 ? factor : 1.0);
}

double continuous_peripheral_sup(const SemigroupSpec& sg, const SpectrumSplit& split) {
  if (split.peripheral.empty()) return 0.0;
  const NormP p = sg.norm_p();
  const ComplexMatrix proj = split.peripheral_projection();
  std::vector<double> freqs;
  for (int i : split.peripheral) {
    const double beta = std::abs(split.decomposition.items[i].eigenvalue.imag());
    if (beta > 1e-12) freqs.push_back(beta);
  }
  if (freqs.empty()) return induced_norm(proj, p);

  // Commensurate frequencies: beta_j = m_j * omega for integers m_j.
  const double base = *std::min_element(freqs.begin(), freqs.end());
  for (int q = 1; q <= 1000; ++q) {
    const double omega = base / q;
    bool ok = true;
    for (double b : freqs) {
      const double ratio = b / omega;
      if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
        ok = false;
        break;
      }
    }
    if (ok) {
      const double period = 2.0 * M_PI / omega;
      return grid_sup(sg.matrix(), proj, period, p);
    }
  }
  double sum = 0.0;
  for (int i : split.peripheral) sum += induced_norm(split.decomposition.items[i].projection, p);
  return sum;
}

Boundedness continuous_bound(const SemigroupSpec& sg, const SpectrumSplit& split) {
  const NormP p = sg.norm_p();
  const ComplexMatrix& a = sg.matrix();
  const int n = sg.dim();
  const ComplexMatrix proj = split.peripheral_projection();
  const ComplexMatrix stable0 = ComplexMatrix::Identity(n, n) - proj;

  // Transient horizon: first doubling time with ||e^{tA}(I - P)|| below the floor.
  double horizon = 0.0;
  double stable_at_h = induced_norm(stable0, p);
  if (stable_at_h > kTransientFloor) {
    horizon = 1.0;
    while (true) {
      stable_at_h = induced_norm(matrix_exponential(a, horizon) * stable0, p);
      if (stable_at_h <= kTransientFloor || horizon >= 1e7) break;
      horizon *= 2.0;
    }
  }
  const double sampled = grid_sup(a, ComplexMatrix::Identity(n, n), horizon, p);
  const double stable_sup = grid_sup(a, stable0, horizon, p);
  double tail_stable = stable_at_h * stable_sup;
  if (stable_at_h >= 1.0) tail_stable = std::numeric_limits<double>::infinity();
  const double tail = continuous_peripheral_sup(sg, split) + tail_stable;
  return {true, std::max(sampled, tail)};
}

}  // namespace

Boundedness is_bounded(const SemigroupSpec& sg, const Tolerances& tol) {
  const SpectrumSplit split = split_spectrum(sg, tol);
  if (!split.unstable.empty() || !split.peripheral_semisimple()) {
    return {false, std::numeric_limits<double>::infinity()};
  }
  return sg.is_discrete() ? discrete_bound(sg, split) : continuous_bound(sg, split);
}

bool is_contractive(const SemigroupSpec& sg, std::span<const double> times, double tol) {
  if (sg.is_discrete()) return induced_norm(sg.matrix(), sg.norm_p()) <= 1.0 + tol;
  if (sg.norm_p() == NormP::Inf) return log_norm_inf(sg.matrix()) <= tol;
  if (times.empty()) throw PreconditionError("is_contractive needs at least one sample time");
  for (double t : times)
    if (induced_norm(sample(sg, t), sg.norm_p()) > 1.0 + tol) return false;
  return true;
}

}  // namespace sginf
