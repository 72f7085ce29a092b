#include "sginf/infinity.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "sginf/errors.hpp"
#include "sginf/roots.hpp"

namespace sginf {

const char* to_string(GroupKind k) {
  switch (k) {
    case GroupKind::Trivial: return "trivial";
    case GroupKind::FiniteCyclic: return "finite_cyclic";
    case GroupKind::TorusClosure: return "torus_closure";
  }
  return "?";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Converges: return "converges";
    case Verdict::DoesNotConverge: return "does_not_converge";
    case Verdict::Indeterminate: return "indeterminate";
  }
  return "?";
}

const char* to_string(PoleClass c) {
  switch (c) {
    case PoleClass::ResolventPoint: return "resolvent_point";
    case PoleClass::FirstOrderPole: return "first_order_pole";
    case PoleClass::HigherOrderPole: return "higher_order_pole";
  }
  return "?";
}

namespace {

constexpr double kTwoPi = 2.0 * M_PI;
constexpr int kRelationCoeff = 6;
constexpr std::size_t kMaxRankProbe = 4;

// Looks for an integer relation c0 x + sum c_i b_i == 0 (mod 1 when
// `modular`) with 0 < |c0| <= C and |c_i| <= C.
bool has_small_relation(double x, const std::vector<double>& basis, bool modular, double tol) {
  std::vector<int> coeffs(basis.size(), -kRelationCoeff);
  const double scale = modular ? 1.0 : std::max(1.0, std::abs(x));
  while (true) {
    double partial = 0.0;
    double weight = 0.0;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      partial += coeffs[i] * basis[i];
      weight += std::abs(coeffs[i]);
    }
    for (int c0 = 1; c0 <= kRelationCoeff; ++c0) {
      const double s = c0 * x + partial;
      const double residue = modular ? std::abs(s - std::round(s)) : std::abs(s);
      if (residue < tol * scale * (c0 + weight + 1.0)) return true;
    }
    std::size_t i = 0;
    while (i < coeffs.size() && coeffs[i] == kRelationCoeff) coeffs[i++] = -kRelationCoeff;
    if (i == coeffs.size()) return false;
    ++coeffs[i];
  }
}

int detected_rank(const std::vector<double>& values, bool modular, double tol) {
  std::vector<double> basis;
  for (double x : values) {
    if (basis.size() >= kMaxRankProbe) break;
    if (!has_small_relation(x, basis, modular, tol)) basis.push_back(x);
  }
  return std::max<int>(1, static_cast<int>(basis.size()));
}

ComplexMatrix orthonormal_range(const ComplexMatrix& p, int rank) {
  if (rank == 0) return ComplexMatrix(p.rows(), 0);
  Eigen::JacobiSVD<ComplexMatrix> svd(p, Eigen::ComputeFullU);
  return svd.matrixU().leftCols(rank);
}

Reason reason(std::string tag, std::string verdict, std::string anchor) {
  return {std::move(tag), std::move(verdict), std::move(anchor)};
}

}  // namespace

GroupDescriptor group_structure(const PeripheralSet& peripheral, std::int64_t k_max, double tol) {
  GroupDescriptor g;
  std::vector<double> non_roots;
  std::int64_t order = 1;
  for (const Complex& lambda : peripheral.eigenvalues) {
    const double theta = std::arg(lambda);
    g.peripheral_arguments.push_back(theta);
    const auto k = root_of_unity_order(theta, k_max, tol);
    if (k) {
      order = lcm64(order, *k);
    } else {
      non_roots.push_back(theta / kTwoPi);
    }
  }
  if (!non_roots.empty()) {
    g.kind = GroupKind::TorusClosure;
    g.rank = detected_rank(non_roots, /*modular=*/true, tol);
    return g;
  }
  g.order = order;
  g.kind = order == 1 ? GroupKind::Trivial : GroupKind::FiniteCyclic;
  return g;
}

GroupDescriptor continuous_group_structure(std::span<const double> betas, double tol) {
  GroupDescriptor g;
  std::vector<double> freqs;
  for (double b : betas) {
    g.peripheral_arguments.push_back(b);
    const double a = std::abs(b);
    if (a <= tol) continue;
    if (std::none_of(freqs.begin(), freqs.end(), [&](double f) { return std::abs(f - a) <= tol * std::max(1.0, a); }))
      freqs.push_back(a);
  }
  if (freqs.empty()) return g;
  g.kind = GroupKind::TorusClosure;
  g.rank = detected_rank(freqs, /*modular=*/false, tol);
  return g;
}

bool is_cyclic(const PeripheralSet& peripheral, std::int64_t k_max, double tol) {
  const auto& ev = peripheral.eigenvalues;
  auto contains = [&](Complex z) {
    return std::any_of(ev.begin(), ev.end(), [&](Complex w) { return std::abs(w - z) < tol; });
  };
  for (const Complex& lambda : ev) {
    const auto k = root_of_unity_order(std::arg(lambda), k_max, tol);
    if (!k) return false;
    const double theta = std::arg(lambda);
    for (std::int64_t j = 2; j <= *k; ++j)
      if (!contains(std::polar(1.0, theta * static_cast<double>(j)))) return false;
  }
  return true;
}

std::optional<std::int64_t> find_return_times(std::span<const double> thetas, double eps,
                                              std::int64_t n_max) {
  if (!(eps > 0.0)) throw PreconditionError("find_return_times: eps must be > 0");
  if (n_max < 1) throw PreconditionError("find_return_times: n_max must be >= 1");
  for (std::int64_t n = 1; n <= n_max; ++n) {
    double worst = 0.0;
    for (double theta : thetas) {
      worst = std::max(worst, return_distance(theta, n));
      if (worst >= eps) break;
    }
    if (worst < eps) return n;
  }
  return std::nullopt;
}

InfinityDecomposition infinity_decomposition(const SemigroupSpec& sg, const AnalyzerOptions& opts) {
  const SpectrumSplit split = split_spectrum(sg, opts.tol);
  const auto& items = split.decomposition.items;
  const int n = sg.dim();

  InfinityDecomposition out;
  out.borderline = split.borderline;
  out.peripheral.tol = opts.tol.circle;

  for (int i : split.peripheral) {
    const auto& it = items[i];
    if (sg.is_discrete()) {
      out.peripheral.eigenvalues.push_back(it.eigenvalue);
    } else {
      out.generator_peripheral.push_back(it.eigenvalue);
      out.peripheral.eigenvalues.push_back(std::polar(1.0, it.eigenvalue.imag()));
    }
    out.peripheral_pole_orders.push_back(it.pole_order);
    out.peripheral_multiplicities.push_back(it.algebraic_mult);
  }
  for (int i : split.stable) {
    const Complex lambda = items[i].eigenvalue;
    const double r = sg.is_discrete() ? std::abs(lambda) : std::exp(lambda.real());
    out.stable_spectral_radius = std::max(out.stable_spectral_radius, r);
  }

  if (sg.is_discrete()) {
    out.group = group_structure(out.peripheral, opts.k_max, opts.root_tol);
  } else {
    std::vector<double> betas;
    for (const Complex& z : out.generator_peripheral) betas.push_back(z.imag());
    out.group = continuous_group_structure(betas, opts.root_tol);
  }

  out.p_inf = split.peripheral_projection();
  if (out.p_inf.size() == 0) out.p_inf = ComplexMatrix::Zero(n, n);
  int rank = 0;
  for (int m : out.peripheral_multiplicities) rank += m;
  out.e_inf_basis = orthonormal_range(out.p_inf, rank);

  out.bounded = split.unstable.empty() && split.peripheral_semisimple();
  out.exists_compact = out.bounded;
  if (!split.unstable.empty()) {
    out.diagnostic = sg.is_discrete() ? "not power-bounded: spectral value outside the closed unit disc"
                                      : "not bounded: generator has spectrum in the open right half-plane";
  } else if (!split.peripheral_semisimple()) {
    out.diagnostic = sg.is_discrete() ? "not power-bounded: unimodular eigenvalue with pole order > 1"
                                      : "not bounded: imaginary-axis eigenvalue with pole order > 1";
  }
  return out;
}

bool is_positive(const SemigroupSpec& sg, double tol) {
  try {
    require_positive(sg, tol);
    return true;
  } catch (const PreconditionError&) {
    return false;
  }
}

void require_positive(const SemigroupSpec& sg, double tol) {
  const ComplexMatrix& m = sg.matrix();
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      std::ostringstream os;
      if (std::abs(m(i, j).imag()) > tol) {
        os << "not a positive semigroup: entry (" << i << "," << j << ") is not real: " << m(i, j);
        throw PreconditionError(os.str());
      }
      const bool check = sg.is_discrete() || i != j;
      if (check && m(i, j).real() < -tol) {
        os << "not a positive semigroup: entry (" << i << "," << j << ") = " << m(i, j).real()
           << (sg.is_discrete() ? " is negative" : " is a negative off-diagonal generator entry");
        throw PreconditionError(os.str());
      }
    }
  }
}

ConvergenceReport converges(const SemigroupSpec& sg, const AnalyzerOptions& opts) {
  ConvergenceReport rep;
  rep.decomposition = infinity_decomposition(sg, opts);
  rep.divisibility_gate = sg.monoid().essentially_divisible();
  const auto& dec = rep.decomposition;

  rep.reasons.push_back(reason("bounded", dec.bounded ? "pass" : "fail",
                               dec.bounded ? "sup_s ||T_s|| < inf (spectral test)" : dec.diagnostic));
  rep.reasons.push_back(reason("essential-divisibility", rep.divisibility_gate ? "pass" : "fail",
                               "index monoid " + sg.monoid().name() +
                                   (rep.divisibility_gate ? " is" : " is not") +
                                   " essentially divisible (n t1 = s + n t2 solvable)"));
  if (!dec.exists_compact) {
    rep.verdict = Verdict::DoesNotConverge;
    rep.reasons.push_back(reason("compact-at-infinity", "fail",
                                 "semigroup at infinity is empty: " + dec.diagnostic));
    return rep;
  }
  rep.reasons.push_back(reason("compact-at-infinity", "pass",
                               "peripheral spectrum consists of first-order poles; P_inf is the "
                               "peripheral spectral projection"));

  bool only_unit = true;
  if (sg.is_discrete()) {
    for (const Complex& z : dec.peripheral.eigenvalues)
      if (std::abs(z - 1.0) > opts.tol.circle) only_unit = false;
  } else {
    for (const Complex& z : dec.generator_peripheral)
      if (std::abs(z.imag()) > opts.tol.circle) only_unit = false;
  }

  const bool positive = is_positive(sg);
  const std::vector<double> times{0.5, 1.0, 2.0, 4.0};
  const bool contractive = is_contractive(sg, times, 1e-12);

  if (only_unit) {
    rep.verdict = Verdict::Converges;
    rep.limit = dec.p_inf;
    rep.limit_rank = numerical_rank(dec.p_inf, 1e-8);
    rep.reasons.push_back(reason("unique-unimodular-eigenvalue", "pass",
                                 "1 is the only unimodular eigenvalue; lim T_s = P_inf"));
  } else {
    rep.verdict = Verdict::DoesNotConverge;
    rep.reasons.push_back(reason("unique-unimodular-eigenvalue", "fail",
                                 "a unimodular eigenvalue other than 1 keeps T_s rotating on E_inf"));
    if (sg.is_discrete() && positive && contractive) {
      rep.reasons.push_back(reason("discrete-time-obstruction", "cited",
                                   "positive contractive matrix whose powers do not converge: "
                                   "(N0,+) is not essentially divisible"));
    }
  }

  if (rep.divisibility_gate && positive) {
    rep.reasons.push_back(reason("positive-divisible-convergence", "applies",
                                 "positive bounded semigroup, quasi-compact in finite dimension, "
                                 "essentially divisible index: converges to a finite rank projection"));
  }
  if (rep.divisibility_gate && contractive && sg.norm_p() != NormP::Two) {
    rep.reasons.push_back(reason("contractive-non-hilbert-convergence", "applies",
                                 std::string("contractive on ell^") + to_string(sg.norm_p()) +
                                     " (projectively non-Hilbert), essentially divisible index: "
                                     "converges to a finite rank projection"));
  }
  return rep;
}

PoleProbeResult abel_pole_probe(const ComplexMatrix& t, Complex lambda, int steps, const AbelOptions& opts) {
  validate_matrix(t);
  if (steps < 4) throw PreconditionError("abel_pole_probe: steps must be >= 4");
  if (std::abs(std::abs(lambda) - 1.0) > 1e-8) throw PreconditionError("abel_pole_probe: |lambda| must be 1");

  PoleProbeResult out;
  std::vector<ComplexMatrix> iterates;
  iterates.reserve(steps);
  for (int k = 1; k <= steps; ++k) {
    const double h = std::ldexp(1.0, -k);
    const Complex mu = lambda * (1.0 + h);
    ComplexMatrix r;
    try {
      r = resolvent(t, mu);
    } catch (const SpectralPointError& e) {
      throw NumericalError(std::string("abel schedule hit the spectrum: ") + e.what(), 0.0);
    }
    iterates.push_back((mu - lambda) * r);
    out.schedule.push_back(mu);
    out.norms.push_back(norm2(iterates.back()));
  }
  out.final_norm = out.norms.back();

  auto richardson = [&](int last) -> ComplexMatrix {
    const ComplexMatrix& d1 = iterates[last - 2];
    const ComplexMatrix& d2 = iterates[last - 1];
    const ComplexMatrix& d3 = iterates[last];
    const ComplexMatrix e1 = 2.0 * d2 - d1;
    const ComplexMatrix e2 = 2.0 * d3 - d2;
    return (4.0 * e2 - e1) / 3.0;
  };
  const int last = steps - 1;
  const ComplexMatrix limit = richardson(last);
  out.cauchy_defect = norm2(limit - richardson(last - 1));

  const auto& nm = out.norms;
  const bool diverging = nm[last] > 1.0 / opts.eps0 ||
                         (nm[last] >= 1.5 * nm[last - 1] && nm[last - 1] >= 1.5 * nm[last - 2]);
  if (diverging) {
    out.classification = PoleClass::HigherOrderPole;
  } else if (norm2(limit) < opts.eps0) {
    out.classification = PoleClass::ResolventPoint;
  } else {
    out.classification = PoleClass::FirstOrderPole;
    out.idempotency_defect = norm2(limit * limit - limit);
    out.projection = limit;
  }
  return out;
}

std::optional<QuasiCompactWitness> quasi_compactness_witness(const ComplexMatrix& t, int max_power,
                                                             int max_rank) {
  validate_matrix(t);
  if (max_power < 1) throw PreconditionError("quasi_compactness_witness: max_power must be >= 1");
  if (max_rank < 0) throw PreconditionError("quasi_compactness_witness: max_rank must be >= 0");
  const int n = static_cast<int>(t.rows());
  ComplexMatrix power = t;
  for (int p = 1; p <= max_power; ++p) {
    if (p > 1) power = power * t;
    const Eigen::VectorXd sv = Eigen::JacobiSVD<ComplexMatrix>(power).singularValues();
    for (int r = 0; r <= max_rank; ++r) {
      const double residual = r < n ? sv(r) : 0.0;
      if (residual < 1.0) return QuasiCompactWitness{p, r, 1.0 - residual};
    }
  }
  return std::nullopt;
}

ConvergenceReport positive_convergence_check(const SemigroupSpec& sg, const AnalyzerOptions& opts) {
  require_positive(sg);
  ConvergenceReport generic = converges(sg, opts);

  ConvergenceReport rep;
  rep.decomposition = generic.decomposition;
  rep.divisibility_gate = generic.divisibility_gate;
  const auto& dec = rep.decomposition;

  bool cyclic = false;
  if (sg.is_discrete()) {
    cyclic = is_cyclic(dec.peripheral, opts.k_max, 1e-7);
  } else {
    cyclic = std::all_of(dec.generator_peripheral.begin(), dec.generator_peripheral.end(),
                         [&](Complex z) { return std::abs(z.imag()) <= opts.tol.circle; });
  }
  rep.reasons.push_back(reason("cyclic-peripheral-spectrum", cyclic ? "pass" : "fail",
                               "peripheral spectrum of a positive operator is closed under powers"));
  rep.reasons.push_back(reason("essential-divisibility", rep.divisibility_gate ? "pass" : "fail",
                               "index monoid " + sg.monoid().name()));

  if (!dec.exists_compact) {
    rep.verdict = Verdict::DoesNotConverge;
    rep.reasons.push_back(reason("compact-at-infinity", "fail", dec.diagnostic));
    return rep;
  }

  if (rep.divisibility_gate) {
    rep.verdict = Verdict::Converges;
    rep.reasons.push_back(reason("positive-divisible-convergence", "pass",
                                 "positive bounded semigroup with compact semigroup at infinity on "
                                 "an essentially divisible index converges to P_inf"));
  } else {
    const bool trivial = dec.group.kind == GroupKind::Trivial;
    rep.verdict = trivial ? Verdict::Converges : Verdict::DoesNotConverge;
    rep.reasons.push_back(reason("trivial-peripheral-group", trivial ? "pass" : "fail",
                                 "index monoid is not essentially divisible; convergence requires a "
                                 "trivial group at infinity"));
  }
  if (rep.converges()) {
    rep.limit = dec.p_inf;
    rep.limit_rank = numerical_rank(dec.p_inf, 1e-8);
  }
  const bool agree = rep.converges() == generic.converges();
  rep.reasons.push_back(reason("generic-cross-check", agree ? "pass" : "fail",
                               "verdict agrees with the unique-unimodular-eigenvalue criterion"));
  return rep;
}

ConvergenceReport strong_positivity_convergence(const SemigroupSpec& sg, const StrongPositivityOptions& opts) {
  require_positive(sg, opts.positivity_tol);
  const int n = sg.dim();
  const Boundedness b = is_bounded(sg, opts.analyzer.tol);
  if (!b.bounded) throw PreconditionError("strong positivity criterion needs a bounded semigroup");
  const ComplexMatrix t1 = sample(sg, 1.0);
  if (!quasi_compactness_witness(t1, 1, n)) {
    throw PreconditionError("strong positivity criterion needs a quasi-compact T_s");
  }

  std::vector<bool> reached(n, false);
  int remaining = n;
  auto scan = [&](const ComplexMatrix& ts) {
    for (int i = 0; i < n; ++i) {
      if (reached[i]) continue;
      bool strict = true;
      for (int r = 0; r < n && strict; ++r) strict = ts(r, i).real() > opts.positivity_tol;
      if (strict) {
        reached[i] = true;
        --remaining;
      }
    }
  };

  if (sg.is_discrete()) {
    const int horizon = opts.discrete_horizon > 0 ? opts.discrete_horizon : std::max(64, (n - 1) * (n - 1) + 1);
    ComplexMatrix power = ComplexMatrix::Identity(n, n);
    for (int s = 1; s <= horizon && remaining > 0; ++s) {
      power = power * sg.matrix();
      scan(power);
    }
  } else {
    for (int j = opts.grid_points - 1; j >= 0 && remaining > 0; --j) {
      scan(sample(sg, opts.t_max * std::ldexp(1.0, -j)));
    }
  }

  ConvergenceReport rep;
  if (remaining > 0) {
    rep.decomposition = infinity_decomposition(sg, opts.analyzer);
    rep.divisibility_gate = sg.monoid().essentially_divisible();
    rep.verdict = Verdict::Indeterminate;
    int first = 0;
    while (reached[first]) ++first;
    std::ostringstream os;
    os << "no sampled T_s maps e_" << first << " to a strictly positive vector within the horizon";
    rep.reasons.push_back(reason("strong-positivity", "inconclusive", os.str()));
    return rep;
  }

  rep = converges(sg, opts.analyzer);
  rep.reasons.push_back(reason("strong-positivity", "pass",
                               "every basis vector reaches the interior of the cone: limit exists "
                               "and has rank <= 1"));
  const bool verified = rep.converges() && rep.limit_rank.value_or(99) <= 1;
  rep.reasons.push_back(reason("rank-at-most-one", verified ? "pass" : "fail",
                               "computed limit is a projection of rank <= 1"));
  if (!verified) rep.verdict = Verdict::DoesNotConverge;
  return rep;
}

SubsemigroupConsistency subsemigroup_consistency(const SemigroupSpec& sg, double s0,
                                                 const AnalyzerOptions& opts, double tol) {
  if (sg.is_discrete()) throw PreconditionError("subsemigroup_consistency needs a continuous semigroup");
  if (!(s0 > 0.0)) throw PreconditionError("subsemigroup_consistency: s0 must be > 0");
  const auto cont = infinity_decomposition(sg, opts);
  if (!cont.exists_compact) throw PreconditionError("subsemigroup_consistency: " + cont.diagnostic);

  const auto disc_sg = SemigroupSpec::discrete(sample(sg, s0), sg.norm_p());
  const auto disc = infinity_decomposition(disc_sg, opts);

  SubsemigroupConsistency out;
  out.deviation = norm2(cont.p_inf - disc.p_inf);
  out.coincide = out.deviation <= tol;
  out.rank_continuous = numerical_rank(cont.p_inf, 1e-8);
  out.rank_discrete = numerical_rank(disc.p_inf, 1e-8);
  const auto& gp = cont.generator_peripheral;
  for (std::size_t j = 0; j < gp.size(); ++j)
    for (std::size_t k = j + 1; k < gp.size(); ++k) {
      const double bj = gp[j].imag(), bk = gp[k].imag();
      if (std::abs(bj - bk) <= opts.tol.circle) continue;
      if (std::abs(std::polar(1.0, s0 * bj) - std::polar(1.0, s0 * bk)) < 1e-6) out.aliased = true;
    }
  return out;
}

GapCheck sqrt2_gap_check(const ComplexMatrix& t, double tol) {
  validate_matrix(t);
  for (Eigen::Index j = 0; j < t.cols(); ++j)
    for (Eigen::Index i = 0; i < t.rows(); ++i)
      if (std::abs(t(i, j).imag()) > tol || t(i, j).real() < -tol) {
        std::ostringstream os;
        os << "sqrt2_gap_check: positivity fails at entry (" << i << "," << j << ") = " << t(i, j);
        throw PreconditionError(os.str());
      }
  const auto dec = eig_decompose(t);
  for (const auto& it : dec.items) {
    if (std::abs(std::abs(it.eigenvalue) - 1.0) > 1e-8) {
      std::ostringstream os;
      os << "sqrt2_gap_check: not doubly power-bounded, eigenvalue " << it.eigenvalue << " is not unimodular";
      throw PreconditionError(os.str());
    }
    if (it.pole_order != 1) {
      std::ostringstream os;
      os << "sqrt2_gap_check: not doubly power-bounded, eigenvalue " << it.eigenvalue << " has pole order "
         << it.pole_order;
      throw PreconditionError(os.str());
    }
  }
  GapCheck out;
  out.distance = norm2(t - ComplexMatrix::Identity(t.rows(), t.cols()));
  out.gap_ok = out.distance <= tol || out.distance >= std::sqrt(2.0) - tol;
  return out;
}

}  // namespace sginf
