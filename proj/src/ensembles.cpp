#include "sginf/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sginf/errors.hpp"
#include "sginf/infinity.hpp"
#include "sginf/roots.hpp"

namespace sginf::ensemble {

double Rng::uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  const double u1 = (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

int Rng::uniform_int(int lo, int hi) {
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % span;
  std::uint64_t x = 0;
  do {
    x = gen_();
  } while (x >= limit);
  return lo + static_cast<int>(x % span);
}

std::vector<int> Rng::permutation(int n) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  for (int i = n - 1; i > 0; --i) std::swap(p[i], p[uniform_int(0, i)]);
  return p;
}

Kind parse_kind(const std::string& name) {
  if (name == "positive") return Kind::Positive;
  if (name == "monomial_unimodular") return Kind::MonomialUnimodular;
  if (name == "p_contractive") return Kind::PContractive;
  if (name == "primitive") return Kind::Primitive;
  throw InputError("unknown ensemble kind \"" + name + "\"");
}

const char* to_string(Kind k) {
  switch (k) {
    case Kind::Positive: return "positive";
    case Kind::MonomialUnimodular: return "monomial_unimodular";
    case Kind::PContractive: return "p_contractive";
    case Kind::Primitive: return "primitive";
  }
  return "?";
}

namespace {

RealMatrix positive_block(Rng& rng, int rows, int cols) {
  RealMatrix b(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) b(i, j) = rng.uniform(0.05, 1.0);
  return b;
}

RealMatrix positive_block(Rng& rng, int n) { return positive_block(rng, n, n); }

// k cyclic classes; class c maps into class c+1 through a positive block.
RealMatrix block_cyclic(Rng& rng, int classes) {
  std::vector<int> sizes(classes);
  for (int& s : sizes) s = rng.uniform_int(1, 3);
  std::vector<int> offset(classes + 1, 0);
  for (int c = 0; c < classes; ++c) offset[c + 1] = offset[c] + sizes[c];
  RealMatrix t = RealMatrix::Zero(offset[classes], offset[classes]);
  for (int c = 0; c < classes; ++c) {
    const int next = (c + 1) % classes;
    t.block(offset[next], offset[c], sizes[next], sizes[c]) = positive_block(rng, sizes[next], sizes[c]);
  }
  return t;
}

RealMatrix scale_to_radius(const RealMatrix& t, double radius) {
  const double r = spectral_radius(t.cast<Complex>());
  return t * (radius / r);
}

RealMatrix permute(const RealMatrix& t, const std::vector<int>& perm) {
  const int n = static_cast<int>(t.rows());
  RealMatrix out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(perm[i], perm[j]) = t(i, j);
  return out;
}

RealMatrix direct_sum(const RealMatrix& a, const RealMatrix& b) {
  RealMatrix out = RealMatrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

RealMatrix positive_piece(Rng& rng) {
  if (rng.bernoulli(0.4)) return positive_block(rng, rng.uniform_int(1, 4));
  return block_cyclic(rng, rng.uniform_int(2, 4));
}

}  // namespace

ComplexMatrix positive_power_bounded(Rng& rng) {
  RealMatrix t = scale_to_radius(positive_piece(rng), 1.0);
  const int extra = rng.uniform_int(0, 2);
  for (int k = 0; k < extra; ++k) {
    const double radius = rng.bernoulli(0.5) ? 1.0 : rng.uniform(0.2, 0.9);
    t = direct_sum(t, scale_to_radius(positive_piece(rng), radius));
  }
  return permute(t, rng.permutation(static_cast<int>(t.rows()))).cast<Complex>();
}

ComplexMatrix monomial_unimodular(Rng& rng) {
  const int n = rng.uniform_int(2, 8);
  std::vector<int> perm;
  do {
    perm = rng.permutation(n);
  } while (std::is_sorted(perm.begin(), perm.end()));

  std::vector<double> diag(n);
  for (double& d : diag) d = std::exp(rng.normal());
  // Normalize each cycle product to 1 by rescaling its first element.
  std::vector<bool> seen(n, false);
  for (int start = 0; start < n; ++start) {
    if (seen[start]) continue;
    double product = 1.0;
    int i = start;
    do {
      seen[i] = true;
      product *= diag[i];
      i = perm[i];
    } while (i != start);
    diag[start] /= product;
  }
  // T e_j = d_{perm(j)} e_{perm(j)}.
  RealMatrix t = RealMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) t(perm[j], j) = diag[perm[j]];
  return t.cast<Complex>();
}

PContractiveSample p_contractive(Rng& rng) {
  const int n = rng.uniform_int(2, 8);
  const auto perm = rng.permutation(n);
  RealMatrix t = RealMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) t(perm[j], j) = rng.bernoulli(0.5) ? 1.0 : -1.0;
  return {t.cast<Complex>(), rng.bernoulli(0.5) ? NormP::One : NormP::Inf};
}

ComplexMatrix primitive_normalized(Rng& rng) {
  const int n = rng.uniform_int(2, 8);
  const auto cycle = rng.permutation(n);
  RealMatrix t = RealMatrix::Zero(n, n);
  for (int i = 0; i < n; ++i) t(cycle[(i + 1) % n], cycle[i]) = rng.uniform(0.1, 1.0);
  const int loop = rng.uniform_int(0, n - 1);
  t(loop, loop) = rng.uniform(0.1, 1.0);
  const double fill = rng.uniform(0.0, 0.7);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (t(i, j) == 0.0 && rng.bernoulli(fill)) t(i, j) = rng.uniform(0.1, 1.0);
  return scale_to_radius(t, 1.0).cast<Complex>();
}

RealMatrix perron_outer_product_oracle(const RealMatrix& t) {
  // The limit of T^(2^j) has trace 1; renormalizing by the trace keeps the
  // rounding drift of the Perron root from compounding.
  RealMatrix power = t / t.trace();
  for (int j = 0; j < 64; ++j) {
    RealMatrix next = power * power;
    next /= next.trace();
    const double change = (next - power).cwiseAbs().maxCoeff();
    power = std::move(next);
    if (change <= 1e-15 * power.cwiseAbs().maxCoeff()) break;
  }
  const Eigen::VectorXd u = power.rowwise().sum();
  const Eigen::VectorXd v = power.colwise().sum().transpose();
  return u * v.transpose() / v.dot(u);
}

namespace {

MemberResult check_positive(const ComplexMatrix& t) {
  const auto sg = SemigroupSpec::discrete(t);
  const auto dec = infinity_decomposition(sg);
  MemberResult r;
  if (!dec.bounded) {
    r.note = "generator produced an unbounded matrix";
    return r;
  }
  const auto& ev = dec.peripheral.eigenvalues;
  double defect = 0.0;
  for (const Complex& lambda : ev) {
    const auto k = root_of_unity_order(std::arg(lambda), 10000, 1e-7);
    if (!k) {
      defect = INFINITY;
      break;
    }
    for (std::int64_t j = 2; j <= *k; ++j) {
      const Complex target = std::polar(1.0, std::arg(lambda) * static_cast<double>(j));
      double best = INFINITY;
      for (const Complex& w : ev) best = std::min(best, std::abs(w - target));
      defect = std::max(defect, best);
    }
  }
  r.margin = defect;
  r.pass = is_cyclic(dec.peripheral, 10000, 1e-7);
  return r;
}

MemberResult check_monomial(const ComplexMatrix& t) {
  const auto gap = sqrt2_gap_check(t, 1e-9);
  MemberResult r;
  r.margin = gap.distance;
  r.pass = gap.gap_ok && gap.distance >= std::sqrt(2.0) - 1e-9;
  return r;
}

MemberResult check_p_contractive(const PContractiveSample& s) {
  MemberResult r;
  const double norm = induced_norm(s.t, s.p);
  const double inv_norm = induced_norm(s.t.inverse(), s.p);
  const auto dec = infinity_decomposition(SemigroupSpec::discrete(s.t, s.p));
  const bool roots = dec.group.kind != GroupKind::TorusClosure;
  const bool all_peripheral = static_cast<int>(std::accumulate(dec.peripheral_multiplicities.begin(),
                                                               dec.peripheral_multiplicities.end(), 0)) ==
                              s.t.rows();
  r.margin = std::max(norm, inv_norm) - 1.0;
  r.pass = norm <= 1.0 + 1e-12 && inv_norm <= 1.0 + 1e-12 && roots && all_peripheral && dec.bounded;
  if (!roots) r.note = "peripheral spectrum contains a non-root of unity";
  return r;
}

MemberResult check_primitive(const ComplexMatrix& t) {
  MemberResult r;
  const auto sg = SemigroupSpec::discrete(t);
  const auto rep = strong_positivity_convergence(sg);
  if (!rep.converges() || !rep.limit || rep.limit_rank.value_or(-1) != 1) {
    r.margin = INFINITY;
    r.note = std::string("strong positivity verdict: ") + to_string(rep.verdict);
    return r;
  }
  const RealMatrix oracle = perron_outer_product_oracle(t.real());
  const ComplexMatrix diff = *rep.limit - oracle.cast<Complex>();
  r.margin = induced_norm(diff, NormP::Inf);
  r.pass = r.margin <= 1e-8;
  return r;
}

const char* margin_name(Kind k) {
  switch (k) {
    case Kind::Positive: return "max cyclic-closure defect";
    case Kind::MonomialUnimodular: return "min ||T - I||_2";
    case Kind::PContractive: return "max (max(||T||_p, ||T^-1||_p) - 1)";
    case Kind::Primitive: return "max ||P_inf - Perron outer product||_inf";
  }
  return "?";
}

Statistics aggregate(Kind kind, int count, std::uint64_t seed, const std::vector<MemberResult>& members) {
  Statistics st;
  st.kind = kind;
  st.count = count;
  st.seed = seed;
  st.margin_name = margin_name(kind);
  const bool minimize = kind == Kind::MonomialUnimodular;
  st.worst_margin = minimize ? INFINITY : 0.0;
  for (int i = 0; i < count; ++i) {
    const auto& m = members[i];
    if (m.pass) {
      ++st.passed;
    } else {
      st.failures.push_back(i);
    }
    st.worst_margin = minimize ? std::min(st.worst_margin, m.margin) : std::max(st.worst_margin, m.margin);
  }
  return st;
}

}  // namespace

MemberResult run_member(Kind kind, std::uint64_t seed, int index) {
  Rng rng(member_seed(seed, static_cast<std::uint64_t>(index)));
  try {
    switch (kind) {
      case Kind::Positive: return check_positive(positive_power_bounded(rng));
      case Kind::MonomialUnimodular: return check_monomial(monomial_unimodular(rng));
      case Kind::PContractive: return check_p_contractive(p_contractive(rng));
      case Kind::Primitive: return check_primitive(primitive_normalized(rng));
    }
  } catch (const std::exception& e) {
    return {false, INFINITY, e.what()};
  }
  return {};
}

Statistics run_serial(Kind kind, int count, std::uint64_t seed) {
  if (count < 1) throw PreconditionError("ensemble count must be >= 1");
  std::vector<MemberResult> members(count);
  for (int i = 0; i < count; ++i) members[i] = run_member(kind, seed, i);
  return aggregate(kind, count, seed, members);
}

Statistics run(Kind kind, int count, std::uint64_t seed) {
  if (count < 1) throw PreconditionError("ensemble count must be >= 1");
  std::vector<MemberResult> members(count);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < count; ++i) members[i] = run_member(kind, seed, i);
  return aggregate(kind, count, seed, members);
}

nlohmann::json Statistics::to_json() const {
  return {{"kind", to_string(kind)},
          {"count", count},
          {"seed", seed},
          {"prng", kPrngName},
          {"passed", passed},
          {"failed", count - passed},
          {"pass_rate", count > 0 ? static_cast<double>(passed) / count : 0.0},
          {"margin_name", margin_name},
          {"worst_margin", std::isfinite(worst_margin) ? nlohmann::json(worst_margin) : nlohmann::json(nullptr)},
          {"failures", failures}};
}

}  // namespace sginf::ensemble
