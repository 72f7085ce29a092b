#include "sginf/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "sginf/errors.hpp"

namespace sginf {

const char* to_string(NormP p) {
  switch (p) {
    case NormP::One: return "1";
    case NormP::Two: return "2";
    case NormP::Inf: return "inf";
  }
  return "?";
}

void validate_matrix(const ComplexMatrix& m) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    std::ostringstream os;
    os << "matrix must be square and non-empty, got " << m.rows() << "x" << m.cols();
    throw InputError(os.str());
  }
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) {
        std::ostringstream os;
        os << "non-finite entry at (" << i << "," << j << ")";
        throw InputError(os.str());
      }
}

double norm2(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

namespace {

Eigen::VectorXd singular_values(const ComplexMatrix& m) {
  if (m.rows() <= 16) return Eigen::JacobiSVD<ComplexMatrix>(m).singularValues();
  return Eigen::BDCSVD<ComplexMatrix>(m).singularValues();
}

// Right-singular vectors for the `k` smallest singular values of `m`.
ComplexMatrix smallest_right_singular(const ComplexMatrix& m, int k) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullV);
  return svd.matrixV().rightCols(k);
}

constexpr double kMinBasisRcond = 1e-10;

struct Cluster {
  Complex center;
  int mult;
};

// Greedy union of eigenvalues within tol (transitive closure).
std::vector<Cluster> cluster_eigenvalues(const ComplexVector& ev, double tol) {
  const int n = static_cast<int>(ev.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(ev(i) - ev(j)) <= tol) parent[find(i)] = find(j);

  std::vector<int> root_to_cluster(n, -1);
  std::vector<Cluster> clusters;
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    if (root_to_cluster[r] < 0) {
      root_to_cluster[r] = static_cast<int>(clusters.size());
      clusters.push_back({Complex(0.0), 0});
    }
    auto& c = clusters[root_to_cluster[r]];
    c.center += ev(i);
    c.mult += 1;
  }
  for (auto& c : clusters) c.center /= static_cast<double>(c.mult);
  // Deterministic order: by modulus descending, then argument.
  std::sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
    const double ma = std::abs(a.center), mb = std::abs(b.center);
    if (ma != mb) return ma > mb;
    return std::arg(a.center) < std::arg(b.center);
  });
  return clusters;
}

}  // namespace

ComplexVector eigenvalues(const ComplexMatrix& m) {
  validate_matrix(m);
  Eigen::ComplexEigenSolver<ComplexMatrix> ces(m, /*computeEigenvectors=*/false);
  if (ces.info() != Eigen::Success) {
    throw NumericalError("eigenvalue iteration did not converge", std::nan(""));
  }
  return ces.eigenvalues();
}

double spectral_radius(const ComplexMatrix& m) {
  return eigenvalues(m).cwiseAbs().maxCoeff();
}

int SpectralDecomposition::dim() const {
  return items.empty() ? 0 : static_cast<int>(items.front().projection.rows());
}

ComplexMatrix SpectralDecomposition::projection_near(Complex lambda, double tol) const {
  const int n = dim();
  ComplexMatrix p = ComplexMatrix::Zero(n, n);
  for (const auto& it : items)
    if (std::abs(it.eigenvalue - lambda) <= tol) p += it.projection;
  return p;
}

const SpectralItem* SpectralDecomposition::nearest(Complex lambda) const {
  const SpectralItem* best = nullptr;
  double dist = INFINITY;
  for (const auto& it : items) {
    const double d = std::abs(it.eigenvalue - lambda);
    if (d < dist) {
      dist = d;
      best = &it;
    }
  }
  return best;
}

SpectralDecomposition eig_decompose(const ComplexMatrix& m, const EigOptions& opts) {
  validate_matrix(m);
  const int n = static_cast<int>(m.rows());
  const double mnorm = norm2(m);

  SpectralDecomposition out;
  out.cluster_tol = opts.cluster_tol.value_or(1e-8 * mnorm);
  out.nilpotent_tol = opts.nilpotent_tol.value_or(1e-8 * mnorm);
  if (out.cluster_tol < 0.0) throw InputError("cluster_tol must be non-negative");

  Eigen::ComplexEigenSolver<ComplexMatrix> ces(m, false);
  if (ces.info() != Eigen::Success) {
    throw NumericalError("eigenvalue iteration did not converge", std::nan(""));
  }
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);

  // Defective eigenvalues come back from the QR iteration spread by about
  // eps^(1/k); without an explicit tolerance, widen the clustering until the
  // generalized eigenvectors form a well-conditioned basis.
  std::vector<double> tols{out.cluster_tol};
  if (!opts.cluster_tol) {
    for (double f : {1e-6, 1e-5, 1e-4, 1e-3}) tols.push_back(f * mnorm);
  }
  std::vector<Cluster> clusters;
  ComplexMatrix basis(n, n);
  Eigen::FullPivLU<ComplexMatrix> lu;
  double rcond = 0.0;
  for (double tol : tols) {
    out.cluster_tol = tol;
    clusters = cluster_eigenvalues(ces.eigenvalues(), tol);
    int col = 0;
    for (const auto& c : clusters) {
      const ComplexMatrix shifted_pow = matrix_power(m - c.center * id, c.mult);
      basis.middleCols(col, c.mult) = smallest_right_singular(shifted_pow, c.mult);
      col += c.mult;
    }
    lu.compute(basis);
    rcond = lu.rcond();
    if (rcond > kMinBasisRcond) break;
  }
  if (!(rcond > kMinBasisRcond)) {
    throw NumericalError("generalized eigenvector basis is numerically singular "
                         "(try a larger cluster_tol)",
                         rcond);
  }
  const ComplexMatrix inv = lu.inverse();

  // Pole order test on N / ||M|| so the threshold is scale free.
  const double scale = mnorm > 0.0 ? mnorm : 1.0;
  const double rel_nil = out.nilpotent_tol / scale;

  int col = 0;
  for (const auto& c : clusters) {
    SpectralItem item;
    item.eigenvalue = c.center;
    item.algebraic_mult = c.mult;
    item.projection = basis.middleCols(col, c.mult) * inv.middleRows(col, c.mult);
    item.nilpotent = (m - c.center * id) * item.projection;

    const ComplexMatrix scaled = item.nilpotent / scale;
    ComplexMatrix power = scaled;
    int order = 1;
    while (order <= c.mult && norm2(power) > rel_nil) {
      power = power * scaled;
      ++order;
    }
    item.pole_order = order;
    item.geometric_mult =
        order == 1 ? c.mult : c.mult - numerical_rank_abs(item.nilpotent, out.nilpotent_tol);
    out.items.push_back(std::move(item));
    col += c.mult;
  }
  return out;
}

ComplexMatrix resolvent(const ComplexMatrix& m, Complex mu, double tol) {
  validate_matrix(m);
  const auto ev = eigenvalues(m);
  Eigen::Index idx = 0;
  (ev.array() - mu).abs().minCoeff(&idx);
  const double scale = std::max(1.0, norm2(m));
  if (std::abs(ev(idx) - mu) <= tol * scale) {
    std::ostringstream os;
    os << "resolvent requested at spectral point; nearest eigenvalue " << ev(idx);
    throw SpectralPointError(os.str(), ev(idx));
  }
  const auto n = m.rows();
  const ComplexMatrix shifted = mu * ComplexMatrix::Identity(n, n) - m;
  Eigen::PartialPivLU<ComplexMatrix> lu(shifted);
  ComplexMatrix r = lu.inverse();
  const double res = (shifted * r - ComplexMatrix::Identity(n, n)).norm();
  const double rel = res / (shifted.norm() * r.norm());
  if (!std::isfinite(res) || rel > 1e-10) {
    throw NumericalError("resolvent solve failed", res);
  }
  return r;
}

double induced_norm(const ComplexMatrix& m, NormP p) {
  switch (p) {
    case NormP::One: return m.cwiseAbs().colwise().sum().maxCoeff();
    case NormP::Inf: return m.cwiseAbs().rowwise().sum().maxCoeff();
    case NormP::Two: return norm2(m);
  }
  return 0.0;
}

double log_norm_inf(const RealMatrix& m) {
  double worst = -INFINITY;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double row = m(i, i);
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (j != i) row += std::abs(m(i, j));
    worst = std::max(worst, row);
  }
  return worst;
}

double log_norm_inf(const ComplexMatrix& m) {
  double worst = -INFINITY;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    double row = m(i, i).real();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      if (j != i) row += std::abs(m(i, j));
    worst = std::max(worst, row);
  }
  return worst;
}

double log_norm(const ComplexMatrix& m, NormP p) {
  switch (p) {
    case NormP::Inf: return log_norm_inf(m);
    case NormP::One: return log_norm_inf(ComplexMatrix(m.transpose()));
    case NormP::Two: {
      const ComplexMatrix herm = (m + m.adjoint()) / 2.0;
      Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(herm, Eigen::EigenvaluesOnly);
      return es.eigenvalues().maxCoeff();
    }
  }
  return 0.0;
}

ComplexMatrix matrix_exponential(const ComplexMatrix& a, double t) {
  validate_matrix(a);
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("exponential time must be finite and >= 0");
  if (t == 0.0) return ComplexMatrix::Identity(a.rows(), a.cols());
  const ComplexMatrix ta = t * a;
  ComplexMatrix e = ta.exp();
  if (!e.allFinite()) {
    throw RangeError("matrix exponential overflowed", induced_norm(ta, NormP::One));
  }
  return e;
}

int numerical_rank(const ComplexMatrix& m, double rel_tol) {
  if (m.size() == 0) return 0;
  const auto sv = singular_values(m);
  const double smax = sv(0);
  if (smax == 0.0) return 0;
  return static_cast<int>((sv.array() > rel_tol * smax).count());
}

int numerical_rank_abs(const ComplexMatrix& m, double abs_tol) {
  if (m.size() == 0) return 0;
  const auto sv = singular_values(m);
  return static_cast<int>((sv.array() > abs_tol).count());
}

ComplexMatrix matrix_power(const ComplexMatrix& t, long long n) {
  if (n < 0) throw DomainError("matrix power must be non-negative");
  ComplexMatrix result = ComplexMatrix::Identity(t.rows(), t.cols());
  ComplexMatrix base = t;
  bool first = true;
  while (n > 0) {
    if (n & 1) {
      if (first) {
        result = base;
        first = false;
      } else {
        result = result * base;
      }
    }
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}

}  // namespace sginf
