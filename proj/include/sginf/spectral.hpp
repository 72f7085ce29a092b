#pragma once

// Dense complex spectral machinery: eigen-decomposition with spectral
// projections and pole orders, resolvents, induced and logarithmic norms,
// matrix exponentials, numerical rank.

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace sginf {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;

/// Which ell^p norm the ambient space carries.
enum class NormP { One, Two, Inf };

const char* to_string(NormP p);

/// Throws InputError unless `m` is square, non-empty and finite.
void validate_matrix(const ComplexMatrix& m);

struct SpectralItem {
  Complex eigenvalue;
  int algebraic_mult = 0;
  int geometric_mult = 0;
  ComplexMatrix projection;  // P_lambda
  ComplexMatrix nilpotent;   // N_lambda = (M - lambda) P_lambda
  int pole_order = 1;
};

struct SpectralDecomposition {
  std::vector<SpectralItem> items;
  double cluster_tol = 0.0;
  double nilpotent_tol = 0.0;

  int dim() const;

  /// Sum of the projections of all items whose eigenvalue lies within
  /// `tol` of `lambda`. Zero matrix when nothing matches.
  ComplexMatrix projection_near(Complex lambda, double tol) const;

  /// Item with eigenvalue closest to `lambda`; nullptr if empty.
  const SpectralItem* nearest(Complex lambda) const;
};

struct EigOptions {
  /// Eigenvalues closer than this are merged. Default 1e-8 * ||M||_2.
  std::optional<double> cluster_tol;
  /// Threshold for N^k == 0 when deciding the pole order. Default 1e-8 * ||M||_2.
  std::optional<double> nilpotent_tol;
};

/// Block-diagonalizes `m` over its generalized eigenspaces.
///
/// Eigenvalues from the Schur form are clustered (greedy union within
/// cluster_tol). For each cluster of multiplicity k the generalized
/// eigenspace is taken as the k smallest right-singular directions of
/// (M - lambda)^k; the projections then come from the inverse of the
/// combined basis, so sum(P) == I and M == sum(lambda P + N) hold by
/// construction. Throws NumericalError if the eigen-solver fails or the
/// basis is singular.
SpectralDecomposition eig_decompose(const ComplexMatrix& m, const EigOptions& opts = {});

/// Eigenvalues only (Schur form), in solver order.
ComplexVector eigenvalues(const ComplexMatrix& m);

double spectral_radius(const ComplexMatrix& m);

/// (mu I - M)^{-1}. Throws SpectralPointError when mu is within
/// `tol * max(1, ||M||_2)` of an eigenvalue.
ComplexMatrix resolvent(const ComplexMatrix& m, Complex mu, double tol = 1e-13);

double induced_norm(const ComplexMatrix& m, NormP p);

/// mu_inf(M) = max_i (Re M_ii + sum_{j != i} |M_ij|).
double log_norm_inf(const RealMatrix& m);
double log_norm_inf(const ComplexMatrix& m);

/// Logarithmic norm matching the induced p-norm.
double log_norm(const ComplexMatrix& m, NormP p);

/// e^{tA} by scaling and squaring with a [13/13] Pade approximant.
/// Throws DomainError for t < 0 and RangeError when the result overflows.
ComplexMatrix matrix_exponential(const ComplexMatrix& a, double t);

/// Number of singular values strictly above rel_tol * sigma_max; 0 for M == 0.
int numerical_rank(const ComplexMatrix& m, double rel_tol);

/// Number of singular values strictly above an absolute threshold.
int numerical_rank_abs(const ComplexMatrix& m, double abs_tol);

/// T^n by repeated squaring.
ComplexMatrix matrix_power(const ComplexMatrix& t, long long n);

/// Largest singular value.
double norm2(const ComplexMatrix& m);

}  // namespace sginf
