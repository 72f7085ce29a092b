#pragma once

#include <cmath>
#include <random>

#include "sginf/spectral.hpp"

namespace testutil {

using sginf::Complex;
using sginf::ComplexMatrix;

inline ComplexMatrix random_complex(std::mt19937_64& gen, int n, double scale = 1.0) {
  std::normal_distribution<double> nd;
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = scale * Complex(nd(gen), nd(gen));
  return m;
}

inline ComplexMatrix random_real(std::mt19937_64& gen, int n, double scale = 1.0) {
  std::normal_distribution<double> nd;
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = scale * nd(gen);
  return m;
}

inline double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

inline ComplexMatrix real_matrix(std::initializer_list<std::initializer_list<double>> rows) {
  const int n = static_cast<int>(rows.size());
  ComplexMatrix m(n, static_cast<int>(rows.begin()->size()));
  int i = 0;
  for (const auto& r : rows) {
    int j = 0;
    for (double x : r) m(i, j++) = x;
    ++i;
  }
  return m;
}

inline ComplexMatrix eye(int n) { return ComplexMatrix::Identity(n, n); }

}  // namespace testutil
