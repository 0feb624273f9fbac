#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace rbandits {

// Solves A x = b for several right-hand sides by Gaussian elimination with
// partial pivoting. A is n x n row-major and is destroyed; each entry of
// `rhs` is overwritten with its solution. Throws if A is numerically
// singular. Sizes here are small (|X| up to a few hundred), so a dense
// direct solve is the reference path.
inline void solve_dense_inplace(std::vector<double>& a, std::size_t n,
                                std::vector<std::vector<double>*> rhs) {
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    double best = std::fabs(a[col * n + col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      double v = std::fabs(a[r * n + col]);
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (!(best > 0.0) || !std::isfinite(best))
      throw std::runtime_error("solve_dense: singular matrix");
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j)
        std::swap(a[col * n + j], a[piv * n + j]);
      for (auto* b : rhs) std::swap((*b)[col], (*b)[piv]);
    }
    double inv = 1.0 / a[col * n + col];
    for (std::size_t r = col + 1; r < n; ++r) {
      double f = a[r * n + col] * inv;
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) a[r * n + j] -= f * a[col * n + j];
      for (auto* b : rhs) (*b)[r] -= f * (*b)[col];
    }
  }
  for (auto* b : rhs) {
    for (std::size_t i = n; i-- > 0;) {
      double s = (*b)[i];
      for (std::size_t j = i + 1; j < n; ++j) s -= a[i * n + j] * (*b)[j];
      (*b)[i] = s / a[i * n + i];
    }
  }
}

}  // namespace rbandits
