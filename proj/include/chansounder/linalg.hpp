// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "chansounder/types.hpp"

// Minimal dense Hermitian solver for the Tikhonov normal equations in the
// deconvolver (systems are small, <= a few hundred unknowns, so an in-house
// O(n^3) Cholesky keeps the dependency surface flat).

namespace chansounder::linalg {

// Row-major n x n Hermitian matrix.
struct HermMatrix {
  int n = 0;
  std::vector<cplx> a;  // size n * n

  explicit HermMatrix(int n_) : n(n_), a(static_cast<std::size_t>(n_) * n_) {}
  cplx& at(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  const cplx& at(int i, int j) const {
    return a[static_cast<std::size_t>(i) * n + j];
  }
};

// Cholesky factorization M = L L^H of a Hermitian positive-definite matrix.
// Returns false (leaving the factor partially written) if a pivot is not
// strictly positive, i.e. the matrix is numerically singular or indefinite.
bool cholesky_factor(const HermMatrix& m, HermMatrix& lower);

// Solve L L^H x = b given the factor from cholesky_factor.
std::vector<cplx> cholesky_solve(const HermMatrix& lower,
                                 std::span<const cplx> b);

// 2-norm condition estimate of a Hermitian PD matrix: largest eigenvalue by
// power iteration on m, smallest by inverse iteration through the Cholesky
// factor.  Deterministic (fixed start vector, fixed iteration count).
double condition_estimate(const HermMatrix& m, const HermMatrix& lower,
                          int iterations = 40);

// y = M x for a Hermitian matrix in full storage.
std::vector<cplx> matvec(const HermMatrix& m, std::span<const cplx> x);

}  // namespace chansounder::linalg
