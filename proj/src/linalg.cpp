// SPDX-License-Identifier: Apache-2.0
#include "chansounder/linalg.hpp"

#include <cmath>
#include <limits>

namespace chansounder::linalg {

namespace {

double norm2(std::span<const cplx> v) {
  double s = 0.0;
  for (const auto& x : v) s += std::norm(x);
  return std::sqrt(s);
}

void scale(std::vector<cplx>& v, double f) {
  for (auto& x : v) x *= f;
}

}  // namespace

bool cholesky_factor(const HermMatrix& m, HermMatrix& lower) {
  detail::require(m.n > 0, "cholesky: empty matrix");
  lower = HermMatrix(m.n);
  for (int j = 0; j < m.n; ++j) {
    double diag = m.at(j, j).real();
    for (int k = 0; k < j; ++k) diag -= std::norm(lower.at(j, k));
    if (!(diag > 0.0) || !std::isfinite(diag)) return false;
    const double ljj = std::sqrt(diag);
    lower.at(j, j) = cplx{ljj, 0.0};
    for (int i = j + 1; i < m.n; ++i) {
      cplx s = m.at(i, j);
      for (int k = 0; k < j; ++k) {
        s -= lower.at(i, k) * std::conj(lower.at(j, k));
      }
      lower.at(i, j) = s / ljj;
    }
  }
  return true;
}

std::vector<cplx> cholesky_solve(const HermMatrix& lower,
                                 std::span<const cplx> b) {
  const int n = lower.n;
  detail::require(static_cast<int>(b.size()) == n,
                  "cholesky_solve: size mismatch");
  std::vector<cplx> y(b.begin(), b.end());
  // Forward: L y = b.
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < i; ++k) y[i] -= lower.at(i, k) * y[k];
    y[i] /= lower.at(i, i);
  }
  // Backward: L^H x = y.
  for (int i = n - 1; i >= 0; --i) {
    for (int k = i + 1; k < n; ++k) {
      y[i] -= std::conj(lower.at(k, i)) * y[k];
    }
    y[i] /= lower.at(i, i);
  }
  return y;
}

std::vector<cplx> matvec(const HermMatrix& m, std::span<const cplx> x) {
  detail::require(static_cast<int>(x.size()) == m.n, "matvec: size mismatch");
  std::vector<cplx> y(x.size(), cplx{0.0, 0.0});
  for (int i = 0; i < m.n; ++i) {
    cplx s{0.0, 0.0};
    for (int j = 0; j < m.n; ++j) s += m.at(i, j) * x[j];
    y[static_cast<std::size_t>(i)] = s;
  }
  return y;
}

double condition_estimate(const HermMatrix& m, const HermMatrix& lower,
                          int iterations) {
  const int n = m.n;
  std::vector<cplx> v(static_cast<std::size_t>(n),
                      cplx{1.0 / std::sqrt(static_cast<double>(n)), 0.0});

  // Largest eigenvalue: power iteration on m.
  double lam_max = 0.0;
  std::vector<cplx> w = v;
  for (int it = 0; it < iterations; ++it) {
    w = matvec(m, w);
    const double nw = norm2(w);
    if (nw == 0.0 || !std::isfinite(nw)) {
      return std::numeric_limits<double>::infinity();
    }
    lam_max = nw;
    scale(w, 1.0 / nw);
  }

  // Smallest eigenvalue: inverse iteration via the Cholesky factor.
  double inv_lam_min = 0.0;
  w = v;
  for (int it = 0; it < iterations; ++it) {
    w = cholesky_solve(lower, w);
    const double nw = norm2(w);
    if (nw == 0.0 || !std::isfinite(nw)) {
      return std::numeric_limits<double>::infinity();
    }
    inv_lam_min = nw;
    scale(w, 1.0 / nw);
  }

  return lam_max * inv_lam_min;
}

}  // namespace chansounder::linalg
