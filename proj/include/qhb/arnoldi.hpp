#pragma once

// Shift-invert Arnoldi for interior eigenpairs. The Krylov basis is grown
// incrementally (no restarts, no deflation: orthogonal-projection deflation is
// unreliable for non-normal operators, and the operators here are complex
// symmetric). The solve callback applies (A - sigma I)^{-1}; the apply
// callback applies A and verifies every candidate on the original operator.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "qhb/lapack.hpp"
#include "qhb/types.hpp"

namespace qhb {

struct ShiftInvertOptions {
  Complex shift;
  int count = 6;
  double tol = 1e-8;  // relative residual on the original operator
  int max_basis = 0;  // 0: min(dim, max(240, 8*count + 40))
  unsigned seed = 0x9e3779b9;
};

struct RitzPair {
  Complex value;
  Vec vector;
  double residual;  // ||A x - lambda x|| / |lambda|
};

inline std::vector<RitzPair> shift_invert_arnoldi(
    Eigen::Index dim, const std::function<Vec(const Vec&)>& solve,
    const std::function<Vec(const Vec&)>& apply,
    const ShiftInvertOptions& opts) {
  const int want = opts.count;
  const int max_m = static_cast<int>(std::min<Eigen::Index>(
      dim,
      opts.max_basis > 0 ? opts.max_basis : std::max(240, 8 * want + 40)));
  if (want > max_m)
    throw ConfigError("shift_invert_arnoldi: count exceeds the basis limit");

  std::mt19937 rng(opts.seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vec v0(dim);
  for (Eigen::Index i = 0; i < dim; ++i) v0[i] = Complex(dist(rng), dist(rng));
  v0.normalize();

  Mat basis(dim, max_m + 1);
  Mat hess = Mat::Zero(max_m + 1, max_m);
  basis.col(0) = v0;
  int built = 0;
  bool breakdown = false;

  int m_target = std::min(max_m, std::max(40, 3 * want + 20));
  double worst = 1e300;
  while (true) {
    for (int k = built; k < m_target; ++k) {
      Vec w = solve(basis.col(k));
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i <= k; ++i) {
          const Complex c = basis.col(i).dot(w);
          hess(i, k) += c;
          w -= c * basis.col(i);
        }
      }
      const double nw = w.norm();
      hess(k + 1, k) = nw;
      built = k + 1;
      if (nw < 1e-12) {
        breakdown = true;  // invariant subspace captured
        break;
      }
      basis.col(k + 1) = w / nw;
    }

    // Ritz extraction; largest |theta| lie closest to the shift.
    auto small = lapack::zgeev(hess.topLeftCorner(built, built), true);
    std::vector<int> order(built);
    for (int i = 0; i < built; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return std::abs(small.values[a]) > std::abs(small.values[b]);
    });

    std::vector<RitzPair> found;
    worst = 0.0;
    for (int rank = 0; rank < built && static_cast<int>(found.size()) < want;
         ++rank) {
      const Complex theta = small.values[order[rank]];
      if (std::abs(theta) < 1e-14) break;
      Vec x = basis.leftCols(built) * small.vectors.col(order[rank]);
      x.normalize();
      const Complex lambda = opts.shift + 1.0 / theta;
      const Vec ax = apply(x);
      const double res =
          (ax - lambda * x).norm() / std::max(1e-300, std::abs(lambda));
      worst = std::max(worst, res);
      if (res < opts.tol) found.push_back({lambda, x, res});
    }
    if (static_cast<int>(found.size()) >= want) {
      std::sort(found.begin(), found.end(),
                [&](const RitzPair& a, const RitzPair& b) {
                  return std::abs(a.value - opts.shift) <
                         std::abs(b.value - opts.shift);
                });
      found.resize(want);
      return found;
    }
    if (breakdown || built >= max_m)
      throw SolverError("shift-invert Arnoldi: " + std::to_string(found.size()) +
                        "/" + std::to_string(want) +
                        " eigenpairs at basis size " + std::to_string(built) +
                        "; worst residual among checked candidates " +
                        std::to_string(worst));
    m_target = std::min(max_m, m_target + std::max(20, m_target / 2));
  }
}

}  // namespace qhb
