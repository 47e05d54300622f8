#pragma once

// Single-excitation sector: the non-Hermitian matrix H_nm = -i g0 e^{i phi |n-m|},
// its dispersion, eigenmodes, and the inverse operator K with its discrete
// Laplacian approximation.

#include <algorithm>
#include <cmath>
#include <vector>

#include "qhb/lapack.hpp"
#include "qhb/types.hpp"

namespace qhb {

inline Mat build_single_hamiltonian(const ModelParams& p) {
  p.validate();
  const int n = p.n_atoms;
  const Complex unit(0.0, -p.gamma0);
  Mat h(n, n);
  for (int col = 0; col < n; ++col)
    for (int row = 0; row < n; ++row)
      h(row, col) = unit * std::exp(Complex(0.0, p.phi * std::abs(row - col)));
  return h;
}

// O(N) application of H via the two exponential-kernel prefix recursions
// f_n = e^{i phi} f_{n-1} + v_n (forward) and its backward analogue;
// sum_m e^{i phi |n-m|} v_m = f_n + b_n - v_n.
inline void apply_single_inplace(const ModelParams& p, const Vec& v, Vec& out) {
  const int n = p.n_atoms;
  const Complex q = std::exp(Complex(0.0, p.phi));
  const Complex unit(0.0, -p.gamma0);
  out.resize(n);
  Complex f(0.0, 0.0);
  for (int i = 0; i < n; ++i) {
    f = q * f + v[i];
    out[i] = f;
  }
  Complex b(0.0, 0.0);
  for (int i = n - 1; i >= 0; --i) {
    b = q * b + v[i];
    out[i] = unit * (out[i] + b - v[i]);
  }
}

inline Vec apply_single(const ModelParams& p, const Vec& v) {
  Vec out;
  apply_single_inplace(p, v, out);
  return out;
}

// Lower-branch polariton dispersion, eps - omega0 = g0 sin(phi) / (cos kd - cos phi).
// kd in (0, pi], away from the light-line pole at kd = phi.
inline double dispersion(double kd, const ModelParams& p,
                         double pole_tol = 1e-9) {
  if (!(kd > 0.0 && kd <= kPi))
    throw ConfigError("dispersion: kd must lie in (0, pi]");
  const double denom = std::cos(kd) - std::cos(p.phi);
  if (std::abs(denom) < pole_tol)
    throw SolverError("dispersion: light-line pole, |cos kd - cos phi| < tol");
  return p.gamma0 * std::sin(p.phi) / denom;
}

inline Complex bilinear_dot(const Vec& a, const Vec& b) {
  return (a.array() * b.array()).sum();
}

inline Vec reflected(const Vec& v) { return v.reverse(); }

// Bilinear normalization, sum psi^2 = 1 (principal square root). Returns
// false when the bilinear norm is numerically zero (quasi-defective mode);
// the vector is then left with unit 2-norm.
inline bool bilinear_normalize(Vec& v, double tol = 1e-12) {
  const Complex s = bilinear_dot(v, v);
  if (std::abs(s) < tol) {
    v.normalize();
    return false;
  }
  v /= std::sqrt(s);
  return true;
}

// Deterministic overall sign: largest-magnitude component gets Re > 0.
inline void canonical_sign(Vec& v) {
  int imax = 0;
  double best = -1.0;
  for (int i = 0; i < v.size(); ++i) {
    const double m = std::norm(v[i]);
    if (m > best) {
      best = m;
      imax = i;
    }
  }
  const Complex c = v[imax];
  if (c.real() < 0.0 || (c.real() == 0.0 && c.imag() < 0.0)) v = -v;
}

struct FourierPeak {
  double k_max = 0.0;  // refined argmax of |u(k)| on (0, pi]
  int bin = 0;         // 1-based grid bin of the raw argmax
  bool dc_flag = false;  // peak at the lowest bin: j = 0 would be unphysical
};

// Argmax of |u(k)|, u(k) = sum_x e^{-ikx} u_x, on the zero-padded grid
// k_m = pi m / (grid_factor N), m = 1..grid_factor*N, with parabolic
// interpolation around the peak.
inline FourierPeak dominant_wavevector(const Vec& u, int grid_factor = 4) {
  const int n = static_cast<int>(u.size());
  if (n == 0 || u.norm() == 0.0)
    throw ConfigError("dominant_wavevector: zero vector");
  const int m = grid_factor * n;
  std::vector<double> mag(m);
  int best = 0;
  for (int g = 0; g < m; ++g) {
    const double k = kPi * (g + 1) / m;
    Complex acc(0.0, 0.0);
    for (int x = 0; x < n; ++x)
      acc += std::exp(Complex(0.0, -k * (x + 1))) * u[x];
    mag[g] = std::abs(acc);
    if (mag[g] > mag[best]) best = g;
  }
  FourierPeak peak;
  peak.bin = best + 1;
  double k = kPi * (best + 1) / m;
  if (best > 0 && best < m - 1) {
    const double a = mag[best - 1], b = mag[best], c = mag[best + 1];
    const double denom = a - 2.0 * b + c;
    if (std::abs(denom) > 1e-300) {
      double shift = 0.5 * (a - c) / denom;
      shift = std::clamp(shift, -0.5, 0.5);
      k += shift * kPi / m;
    }
  }
  peak.k_max = k;
  peak.dc_flag = (peak.bin == 1);
  return peak;
}

// Mirror parity via the bilinear overlap <u, Ru> / <u, u>; |overlap| must
// exceed the threshold to assign even/odd.
inline Parity mirror_parity(const Vec& u, double* overlap_mag = nullptr,
                            double threshold = 0.9) {
  const Complex nrm = bilinear_dot(u, u);
  if (std::abs(nrm) < 1e-12) {
    if (overlap_mag) *overlap_mag = 0.0;
    return Parity::Indefinite;
  }
  const Complex ov = bilinear_dot(u, reflected(u)) / nrm;
  if (overlap_mag) *overlap_mag = std::abs(ov);
  if (std::abs(ov) < threshold) return Parity::Indefinite;
  return ov.real() >= 0.0 ? Parity::Even : Parity::Odd;
}

// Full single-excitation eigensolve: bilinear normalization, ascending Re
// ordering, standing-wave labels j = round(k_max N / pi) (clamped to 1..N,
// dc-flagged when the peak sits at the lowest bin) and mirror parity.
inline std::vector<PolaritonMode> eigensolve_single(const Mat& h) {
  const int n = static_cast<int>(h.rows());
  auto eig = lapack::zgeev(h, true);
  std::vector<PolaritonMode> modes(n);
  for (int i = 0; i < n; ++i) {
    PolaritonMode& m = modes[i];
    m.energy = eig.values[i];
    m.vector = eig.vectors.col(i);
    m.quasi_defective = !bilinear_normalize(m.vector);
    canonical_sign(m.vector);
    const FourierPeak peak = dominant_wavevector(m.vector);
    int j = static_cast<int>(std::lround(peak.k_max * n / kPi));
    m.dc_labeled = peak.dc_flag || j < 1;
    m.index_j = std::clamp(j, 1, n);
    m.parity = m.quasi_defective ? Parity::Indefinite : mirror_parity(m.vector);
  }
  std::sort(modes.begin(), modes.end(),
            [](const PolaritonMode& a, const PolaritonMode& b) {
              if (a.energy.real() != b.energy.real())
                return a.energy.real() < b.energy.real();
              return a.energy.imag() < b.energy.imag();
            });
  return modes;
}

inline std::vector<PolaritonMode> eigensolve_single(const ModelParams& p) {
  return eigensolve_single(build_single_hamiltonian(p));
}

// Discrete second-derivative matrix of the open chain: tridiag(1, -2, 1)
// with corner diagonal entries -1.
inline RealMat laplacian_matrix(int n) {
  RealMat d2 = RealMat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    d2(i, i) = -2.0;
    if (i > 0) d2(i, i - 1) = 1.0;
    if (i + 1 < n) d2(i, i + 1) = 1.0;
  }
  d2(0, 0) = -1.0;
  d2(n - 1, n - 1) = -1.0;
  return d2;
}

enum class KOperatorMode { Exact, Laplacian };

// K = H^{-1} (exact) or its short-period approximation d^2 / (2 phi g0).
inline Mat build_k_operator(const ModelParams& p, KOperatorMode mode) {
  p.validate();
  if (mode == KOperatorMode::Exact) {
    lapack::ZLu lu(build_single_hamiltonian(p));
    return lu.inverse();
  }
  const double scale = 1.0 / (2.0 * p.phi * p.gamma0);
  return laplacian_matrix(p.n_atoms).cast<Complex>() * scale;
}

}  // namespace qhb
