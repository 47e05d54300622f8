#pragma once

// Reference Harper model and the self-induced generalized AAH model:
// finite-lattice spectra, band counting, Hofstadter and semi-analytic
// butterflies.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "qhb/lapack.hpp"
#include "qhb/model.hpp"
#include "qhb/spectral_analysis.hpp"
#include "qhb/types.hpp"

namespace qhb {

// ---------------------------------------------------------------------------
// Harper equation: chi_{x+1} + chi_{x-1} + 2 cos(2 pi x alpha - k_y) chi_x
// ---------------------------------------------------------------------------

enum class Boundary { Open, Periodic };

struct HarperParams {
  int n_sites = 100;
  double alpha = 0.0;  // flux per plaquette
  double k_y = 0.0;
  Boundary boundary = Boundary::Open;

  void validate() const {
    if (n_sites < 2) throw ConfigError("harper: n_sites must be >= 2");
    if (alpha < 0.0 || alpha > 1.0)
      throw ConfigError("harper: alpha must lie in [0, 1]");
  }
};

struct HarperSpectrum {
  RealVec energies;  // ascending
  RealMat vectors;   // columns
  RealVec iprs;
};

inline HarperSpectrum harper_spectrum(const HarperParams& p) {
  p.validate();
  const int n = p.n_sites;
  RealMat h = RealMat::Zero(n, n);
  for (int x = 0; x < n; ++x) {
    h(x, x) = 2.0 * std::cos(2.0 * kPi * (x + 1) * p.alpha - p.k_y);
    if (x + 1 < n) {
      h(x, x + 1) = 1.0;
      h(x + 1, x) = 1.0;
    }
  }
  if (p.boundary == Boundary::Periodic) {
    h(0, n - 1) += 1.0;
    h(n - 1, 0) += 1.0;
  }
  auto eig = lapack::dsyev(std::move(h), true);
  HarperSpectrum out;
  out.energies = std::move(eig.values);
  out.vectors = std::move(eig.vectors);
  out.iprs.resize(n);
  for (int i = 0; i < n; ++i)
    out.iprs[i] = ipr(out.vectors.col(i).cast<Complex>());
  return out;
}

// Band counting by the largest spacing-ratio drop: the q-1 gaps of a rational
// flux p/q are orders of magnitude above the intra-band spacings. (A plain
// "gap > 10 x median spacing" rule breaks on periodic rings, where +-k
// degeneracy makes the median spacing collapse.)
inline int count_bands(const RealVec& sorted_energies, int max_gaps = 10,
                       double min_ratio = 8.0) {
  const int n = static_cast<int>(sorted_energies.size());
  if (n < 2) return 1;
  std::vector<double> s(n - 1);
  for (int i = 0; i + 1 < n; ++i)
    s[i] = sorted_energies[i + 1] - sorted_energies[i];
  std::sort(s.begin(), s.end(), std::greater<double>());
  int best_k = 0;
  double best_r = 0.0;
  for (int k = 0; k < std::min<int>(max_gaps, n - 2); ++k) {
    const double r = s[k + 1] > 1e-14 ? s[k] / s[k + 1]
                                      : (s[k] > 1e-14 ? 1e300 : 1.0);
    if (r > best_r) {
      best_r = r;
      best_k = k + 1;
    }
  }
  return best_r < min_ratio ? 1 : best_k + 1;
}

// Full flux sweep. energy_aligned carries the raw Harper energy here (the
// reference butterfly is plotted unaligned); localization is the IPR and
// is_edge marks localized in-gap states.
inline std::vector<ButterflyPoint> hofstadter_butterfly(
    int n_sites, double alpha_step, double k_y,
    Boundary boundary = Boundary::Open) {
  if (alpha_step <= 0.0) throw ConfigError("hofstadter: alpha_step must be > 0");
  std::vector<ButterflyPoint> points;
  const int steps = static_cast<int>(std::lround(1.0 / alpha_step));
  for (int s = 0; s <= steps; ++s) {
    const double alpha = s * alpha_step;
    HarperParams p{.n_sites = n_sites,
                   .alpha = std::min(alpha, 1.0),
                   .k_y = k_y,
                   .boundary = boundary};
    const HarperSpectrum spec = harper_spectrum(p);
    const int n = n_sites;
    std::vector<double> ipr_sorted(spec.iprs.data(), spec.iprs.data() + n);
    std::sort(ipr_sorted.begin(), ipr_sorted.end());
    const double med_ipr = ipr_sorted[n / 2];
    std::vector<double> spacings(std::max(0, n - 1));
    for (int i = 0; i + 1 < n; ++i)
      spacings[i] = spec.energies[i + 1] - spec.energies[i];
    std::vector<double> sp_sorted = spacings;
    std::sort(sp_sorted.begin(), sp_sorted.end());
    const double med_sp = sp_sorted.empty() ? 0.0 : sp_sorted[sp_sorted.size() / 2];
    for (int i = 0; i < n; ++i) {
      ButterflyPoint pt;
      pt.flux = p.alpha;
      pt.energy_aligned = spec.energies[i];
      pt.localization = spec.iprs[i];
      const bool gap_below = i == 0 || spacings[i - 1] > 20.0 * med_sp;
      const bool gap_above = i == n - 1 || spacings[i] > 20.0 * med_sp;
      pt.is_edge = gap_below && gap_above && i != 0 && i != n - 1 &&
                   spec.iprs[i] > std::max(5.0 / n, 3.0 * med_ipr);
      points.push_back(pt);
    }
  }
  return points;
}

// ---------------------------------------------------------------------------
// Self-induced AAH model.
// ---------------------------------------------------------------------------

enum class OmegaMode { Analytic, Exact };

struct SelfAahParams {
  int n_atoms = 200;
  int j = 11;  // standing-wave index of the potential-forming polariton
  double phi = 0.02;
  OmegaMode omega_mode = OmegaMode::Analytic;
  bool retain_im_omega = false;  // experimental: complex omega_j spectra

  void validate() const {
    if (n_atoms < 2) throw ConfigError("self_aah: n_atoms must be >= 2");
    if (j < 1 || j >= n_atoms)
      throw ConfigError("self_aah: j must satisfy 1 <= j < N");
    if (!(phi > 0.0 && phi < kPi))
      throw ConfigError("self_aah: phi must lie in (0, pi)");
  }
};

// Real part of the standing-wave eigenfrequency relative to omega0.
inline double omega_j(const SelfAahParams& p,
                      const std::vector<PolaritonMode>* singles = nullptr) {
  p.validate();
  const double kj = kPi * p.j / p.n_atoms;
  if (p.omega_mode == OmegaMode::Analytic) return -2.0 * p.phi / (kj * kj);
  std::vector<PolaritonMode> storage;
  if (!singles) {
    storage = eigensolve_single(ModelParams{.n_atoms = p.n_atoms, .phi = p.phi});
    singles = &storage;
  }
  for (const auto& m : *singles)
    if (m.index_j == p.j && !m.dc_labeled && m.energy.real() < 0.0)
      return m.energy.real();
  throw SolverError("omega_j: no lower-branch single-particle mode with index " +
                    std::to_string(p.j));
}

inline Complex omega_j_complex(const SelfAahParams& p,
                               const std::vector<PolaritonMode>* singles = nullptr) {
  p.validate();
  std::vector<PolaritonMode> storage;
  if (!singles) {
    storage = eigensolve_single(ModelParams{.n_atoms = p.n_atoms, .phi = p.phi});
    singles = &storage;
  }
  for (const auto& m : *singles)
    if (m.index_j == p.j && !m.dc_labeled && m.energy.real() < 0.0)
      return m.energy;
  throw SolverError("omega_j_complex: no lower-branch mode with index " +
                    std::to_string(p.j));
}

struct SelfAahSpectrum {
  RealVec energies;  // finite real generalized eigenvalues, ascending
  RealMat vectors;   // columns, unit 2-norm
  RealVec iprs;
  int n_infinite = 0;         // beta ~ 0 pencil eigenvalues (d^2 kernel)
  int n_complex_dropped = 0;  // complex pairs of the real pencil, flagged
};

namespace detail {

// diag(a) d^2 + I and d^2 / phi of the linearized pencil A chi = eps B chi
inline void build_self_aah_pencil(const SelfAahParams& p, double omega,
                                  RealMat& a_out, RealMat& b_out) {
  const int n = p.n_atoms;
  const double kj = kPi * p.j / n;
  RealVec diag(n);
  for (int x = 0; x < n; ++x) {
    const double c = std::cos(kj * (x + 1 - 0.5));
    diag[x] = omega / (2.0 * p.phi) + 4.0 / (n * kj * kj) * c * c;
  }
  const RealMat d2 = laplacian_matrix(n);
  a_out = diag.asDiagonal() * d2;
  a_out += RealMat::Identity(n, n);
  b_out = d2 / p.phi;
}

}  // namespace detail

inline SelfAahSpectrum self_aah_spectrum(
    const SelfAahParams& p, const std::vector<PolaritonMode>* singles = nullptr) {
  p.validate();
  if (p.retain_im_omega)
    throw ConfigError(
        "self_aah_spectrum: retain_im_omega needs the complex variant "
        "self_aah_spectrum_complex");
  const double omega = omega_j(p, singles);
  RealMat a, b;
  detail::build_self_aah_pencil(p, omega, a, b);
  auto pairs = lapack::dggev(std::move(a), std::move(b));

  double beta_max = 0.0;
  for (const auto& g : pairs) beta_max = std::max(beta_max, std::abs(g.beta));
  struct Fin {
    double e;
    RealVec v;
  };
  std::vector<Fin> fin;
  SelfAahSpectrum out;
  for (const auto& g : pairs) {
    if (std::abs(g.beta) <= 1e-12 * beta_max) {
      ++out.n_infinite;
      continue;
    }
    if (g.alpha.imag() != 0.0) {
      ++out.n_complex_dropped;
      continue;
    }
    RealVec v = g.vector_re;
    const double nv = v.norm();
    if (nv > 0.0) v /= nv;
    fin.push_back({g.alpha.real() / g.beta, std::move(v)});
  }
  std::sort(fin.begin(), fin.end(),
            [](const Fin& x, const Fin& y) { return x.e < y.e; });
  const int m = static_cast<int>(fin.size());
  out.energies.resize(m);
  out.vectors.resize(p.n_atoms, m);
  out.iprs.resize(m);
  for (int i = 0; i < m; ++i) {
    out.energies[i] = fin[i].e;
    out.vectors.col(i) = fin[i].v;
    out.iprs[i] = ipr(fin[i].v.cast<Complex>());
  }
  return out;
}

// Experimental: keep Im(omega_j); the pencil turns complex and so does the
// spectrum.
struct SelfAahComplexSpectrum {
  Vec energies;  // finite eigenvalues, sorted by real part
  Mat vectors;
  int n_infinite = 0;
};

inline SelfAahComplexSpectrum self_aah_spectrum_complex(
    const SelfAahParams& p, const std::vector<PolaritonMode>* singles = nullptr) {
  p.validate();
  const Complex omega = p.retain_im_omega
                            ? omega_j_complex(p, singles)
                            : Complex(omega_j(p, singles), 0.0);
  const int n = p.n_atoms;
  const double kj = kPi * p.j / n;
  Vec diag(n);
  for (int x = 0; x < n; ++x) {
    const double c = std::cos(kj * (x + 1 - 0.5));
    diag[x] = omega / (2.0 * p.phi) + 4.0 / (n * kj * kj) * c * c;
  }
  const Mat d2 = laplacian_matrix(n).cast<Complex>();
  Mat a = diag.asDiagonal() * d2;
  a += Mat::Identity(n, n);
  Mat b = d2 / p.phi;
  auto pairs = lapack::zggev(std::move(a), std::move(b));
  double beta_max = 0.0;
  for (const auto& g : pairs) beta_max = std::max(beta_max, std::abs(g.beta));
  struct Fin {
    Complex e;
    Vec v;
  };
  std::vector<Fin> fin;
  SelfAahComplexSpectrum out;
  for (const auto& g : pairs) {
    if (std::abs(g.beta) <= 1e-12 * beta_max) {
      ++out.n_infinite;
      continue;
    }
    Vec v = g.vector;
    v.normalize();
    fin.push_back({g.alpha / g.beta, std::move(v)});
  }
  std::sort(fin.begin(), fin.end(), [](const Fin& x, const Fin& y) {
    return x.e.real() < y.e.real();
  });
  out.energies.resize(fin.size());
  out.vectors.resize(n, fin.size());
  for (std::size_t i = 0; i < fin.size(); ++i) {
    out.energies[i] = fin[i].e;
    out.vectors.col(i) = fin[i].v;
  }
  return out;
}

// Residual of an eigenpair in the original (denominator) form of the model;
// only meaningful where the braced denominator is nonsingular.
inline std::optional<double> self_aah_residual(const SelfAahParams& p,
                                               double energy,
                                               const RealVec& chi,
                                               double omega) {
  const int n = p.n_atoms;
  const double kj = kPi * p.j / n;
  RealVec denom(n);
  for (int x = 0; x < n; ++x) {
    const double c = std::cos(kj * (x + 1 - 0.5));
    denom[x] = (omega - 2.0 * energy) / (2.0 * p.phi) +
               4.0 / (n * kj * kj) * c * c;
  }
  if (denom.cwiseAbs().minCoeff() < 1e-6) return std::nullopt;
  const RealMat d2 = laplacian_matrix(n);
  RealVec r = d2 * chi + (chi.array() / denom.array()).matrix();
  return r.norm() / chi.norm();
}

// ---------------------------------------------------------------------------
// Semi-analytic butterfly with density-of-states coloring.
// ---------------------------------------------------------------------------

// log10 |fourth finite difference| of a sorted sequence, one-sided stencils at
// the ends; a perfectly degenerate run yields the floor value.
inline RealVec fourth_difference_log(const RealVec& sorted_values,
                                     double floor_value = 1e-16) {
  const int n = static_cast<int>(sorted_values.size());
  RealVec out(n);
  auto stencil = [&](int i0) {
    return sorted_values[i0] - 4.0 * sorted_values[i0 + 1] +
           6.0 * sorted_values[i0 + 2] - 4.0 * sorted_values[i0 + 3] +
           sorted_values[i0 + 4];
  };
  for (int i = 0; i < n; ++i) {
    double d4 = 0.0;
    if (n >= 5) {
      const int i0 = std::clamp(i - 2, 0, n - 5);
      d4 = stencil(i0);
    }
    out[i] = std::log10(std::abs(d4) + floor_value);
  }
  return out;
}

// Self-induced butterfly over j = 1..N-1. energy_aligned follows the exact
// butterfly convention; localization carries the DOS color (log10 |d4 eps|).
inline std::vector<ButterflyPoint> semianalytic_butterfly(
    int n_atoms, double phi, OmegaMode mode = OmegaMode::Analytic) {
  std::vector<PolaritonMode> singles;
  const std::vector<PolaritonMode>* singles_ptr = nullptr;
  if (mode == OmegaMode::Exact) {
    singles = eigensolve_single(ModelParams{.n_atoms = n_atoms, .phi = phi});
    singles_ptr = &singles;
  }
  std::vector<ButterflyPoint> points;
  for (int j = 1; j < n_atoms; ++j) {
    SelfAahParams p{.n_atoms = n_atoms, .j = j, .phi = phi, .omega_mode = mode};
    SelfAahSpectrum spec;
    try {
      spec = self_aah_spectrum(p, singles_ptr);
    } catch (const SolverError&) {
      continue;  // exact omega_j unavailable for this label
    }
    std::vector<double> neg;
    std::vector<double> neg_ipr;
    for (int i = 0; i < spec.energies.size(); ++i)
      if (spec.energies[i] < 0.0) {
        neg.push_back(spec.energies[i]);
        neg_ipr.push_back(spec.iprs[i]);
      }
    if (neg.size() < 3) continue;
    const double emax = neg.back();  // ascending order
    RealVec aligned(neg.size());
    for (std::size_t i = 0; i < neg.size(); ++i)
      aligned[i] = emax - neg[neg.size() - 1 - i] + kButterflyOffset;
    const RealVec dos = fourth_difference_log(aligned);
    std::vector<double> ipr_sorted = neg_ipr;
    std::sort(ipr_sorted.begin(), ipr_sorted.end());
    const double med_ipr = ipr_sorted[ipr_sorted.size() / 2];
    for (std::size_t i = 0; i < neg.size(); ++i) {
      ButterflyPoint pt;
      pt.flux = static_cast<double>(j) / n_atoms;
      pt.energy_aligned = aligned[i];
      pt.localization = dos[i];
      const double this_ipr = neg_ipr[neg.size() - 1 - i];
      pt.is_edge = this_ipr > std::max(5.0 / n_atoms, 3.0 * med_ipr);
      points.push_back(pt);
    }
  }
  std::sort(points.begin(), points.end(),
            [](const ButterflyPoint& a, const ButterflyPoint& b) {
              if (a.flux != b.flux) return a.flux < b.flux;
              return a.energy_aligned < b.energy_aligned;
            });
  return points;
}

}  // namespace qhb
