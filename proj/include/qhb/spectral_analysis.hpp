#pragma once

// Methods pipeline: Schmidt (Takagi) decomposition, entanglement entropy,
// inverse participation ratio, u+/u- orbital splitting, Fourier cluster
// assignment with parity refinement, butterfly assembly and edge-pair checks.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "qhb/lapack.hpp"
#include "qhb/model.hpp"
#include "qhb/two_polariton.hpp"
#include "qhb/types.hpp"

namespace qhb {

// ---------------------------------------------------------------------------
// Schmidt decomposition of a symmetric amplitude matrix (Autonne-Takagi).
// amp = sum_nu sqrt(lambda_nu) q_nu q_nu^T with lambda_nu = sigma_nu^2.
// ---------------------------------------------------------------------------

struct SchmidtData {
  RealVec lambdas;   // descending, sum = 1
  Mat orbitals;      // phase-aligned Takagi vectors, one per column
  Complex source_energy{0.0, 0.0};
  bool degenerate = false;  // degenerate singular values: orbital choice non-unique
};

namespace detail {

// Joint diagonalization of two commuting real symmetric matrices: cluster the
// spectrum of C, then diagonalize D inside each cluster.
inline RealMat joint_diagonalize(const RealMat& c, const RealMat& d) {
  const int g = static_cast<int>(c.rows());
  Eigen::SelfAdjointEigenSolver<RealMat> esc(c);
  RealMat o = esc.eigenvectors();
  const RealVec ev = esc.eigenvalues();
  int start = 0;
  while (start < g) {
    int stop = start + 1;
    while (stop < g && std::abs(ev[stop] - ev[start]) < 1e-6) ++stop;
    if (stop - start > 1) {
      RealMat sub = o.middleCols(start, stop - start);
      Eigen::SelfAdjointEigenSolver<RealMat> esd(
          RealMat(sub.transpose() * d * sub));
      o.middleCols(start, stop - start) = sub * esd.eigenvectors();
    }
    start = stop;
  }
  return o;
}

}  // namespace detail

inline SchmidtData schmidt(const Mat& amplitude,
                           Complex source_energy = Complex(0, 0)) {
  const int n = static_cast<int>(amplitude.rows());
  if (amplitude.cols() != n) throw ConfigError("schmidt: matrix must be square");
  if ((amplitude - amplitude.transpose()).norm() > 1e-8 * amplitude.norm())
    throw ConfigError("schmidt: matrix must be symmetric");
  Mat amp = amplitude;
  const double nrm = amp.norm();
  if (nrm < 1e-300) throw ConfigError("schmidt: zero amplitude");
  amp /= nrm;

  auto svd = lapack::zgesdd(amp);
  const RealVec& sig = svd.singular_values;
  const double s0 = std::max(sig[0], 1e-300);

  SchmidtData out;
  out.source_energy = source_energy;
  out.lambdas.resize(n);
  out.orbitals.resize(n, n);

  // Per-vector phase alignment: A conj(u) = sigma e^{2i a} u for isolated
  // singular values; grouped treatment where that fails or sigmas collide.
  std::vector<char> needs_group(n, 0);
  Mat w(n, n);
  for (int k = 0; k < n; ++k) {
    w.col(k) = amp * svd.u.col(k).conjugate();
    if (sig[k] < 1e-14 * s0) continue;  // null space: any phase works
    const Complex z = svd.u.col(k).dot(w.col(k));
    const double resid = (w.col(k) - z * svd.u.col(k)).norm();
    if (resid > 1e-7 * s0) needs_group[k] = 1;
  }
  for (int k = 0; k + 1 < n; ++k)
    if (sig[k] - sig[k + 1] < 1e-10 * s0 && sig[k] > 1e-14 * s0) {
      needs_group[k] = 1;
      needs_group[k + 1] = 1;
    }

  int k = 0;
  while (k < n) {
    if (sig[k] < 1e-14 * s0) {
      // zero block: keep SVD vectors as-is
      for (; k < n; ++k) out.orbitals.col(k) = svd.u.col(k);
      break;
    }
    if (!needs_group[k]) {
      const Complex z = svd.u.col(k).dot(w.col(k));
      const Complex half_phase =
          std::exp(Complex(0.0, 0.5 * std::arg(z)));
      out.orbitals.col(k) = half_phase * svd.u.col(k);
      ++k;
      continue;
    }
    // grow the degenerate group while sigmas stay close
    int stop = k + 1;
    while (stop < n && needs_group[stop] &&
           sig[stop - 1] - sig[stop] < 1e-6 * s0)
      ++stop;
    out.degenerate = true;
    const int g = stop - k;
    const Mat ug = svd.u.middleCols(k, g);
    Mat b = ug.adjoint() * amp * ug.conjugate();  // ~ sigma * unitary symmetric
    b = 0.5 * (b + b.transpose()).eval();
    double sbar = 0.0;
    for (int i = 0; i < g; ++i) sbar += sig[k + i];
    sbar /= g;
    const RealMat c = b.real() / sbar;
    const RealMat d = b.imag() / sbar;
    const RealMat o = detail::joint_diagonalize(c, d);
    for (int l = 0; l < g; ++l) {
      const RealVec col = o.col(l);
      const double cc = col.dot(c * col);
      const double dd = col.dot(d * col);
      const double theta = std::atan2(dd, cc);
      out.orbitals.col(k + l) =
          (ug * col.cast<Complex>()) * std::exp(Complex(0.0, 0.5 * theta));
    }
    k = stop;
  }

  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    out.lambdas[i] = sig[i] * sig[i];
    sum += out.lambdas[i];
  }
  out.lambdas /= sum;
  return out;
}

inline Mat schmidt_reconstruct(const SchmidtData& s) {
  const int n = static_cast<int>(s.orbitals.rows());
  Mat amp = Mat::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    const double w = std::sqrt(std::max(0.0, s.lambdas[k]));
    if (w < 1e-16) break;
    amp.noalias() += w * s.orbitals.col(k) * s.orbitals.col(k).transpose();
  }
  return amp;
}

inline double entropy(const SchmidtData& s) {
  double acc = 0.0;
  for (int i = 0; i < s.lambdas.size(); ++i) {
    const double l = s.lambdas[i];
    if (l > 0.0) acc -= l * std::log(l);
  }
  return std::max(0.0, acc);
}

inline double ipr(const Vec& u) {
  double s2 = 0.0, s4 = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double a = std::norm(u[i]);
    s2 += a;
    s4 += a * a;
  }
  if (s2 <= 0.0) throw ConfigError("ipr: zero vector");
  return s4 / (s2 * s2);
}

// ---------------------------------------------------------------------------
// u+/u- splitting of the two leading Schmidt terms.
// ---------------------------------------------------------------------------

struct SplitOrbitals {
  Vec u_free;
  Vec u_loc;
  double ipr_free = 0.0;
  double ipr_loc = 0.0;
  bool ambiguous = false;        // IPRs within 1%
  bool quasi_defective = false;  // bilinear reduction degenerated; literal
                                 // u+/u- fallback was used
};

// The two leading Takagi terms are reduced to their bilinear (complex
// orthogonal) eigenbasis v1, v2 of the rank-2 truncation, and
// u+- = |e1|^(-1/4) v1 +- |e2|^(-1/4) v2. Operating on the bilinear pair is
// what separates the extended and localized factors; the Takagi phases would
// mix them 50/50 for near-degenerate weights.
inline SplitOrbitals split_orbitals(const SchmidtData& s) {
  const int n = static_cast<int>(s.orbitals.rows());
  if (n < 2 || s.lambdas.size() < 2 || s.lambdas[1] <= 1e-14)
    throw ConfigError("split_orbitals: no second Schmidt orbital");
  const Vec p1 = s.orbitals.col(0);
  const Vec p2 = s.orbitals.col(1);
  const double s1 = std::sqrt(s.lambdas[0]);
  const double s2 = std::sqrt(s.lambdas[1]);

  SplitOrbitals out;
  Vec v1, v2;
  Complex e1, e2;
  bool ok = false;

  // bilinear Gram of the leading pair and its LL^T factorization
  const Complex g11 = bilinear_dot(p1, p1);
  const Complex g12 = bilinear_dot(p1, p2);
  const Complex g22 = bilinear_dot(p2, p2);
  if (std::abs(g11) > 1e-8) {
    const Complex l11 = std::sqrt(g11);
    const Complex l21 = g12 / l11;
    const Complex l22sq = g22 - l21 * l21;
    if (std::abs(l22sq) > 1e-8) {
      const Complex l22 = std::sqrt(l22sq);
      // bilinear-orthonormal basis spanning {p1, p2}
      const Vec b1 = p1 / l11;
      const Vec b2 = (p2 - b1 * l21) / l22;
      // rank-2 coefficient matrix in that basis: M = L^T diag(s) L
      const Complex m11 = s1 * l11 * l11 + s2 * l21 * l21;
      const Complex m12 = s2 * l21 * l22;
      const Complex m22 = s2 * l22 * l22;
      const Complex mu = 0.5 * (m11 + m22);
      const Complex de = 0.5 * (m11 - m22);
      const Complex rt = std::sqrt(de * de + m12 * m12);
      e1 = mu + rt;
      e2 = mu - rt;
      auto evec = [&](Complex e, Vec& v) {
        const Complex a1 = m12, a2 = e - m11;
        const Complex c1 = e - m22, c2 = m12;
        Complex x, y;
        if (std::abs(a1) + std::abs(a2) >= std::abs(c1) + std::abs(c2)) {
          x = a1;
          y = a2;
        } else {
          x = c1;
          y = c2;
        }
        const Complex nn = x * x + y * y;
        if (std::abs(nn) < 1e-12) return false;
        const Complex inv = 1.0 / std::sqrt(nn);
        v = (x * inv) * b1 + (y * inv) * b2;
        return true;
      };
      if (std::abs(e1) > 1e-14 && std::abs(e2) > 1e-14 && evec(e1, v1) &&
          evec(e2, v2))
        ok = true;
    }
  }

  if (ok) {
    const double w1 = std::pow(std::abs(e1), -0.25);
    const double w2 = std::pow(std::abs(e2), -0.25);
    out.u_free = w1 * v1 + w2 * v2;
    out.u_loc = w1 * v1 - w2 * v2;
  } else {
    // quasi-defective span: fall back to the literal combination
    out.quasi_defective = true;
    const double w1 = std::pow(s1, -0.25);
    const double w2 = std::pow(s2, -0.25);
    out.u_free = w1 * p1 + w2 * p2;
    out.u_loc = w1 * p1 - w2 * p2;
  }

  out.ipr_free = ipr(out.u_free);
  out.ipr_loc = ipr(out.u_loc);
  if (out.ipr_free > out.ipr_loc) {
    std::swap(out.u_free, out.u_loc);
    std::swap(out.ipr_free, out.ipr_loc);
  }
  const double hi = std::max(out.ipr_free, out.ipr_loc);
  out.ambiguous = std::abs(out.ipr_loc - out.ipr_free) < 0.01 * hi;
  return out;
}

// Spec-level name for the Fourier peak search (0, pi], 4N grid.
inline FourierPeak fourier_kmax(const Vec& u) { return dominant_wavevector(u); }

// ---------------------------------------------------------------------------
// Cluster assignment.
// ---------------------------------------------------------------------------

struct ClusterAssignment {
  int state_id = -1;
  int j = 0;
  double k_max = 0.0;
  Parity parity = Parity::Indefinite;
  Vec u_free;
  Vec u_loc;
  double ipr_loc = 0.0;
  double dominance = 0.0;  // lambda1 + lambda2
  bool confident = false;
  // reasons for low confidence
  bool weak_dominance = false;
  bool ambiguous_split = false;
  bool dc_peak = false;
  bool indefinite_parity = false;
  Complex energy{0.0, 0.0};
};

// Pipeline of the Methods section: transformed amplitude -> schmidt ->
// u+/u- -> Fourier argmax on u_free -> j, refined so odd/even j matches the
// odd/even mirror symmetry of the standing-wave factor.
inline ClusterAssignment assign_cluster(const TwoExcitationState& state,
                                        const ModelParams& p,
                                        int state_id = -1) {
  if (state.energy.real() >= 0.0)
    throw ConfigError("assign_cluster: requires Re(eps - omega0) < 0");
  const int n = p.n_atoms;
  ClusterAssignment out;
  out.state_id = state_id;
  out.energy = state.energy;

  const TwoExcitationState* transformed = &state;
  TwoExcitationState storage;
  if (state.basis == AmplitudeBasis::Atomic) {
    storage = transform_basis(state, p, TransformDirection::ToTransformed);
    transformed = &storage;
  }

  SchmidtData sd = schmidt(transformed->amplitude, state.energy);
  out.dominance = sd.lambdas[0] + (sd.lambdas.size() > 1 ? sd.lambdas[1] : 0.0);
  out.weak_dominance = out.dominance <= 0.5;

  SplitOrbitals split;
  try {
    split = split_orbitals(sd);
  } catch (const ConfigError&) {
    // rank-1 state: no second orbital to split off
    out.u_free = sd.orbitals.col(0);
    out.u_loc = Vec::Zero(n);
    out.ipr_loc = 0.0;
    out.ambiguous_split = true;
    const FourierPeak peak = fourier_kmax(out.u_free);
    out.k_max = peak.k_max;
    out.dc_peak = peak.dc_flag;
    out.j = std::clamp(static_cast<int>(std::lround(peak.k_max * n / kPi)), 1, n);
    out.confident = false;
    return out;
  }
  out.u_free = split.u_free;
  out.u_loc = split.u_loc;
  out.ipr_loc = split.ipr_loc;
  // scattering-like states with two extended factors are intrinsically
  // ambiguous; require a clear IPR separation for a confident label
  const double sep = std::abs(split.ipr_loc - split.ipr_free) /
                     std::max(split.ipr_loc, split.ipr_free);
  out.ambiguous_split = split.ambiguous || split.quasi_defective || sep < 0.2;

  const FourierPeak peak = fourier_kmax(out.u_free);
  out.k_max = peak.k_max;
  out.dc_peak = peak.dc_flag;
  int j = static_cast<int>(std::lround(peak.k_max * n / kPi));

  double parity_mag = 0.0;
  out.parity = mirror_parity(out.u_free, &parity_mag);
  out.indefinite_parity = out.parity == Parity::Indefinite;
  if (!out.indefinite_parity) {
    // the standing wave cos(pi j (x - 1/2) / N) has mirror parity (-1)^j
    const bool want_odd = out.parity == Parity::Odd;
    if (((j % 2) != 0) != want_odd) {
      const double kj = peak.k_max * n / kPi;
      j = (std::abs(kj - (j - 1)) <= std::abs(kj - (j + 1))) ? j - 1 : j + 1;
    }
  }
  out.j = std::clamp(j, 1, n);
  out.confident = !out.weak_dominance && !out.ambiguous_split && !out.dc_peak &&
                  !out.indefinite_parity;
  return out;
}

// ---------------------------------------------------------------------------
// Quasi-degenerate level grouping (Landau levels, gap detection).
// ---------------------------------------------------------------------------

// Split a sorted energy list where a spacing exceeds factor x median spacing.
inline std::vector<std::vector<int>> group_quasi_degenerate(
    const std::vector<double>& sorted_energies, double factor = 10.0) {
  const int m = static_cast<int>(sorted_energies.size());
  std::vector<std::vector<int>> groups;
  if (m == 0) return groups;
  std::vector<double> spacings;
  for (int i = 0; i + 1 < m; ++i)
    spacings.push_back(sorted_energies[i + 1] - sorted_energies[i]);
  double threshold = 1e-12;
  if (!spacings.empty()) {
    std::vector<double> tmp = spacings;
    std::nth_element(tmp.begin(), tmp.begin() + tmp.size() / 2, tmp.end());
    threshold = std::max(factor * tmp[tmp.size() / 2], 1e-12);
  }
  groups.push_back({0});
  for (int i = 1; i < m; ++i) {
    if (spacings[i - 1] > threshold) groups.push_back({});
    groups.back().push_back(i);
  }
  return groups;
}

// ---------------------------------------------------------------------------
// Butterfly assembly.
// ---------------------------------------------------------------------------

struct ButterflyPoint {
  double flux = 0.0;            // j / N (or alpha for the Harper reference)
  double energy_aligned = 0.0;  // Re(eps_{j,max} - eps) + 1.1e-4, > 0
  double localization = 0.0;    // IPR of u_loc (or the DOS measure)
  bool is_edge = false;
};

inline constexpr double kButterflyOffset = 1.1e-4;

struct ButterflyWarnings {
  std::vector<int> skipped_clusters;  // clusters with fewer than 3 states
};

inline std::vector<ButterflyPoint> assemble_butterfly(
    const std::vector<TwoExcitationState>& states,
    const std::vector<ClusterAssignment>& assignments, const ModelParams& p,
    ButterflyWarnings* warnings = nullptr) {
  (void)states;  // energies ride along in the assignments
  const int n = p.n_atoms;
  // bucket confident assignments by cluster index
  std::vector<std::vector<const ClusterAssignment*>> by_j(n + 1);
  for (const auto& a : assignments)
    if (a.confident) by_j[a.j].push_back(&a);

  std::vector<ButterflyPoint> points;
  for (int j = 1; j <= n; ++j) {
    auto& cluster = by_j[j];
    if (cluster.empty()) continue;
    if (cluster.size() < 3) {
      if (warnings) warnings->skipped_clusters.push_back(j);
      continue;
    }
    std::sort(cluster.begin(), cluster.end(),
              [](const ClusterAssignment* a, const ClusterAssignment* b) {
                return a->energy.real() < b->energy.real();
              });
    const double emax = cluster.back()->energy.real();

    std::vector<double> energies;
    std::vector<double> iprs;
    for (const auto* a : cluster) {
      energies.push_back(a->energy.real());
      iprs.push_back(a->ipr_loc);
    }
    std::vector<double> sorted_ipr = iprs;
    std::sort(sorted_ipr.begin(), sorted_ipr.end());
    const double median_ipr = sorted_ipr[sorted_ipr.size() / 2];

    const auto groups = group_quasi_degenerate(energies);
    // map member -> group, and collect "Landau" groups (3+ members)
    std::vector<int> group_of(energies.size());
    for (int g = 0; g < static_cast<int>(groups.size()); ++g)
      for (int idx : groups[g]) group_of[idx] = g;
    auto group_span = [&](int g) {
      const auto& gr = groups[g];
      if (gr.size() < 2) return 0.0;
      return (energies[gr.back()] - energies[gr.front()]) / (gr.size() - 1);
    };

    for (std::size_t m = 0; m < cluster.size(); ++m) {
      const auto* a = cluster[m];
      ButterflyPoint pt;
      pt.flux = static_cast<double>(j) / n;
      pt.energy_aligned = (emax - a->energy.real()) + kButterflyOffset;
      pt.localization = a->ipr_loc;

      bool in_gap = false;
      const int g = group_of[m];
      if (groups[g].size() <= 2) {
        // distance to the nearest larger (Landau-like) groups on both sides
        bool ok_below = true, ok_above = true;
        for (int dir : {-1, +1}) {
          int gg = g + dir;
          while (gg >= 0 && gg < static_cast<int>(groups.size()) &&
                 groups[gg].size() < 3)
            gg += dir;
          if (gg < 0 || gg >= static_cast<int>(groups.size())) continue;
          const auto& target = groups[gg];
          const double edge = dir < 0 ? energies[target.back()]
                                      : energies[target.front()];
          const double dist = std::abs(a->energy.real() - edge);
          const double spacing = group_span(gg);
          const bool far_enough = dist > 2.0 * std::max(spacing, 1e-12);
          (dir < 0 ? ok_below : ok_above) = far_enough;
        }
        in_gap = ok_below && ok_above;
      }
      pt.is_edge =
          in_gap && a->ipr_loc > 5.0 / n && a->ipr_loc > 3.0 * median_ipr;
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

// ---------------------------------------------------------------------------
// Edge-pair detection.
// ---------------------------------------------------------------------------

struct EdgePairReport {
  int state_a = -1;
  int state_b = -1;
  double delta_energy = 0.0;
  bool via_recombination = false;  // one-sided only after (a +- b)/sqrt(2)
  double left_weight = 0.0;        // edge weights of the resolved pair
  double right_weight = 0.0;
};

namespace detail {

struct EdgeWeights {
  double left = 0.0;
  double right = 0.0;
};

inline EdgeWeights edge_weights(const Vec& u, int margin) {
  const int n = static_cast<int>(u.size());
  double total = 0.0;
  EdgeWeights w;
  for (int i = 0; i < n; ++i) {
    const double a = std::norm(u[i]);
    total += a;
    if (i < margin) w.left += a;
    if (i >= n - margin) w.right += a;
  }
  if (total > 0.0) {
    w.left /= total;
    w.right /= total;
  }
  return w;
}

inline Vec u_loc_of(const TwoExcitationState& st, const ModelParams& p) {
  const TwoExcitationState* t = &st;
  TwoExcitationState storage;
  if (st.basis == AmplitudeBasis::Atomic) {
    storage = transform_basis(st, p, TransformDirection::ToTransformed);
    t = &storage;
  }
  return split_orbitals(schmidt(t->amplitude)).u_loc;
}

}  // namespace detail

// Report (near-)degenerate pairs whose localized factors concentrate at
// opposite edges, directly or after symmetric/antisymmetric recombination.
inline std::vector<EdgePairReport> edge_pair_check(
    const std::vector<TwoExcitationState>& candidates, const ModelParams& p,
    double degeneracy_tol = 1e-3, double side_threshold = 0.5) {
  const int n = p.n_atoms;
  const int margin = std::max(1, static_cast<int>(std::ceil(0.15 * n)));
  std::vector<EdgePairReport> reports;
  std::vector<char> used(candidates.size(), 0);
  for (std::size_t a = 0; a < candidates.size(); ++a) {
    if (used[a]) continue;
    for (std::size_t b = a + 1; b < candidates.size(); ++b) {
      if (used[b]) continue;
      const double de = std::abs(candidates[a].energy.real() -
                                 candidates[b].energy.real());
      if (de > degeneracy_tol) continue;

      auto opposite = [&](const Vec& ua, const Vec& ub) {
        const auto wa = detail::edge_weights(ua, margin);
        const auto wb = detail::edge_weights(ub, margin);
        const bool ab = wa.left > side_threshold && wb.right > side_threshold;
        const bool ba = wa.right > side_threshold && wb.left > side_threshold;
        if (!(ab || ba)) return std::optional<detail::EdgeWeights>{};
        return std::optional<detail::EdgeWeights>{
            detail::EdgeWeights{ab ? wa.left : wb.left, ab ? wb.right : wa.right}};
      };

      EdgePairReport rep;
      rep.state_a = static_cast<int>(a);
      rep.state_b = static_cast<int>(b);
      rep.delta_energy = de;
      bool matched = false;
      try {
        const Vec ua = detail::u_loc_of(candidates[a], p);
        const Vec ub = detail::u_loc_of(candidates[b], p);
        if (auto w = opposite(ua, ub)) {
          rep.via_recombination = false;
          rep.left_weight = w->left;
          rep.right_weight = w->right;
          matched = true;
        }
      } catch (const ConfigError&) {
        // rank-1 member: fall through to recombination
      }
      if (!matched) {
        try {
          auto [sym, anti] = recombine_pair(candidates[a], candidates[b]);
          const Vec us = detail::u_loc_of(sym, p);
          const Vec ut = detail::u_loc_of(anti, p);
          if (auto w = opposite(us, ut)) {
            rep.via_recombination = true;
            rep.left_weight = w->left;
            rep.right_weight = w->right;
            matched = true;
          }
        } catch (const ConfigError&) {
        }
      }
      if (matched) {
        reports.push_back(rep);
        used[a] = used[b] = 1;
        break;
      }
    }
  }
  return reports;
}

// ---------------------------------------------------------------------------
// Entanglement map (atomic-basis entropy vs energy, IPR coloring).
// ---------------------------------------------------------------------------

struct EntanglementPoint {
  int state_id = -1;
  Complex energy{0.0, 0.0};
  double entropy = 0.0;
  double ipr_amplitude = 0.0;  // IPR of the flattened amplitude matrix
};

inline std::vector<EntanglementPoint> entanglement_map(
    const std::vector<TwoExcitationState>& states) {
  std::vector<EntanglementPoint> rows;
  rows.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& st = states[i];
    if (st.basis != AmplitudeBasis::Atomic)
      throw ConfigError("entanglement_map: states must be in the atomic basis");
    EntanglementPoint pt;
    pt.state_id = static_cast<int>(i);
    pt.energy = st.energy;
    pt.entropy = entropy(schmidt(st.amplitude, st.energy));
    pt.ipr_amplitude = ipr(Vec(st.amplitude.reshaped()));
    rows.push_back(pt);
  }
  return rows;
}

}  // namespace qhb
