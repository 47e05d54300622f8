#pragma once

// Two-excitation sector of the atomic array: packed hard-core pair basis,
// matrix-free application, dense assembly (plain and reflection-blocked),
// eigensolves and the atomic <-> transformed basis change.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "qhb/arnoldi.hpp"
#include "qhb/lapack.hpp"
#include "qhb/model.hpp"
#include "qhb/types.hpp"

namespace qhb {

// Packed basis of the N(N-1)/2 states |n,m>, 0-based n < m, lexicographic.
struct PairBasis {
  int n_atoms = 0;
  std::vector<std::pair<int, int>> pairs;

  static PairBasis make(int n) {
    PairBasis b;
    b.n_atoms = n;
    b.pairs.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int a = 0; a < n; ++a)
      for (int c = a + 1; c < n; ++c) b.pairs.emplace_back(a, c);
    return b;
  }

  std::size_t size() const { return pairs.size(); }

  std::size_t pack(int n, int m) const {
    if (n > m) std::swap(n, m);
    const std::size_t nn = static_cast<std::size_t>(n);
    return nn * (2 * n_atoms - n - 1) / 2 + (m - n - 1);
  }

  std::pair<int, int> unpack(std::size_t idx) const { return pairs[idx]; }
};

// H psi + psi H with the diagonal zeroed; for symmetric zero-diagonal psi this
// equals the pair-sector action of Eq-of-motion form (the -2 diag[diag H psi]
// term cancels the diagonal exactly). O(N^2) via the single-particle kernel.
inline Mat apply_two_polariton(const ModelParams& p, const Mat& psi) {
  const int n = p.n_atoms;
  if (psi.rows() != n || psi.cols() != n)
    throw ConfigError("apply_two_polariton: amplitude must be N x N");
  Mat hp(n, n);
  Vec col, out;
  for (int c = 0; c < n; ++c) {
    col = psi.col(c);
    apply_single_inplace(p, col, out);
    hp.col(c) = out;
  }
  Mat res = hp + hp.transpose();
  res.diagonal().setZero();
  return res;
}

// Dense pair-sector matrix in the packed basis with symmetrized basis vectors
// (amplitude 1/sqrt(2) on (n,m) and (m,n)). Eigenvalues are 2(eps - omega0).
inline Mat assemble_h2(const Mat& h, double memory_budget_gb = 8.0) {
  const int n = static_cast<int>(h.rows());
  const PairBasis basis = PairBasis::make(n);
  const double need = 16.0 * static_cast<double>(basis.size()) * basis.size();
  if (need > memory_budget_gb * 1e9)
    throw BudgetError("assemble_h2: packed matrix needs ~" +
                      std::to_string(need / 1e9) +
                      " GB; raise the budget or use the matrix-free path");
  Mat h2 = Mat::Zero(basis.size(), basis.size());
  for (std::size_t col = 0; col < basis.size(); ++col) {
    const auto [a, b] = basis.pairs[col];
    for (int q = 0; q < n; ++q) {
      if (q != b) h2(basis.pack(q, b), col) += h(q, a);
      if (q != a) h2(basis.pack(q, a), col) += h(q, b);
    }
  }
  return h2;
}

// ---------------------------------------------------------------------------
// Reflection blocking. H2 commutes with the site mirror x -> N-1-x, so the
// packed basis splits into even/odd orbit sectors that are solved separately.
// ---------------------------------------------------------------------------

namespace detail {

struct ReflectionSector {
  Parity parity;
  // orbit representative pair index and its mirror (== rep for fixed pairs)
  std::vector<std::size_t> rep;
  std::vector<std::size_t> mirror;
  // For every packed index: its row in this sector (or -1) and the weight of
  // the packed component in the sector basis vector.
  std::vector<Eigen::Index> row_of;
  std::vector<double> weight_of;
};

inline std::size_t mirror_pair(const PairBasis& basis, std::size_t idx) {
  const auto [a, b] = basis.pairs[idx];
  const int n = basis.n_atoms;
  return basis.pack(n - 1 - b, n - 1 - a);
}

inline std::vector<ReflectionSector> make_sectors(const PairBasis& basis) {
  const std::size_t d = basis.size();
  std::vector<ReflectionSector> sectors(2);
  sectors[0].parity = Parity::Even;
  sectors[1].parity = Parity::Odd;
  for (auto& s : sectors) {
    s.row_of.assign(d, -1);
    s.weight_of.assign(d, 0.0);
  }
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (std::size_t i = 0; i < d; ++i) {
    const std::size_t mi = mirror_pair(basis, i);
    if (mi < i) continue;  // orbit already handled from its representative
    if (mi == i) {
      auto& s = sectors[0];
      s.row_of[i] = static_cast<Eigen::Index>(s.rep.size());
      s.weight_of[i] = 1.0;
      s.rep.push_back(i);
      s.mirror.push_back(i);
    } else {
      for (int k = 0; k < 2; ++k) {
        auto& s = sectors[k];
        const double sign = k == 0 ? 1.0 : -1.0;
        s.row_of[i] = static_cast<Eigen::Index>(s.rep.size());
        s.row_of[mi] = s.row_of[i];
        s.weight_of[i] = inv_sqrt2;
        s.weight_of[mi] = sign * inv_sqrt2;
        s.rep.push_back(i);
        s.mirror.push_back(mi);
      }
    }
  }
  return sectors;
}

// Assemble the pair operator restricted to one reflection sector.
inline Mat assemble_sector(const Mat& h, const PairBasis& basis,
                           const ReflectionSector& sector) {
  const int n = basis.n_atoms;
  const std::size_t nb = sector.rep.size();
  Mat block = Mat::Zero(nb, nb);
  std::vector<Complex> scratch(basis.size(), Complex(0, 0));
  std::vector<char> seen(basis.size(), 0);
  std::vector<std::size_t> touched;
  touched.reserve(4 * n);
  auto stencil = [&](std::size_t pidx, double w) {
    const auto [a, b] = basis.pairs[pidx];
    for (int q = 0; q < n; ++q) {
      if (q != b) {
        const std::size_t r = basis.pack(q, b);
        if (!seen[r]) {
          seen[r] = 1;
          touched.push_back(r);
        }
        scratch[r] += w * h(q, a);
      }
      if (q != a) {
        const std::size_t r = basis.pack(q, a);
        if (!seen[r]) {
          seen[r] = 1;
          touched.push_back(r);
        }
        scratch[r] += w * h(q, b);
      }
    }
  };
  for (std::size_t col = 0; col < nb; ++col) {
    const std::size_t rep = sector.rep[col];
    const std::size_t mir = sector.mirror[col];
    stencil(rep, sector.weight_of[rep]);
    if (mir != rep) stencil(mir, sector.weight_of[mir]);
    for (const std::size_t r : touched) {
      const Eigen::Index row = sector.row_of[r];
      if (row >= 0) block(row, col) += sector.weight_of[r] * scratch[r];
      scratch[r] = Complex(0, 0);
      seen[r] = 0;
    }
    touched.clear();
  }
  return block;
}

// Expand a sector eigenvector to the full packed basis.
inline Vec expand_sector_vector(const PairBasis& basis,
                                const ReflectionSector& sector,
                                const Vec& sector_vec) {
  Vec full = Vec::Zero(basis.size());
  for (std::size_t row = 0; row < sector.rep.size(); ++row) {
    const std::size_t rep = sector.rep[row];
    const std::size_t mir = sector.mirror[row];
    full[rep] += sector.weight_of[rep] * sector_vec[row];
    if (mir != rep) full[mir] += sector.weight_of[mir] * sector_vec[row];
  }
  return full;
}

}  // namespace detail

// Packed vector -> symmetric zero-diagonal amplitude with unit Frobenius norm.
inline Mat unpack_amplitude(const PairBasis& basis, const Vec& packed) {
  const int n = basis.n_atoms;
  Mat psi = Mat::Zero(n, n);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto [a, b] = basis.pairs[i];
    psi(a, b) = packed[i] * inv_sqrt2;
    psi(b, a) = psi(a, b);
  }
  const double nrm = psi.norm();
  if (nrm < 1e-300) throw ConfigError("unpack_amplitude: zero vector");
  psi /= nrm;
  return psi;
}

inline Vec pack_amplitude(const PairBasis& basis, const Mat& psi) {
  Vec packed(basis.size());
  const double sqrt2 = std::sqrt(2.0);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto [a, b] = basis.pairs[i];
    packed[i] = psi(a, b) * sqrt2;
  }
  return packed;
}

enum class TwoSolveMode { Dense, Iterative };

struct EnergyWindow {
  Complex center;  // per-excitation units
  int count = 6;
};

// Streaming dense solve: reflection-blocked zgeev per sector, one callback per
// eigenstate in unspecified order. Lets large-N runs analyze states without
// holding all amplitude matrices.
inline void eigensolve_two_dense_stream(
    const ModelParams& p,
    const std::function<void(TwoExcitationState&&)>& sink) {
  p.validate();
  const Mat h = build_single_hamiltonian(p);
  const PairBasis basis = PairBasis::make(p.n_atoms);
  p.check_pair_budget(p.dense_pair_bytes());
  const auto sectors = detail::make_sectors(basis);
  for (const auto& sector : sectors) {
    if (sector.rep.empty()) continue;
    Mat block = detail::assemble_sector(h, basis, sector);
    auto eig = lapack::zgeev(std::move(block), true);
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
      TwoExcitationState st;
      st.energy = eig.values[i] / 2.0;
      const Vec sector_vec = eig.vectors.col(i);
      st.amplitude =
          unpack_amplitude(basis, detail::expand_sector_vector(basis, sector, sector_vec));
      st.basis = AmplitudeBasis::Atomic;
      st.parity = sector.parity;
      sink(std::move(st));
    }
  }
}

inline std::vector<TwoExcitationState> eigensolve_two(
    const ModelParams& p, TwoSolveMode mode = TwoSolveMode::Dense,
    std::optional<EnergyWindow> window = std::nullopt) {
  p.validate();
  std::vector<TwoExcitationState> states;
  if (mode == TwoSolveMode::Dense) {
    // holding every amplitude matrix costs 16 D N^2 bytes on top of the solve
    const double d = static_cast<double>(p.pair_dim());
    const double nn = static_cast<double>(p.n_atoms) * p.n_atoms;
    p.check_pair_budget(p.dense_pair_bytes() + 16.0 * d * nn);
    states.reserve(p.pair_dim());
    eigensolve_two_dense_stream(
        p, [&](TwoExcitationState&& st) { states.push_back(std::move(st)); });
  } else {
    if (!window)
      throw ConfigError("iterative mode needs an energy window (center, count)");
    const Mat h = build_single_hamiltonian(p);
    const PairBasis basis = PairBasis::make(p.n_atoms);
    const double d = static_cast<double>(basis.size());
    p.check_pair_budget(1.5 * 16.0 * d * d);
    Mat h2 = assemble_h2(h, p.memory_budget_gb);
    const Complex sigma = 2.0 * window->center;  // pair eigenvalues are 2 eps
    h2.diagonal().array() -= sigma;
    lapack::ZLu lu(std::move(h2));
    auto solve = [&](const Vec& v) { return lu.solve(v); };
    auto apply = [&](const Vec& v) {
      Mat psi = unpack_amplitude(basis, v);
      const double nrm = v.norm();
      // pack/unpack normalizes; restore the caller's scale
      return Vec(pack_amplitude(basis, apply_two_polariton(p, psi)) * nrm);
    };
    ShiftInvertOptions opts;
    opts.shift = sigma;
    opts.count = window->count;
    opts.tol = 1e-8;
    auto pairs = shift_invert_arnoldi(basis.size(), solve, apply, opts);
    for (auto& rp : pairs) {
      TwoExcitationState st;
      st.energy = rp.value / 2.0;
      st.amplitude = unpack_amplitude(basis, rp.vector);
      st.basis = AmplitudeBasis::Atomic;
      st.parity = Parity::Indefinite;
      states.push_back(std::move(st));
    }
  }
  std::sort(states.begin(), states.end(),
            [](const TwoExcitationState& a, const TwoExcitationState& b) {
              if (a.energy.real() != b.energy.real())
                return a.energy.real() < b.energy.real();
              return a.energy.imag() < b.energy.imag();
            });
  return states;
}

enum class TransformDirection { ToTransformed, ToAtomic };

// Basis change between the atomic (n,m) and the photon-Green-function (x,y)
// representations: psi' = H psi H, psi = K psi' K with the exact K = H^{-1}.
// The result is renormalized to unit Frobenius norm.
inline TwoExcitationState transform_basis(const TwoExcitationState& state,
                                          const ModelParams& p,
                                          TransformDirection dir) {
  p.validate();
  const Mat h = build_single_hamiltonian(p);
  TwoExcitationState out;
  out.energy = state.energy;
  out.parity = state.parity;
  if (dir == TransformDirection::ToTransformed) {
    if (state.basis != AmplitudeBasis::Atomic)
      throw ConfigError("transform_basis: state is already transformed");
    out.amplitude = h * state.amplitude * h;
    out.basis = AmplitudeBasis::Transformed;
  } else {
    if (state.basis != AmplitudeBasis::Transformed)
      throw ConfigError("transform_basis: state is already atomic");
    lapack::ZLu lu(h);
    Mat y = state.amplitude;
    lu.solve_in_place(y);           // y = H^{-1} psi'
    Mat yt = y.transpose();
    lu.solve_in_place(yt);          // yt = H^{-1} psi'^T H^{-T}
    out.amplitude = yt.transpose();
    out.basis = AmplitudeBasis::Atomic;
  }
  const double nrm = out.amplitude.norm();
  if (nrm < 1e-300) throw SolverError("transform_basis: vanishing amplitude");
  out.amplitude /= nrm;
  return out;
}

// Symmetric/antisymmetric recombination of a (near-)degenerate pair; not
// applied automatically anywhere.
inline std::pair<TwoExcitationState, TwoExcitationState> recombine_pair(
    const TwoExcitationState& a, const TwoExcitationState& b) {
  auto mk = [&](double sign) {
    TwoExcitationState st;
    st.energy = (a.energy + b.energy) / 2.0;
    st.amplitude = a.amplitude + sign * b.amplitude;
    const double nrm = st.amplitude.norm();
    if (nrm < 1e-300)
      throw ConfigError("recombine_pair: inputs are (anti)identical");
    st.amplitude /= nrm;
    st.basis = a.basis;
    st.parity = Parity::Indefinite;
    return st;
  };
  return {mk(1.0), mk(-1.0)};
}

}  // namespace qhb
