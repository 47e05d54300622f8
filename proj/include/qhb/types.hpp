#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qhb {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RealMat = Eigen::MatrixXd;
using RealVec = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;

// Error categories; the CLI maps each to a distinct exit code.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Parity { Even, Odd, Indefinite };

inline const char* to_string(Parity p) {
  switch (p) {
    case Parity::Even: return "even";
    case Parity::Odd: return "odd";
    default: return "indefinite";
  }
}

// Array of two-level atoms coupled to a waveguide. Energies are stored and
// reported as eps - omega0 in units of gamma0, so omega0 = 0 and gamma0 = 1
// are the working convention; the fields exist to make the units explicit.
struct ModelParams {
  int n_atoms = 1;
  double phi = 0.02;  // omega0 d / c, radians
  double gamma0 = 1.0;
  double omega0 = 0.0;
  double memory_budget_gb = 8.0;  // guards dense work in the pair sector

  std::size_t pair_dim() const {
    const std::size_t n = static_cast<std::size_t>(n_atoms);
    return n * (n - 1) / 2;
  }

  // Bytes needed to assemble and diagonalize the packed pair sector.
  // Dense zgeev holds the matrix, the right vectors and a comparable
  // workspace; 4x the matrix is a safe envelope.
  double dense_pair_bytes() const {
    const double d = static_cast<double>(pair_dim());
    return 4.0 * 16.0 * d * d;
  }

  void validate() const {
    if (n_atoms < 1) throw ConfigError("n_atoms must be >= 1");
    if (!(phi > 0.0 && phi < kPi))
      throw ConfigError("phi must satisfy 0 < phi < pi (short-period regime)");
    if (gamma0 <= 0.0) throw ConfigError("gamma0 must be positive");
    if (memory_budget_gb <= 0.0)
      throw ConfigError("memory budget must be positive");
  }

  void check_pair_budget(double required_bytes) const {
    const double budget = memory_budget_gb * 1e9;
    if (required_bytes > budget)
      throw BudgetError(
          "two-excitation sector needs ~" +
          std::to_string(required_bytes / 1e9) + " GB but the budget is " +
          std::to_string(memory_budget_gb) +
          " GB; raise --mem-budget-gb or use the matrix-free/iterative path");
  }
};

// Single-excitation eigenmode of the non-Hermitian matrix H.
// vector is bilinearly normalized, sum_x psi_x^2 = 1 (no conjugation).
struct PolaritonMode {
  Complex energy;  // eps - omega0 in units of gamma0; Im <= 0 for physical modes
  Vec vector;
  int index_j = 0;  // standing-wave label from the dominant Fourier component
  Parity parity = Parity::Indefinite;
  bool quasi_defective = false;  // |sum psi^2| ~ 0, bilinear norm unusable
  bool dc_labeled = false;       // Fourier peak at the lowest grid bin (j=0 rounded up)
};

enum class AmplitudeBasis { Atomic, Transformed };

// Two-excitation eigenstate. The amplitude is the symmetric N x N matrix
// psi_{nm}; in the atomic basis the diagonal vanishes (hard-core constraint).
// Storage convention: unit Frobenius norm.
struct TwoExcitationState {
  Complex energy;  // per-excitation energy (pair eigenvalue / 2)
  Mat amplitude;
  AmplitudeBasis basis = AmplitudeBasis::Atomic;
  Parity parity = Parity::Indefinite;  // reflection sector when known
};

}  // namespace qhb
