#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "qhb/model.hpp"

using namespace qhb;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

Vec random_complex_vec(int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = Complex(d(rng), d(rng));
  return v;
}

}  // namespace

TEST_CASE("single hamiltonian entries and symmetry") {
  SECTION("N=1 is a single decaying atom") {
    Mat h = build_single_hamiltonian({.n_atoms = 1, .phi = 0.02});
    REQUIRE(h.rows() == 1);
    REQUIRE_THAT(h(0, 0).real(), WithinAbs(0.0, 1e-15));
    REQUIRE_THAT(h(0, 0).imag(), WithinAbs(-1.0, 1e-15));
  }
  SECTION("N=2 off-diagonal carries the propagation phase") {
    Mat h = build_single_hamiltonian({.n_atoms = 2, .phi = 0.02});
    const Complex expect = Complex(0, -1) * std::exp(Complex(0, 0.02));
    REQUIRE_THAT(std::abs(h(0, 1) - expect), WithinAbs(0.0, 1e-15));
    REQUIRE(h(0, 1) == h(1, 0));
  }
  SECTION("trace is -i N and the matrix is exactly symmetric") {
    for (int n : {3, 17, 40}) {
      Mat h = build_single_hamiltonian({.n_atoms = n, .phi = 0.31});
      REQUIRE_THAT(std::abs(h.trace() - Complex(0, -n)), WithinAbs(0.0, 1e-12));
      REQUIRE((h - h.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
  }
  SECTION("parameter validation") {
    REQUIRE_THROWS_AS(build_single_hamiltonian({.n_atoms = 0, .phi = 0.02}),
                      ConfigError);
    REQUIRE_THROWS_AS(build_single_hamiltonian({.n_atoms = 4, .phi = -1.0}),
                      ConfigError);
    REQUIRE_THROWS_AS(build_single_hamiltonian({.n_atoms = 4, .phi = 4.0}),
                      ConfigError);
  }
}

TEST_CASE("matrix-free application matches the dense kernel") {
  std::mt19937 rng(12345);
  for (int n : {1, 2, 5, 23, 64}) {
    ModelParams p{.n_atoms = n, .phi = 0.11};
    Mat h = build_single_hamiltonian(p);
    for (int trial = 0; trial < 5; ++trial) {
      Vec v = random_complex_vec(n, rng);
      Vec dense = h * v;
      Vec fast = apply_single(p, v);
      REQUIRE((dense - fast).cwiseAbs().maxCoeff() < 1e-12 * dense.norm());
    }
  }
}

TEST_CASE("dispersion formula") {
  ModelParams p{.n_atoms = 10, .phi = 0.02};
  SECTION("band edge kd = pi") {
    const double expect = std::sin(0.02) / (-1.0 - std::cos(0.02));
    REQUIRE_THAT(dispersion(kPi, p), WithinRel(expect, 1e-12));
    REQUIRE(dispersion(kPi, p) < 0.0);
  }
  SECTION("kd = pi/2") {
    const double expect = -std::sin(0.02) / std::cos(0.02);
    REQUIRE_THAT(dispersion(kPi / 2, p), WithinRel(expect, 1e-12));
  }
  SECTION("pole at the light line") {
    REQUIRE_THROWS_AS(dispersion(0.02 + 1e-12, p), SolverError);
    // large but finite just outside the pole window
    REQUIRE(std::abs(dispersion(0.03, p)) > 50.0);
  }
  SECTION("domain") {
    REQUIRE_THROWS_AS(dispersion(0.0, p), ConfigError);
    REQUIRE_THROWS_AS(dispersion(3.5, p), ConfigError);
  }
}

TEST_CASE("single-excitation eigensolve") {
  ModelParams p{.n_atoms = 125, .phi = 0.02};
  Mat h = build_single_hamiltonian(p);
  auto modes = eigensolve_single(h);
  REQUIRE(modes.size() == 125);

  SECTION("exactly one quasi-superradiant mode near +71") {
    int count = 0;
    for (const auto& m : modes)
      if (std::abs(m.energy.real() - 71.0) <= 2.0) ++count;
    REQUIRE(count == 1);
    // and it is the only mode with a large positive shift
    int positive = 0;
    for (const auto& m : modes)
      if (m.energy.real() > 10.0) ++positive;
    REQUIRE(positive == 1);
  }

  SECTION("eigenvalue sum equals trace; decay is physical") {
    Complex sum(0, 0);
    for (const auto& m : modes) sum += m.energy;
    REQUIRE(std::abs(sum - Complex(0, -125)) < 1e-8 * 125);
    for (const auto& m : modes) REQUIRE(m.energy.imag() <= 1e-9);
  }

  SECTION("bilinear Gram matrix is the identity") {
    for (size_t a = 0; a < modes.size(); a += 7) {
      for (size_t b = a; b < modes.size(); b += 11) {
        const Complex g = bilinear_dot(modes[a].vector, modes[b].vector);
        if (a == b)
          REQUIRE_THAT(std::abs(g), WithinAbs(1.0, 1e-6));
        else
          REQUIRE(std::abs(g) < 1e-6);
      }
    }
  }

  SECTION("modes are mirror-parity eigenstates") {
    for (const auto& m : modes) {
      REQUIRE(m.parity != Parity::Indefinite);
      const double sign = m.parity == Parity::Even ? 1.0 : -1.0;
      REQUIRE((reflected(m.vector) - sign * m.vector).cwiseAbs().maxCoeff() <
              1e-6);
    }
  }

  SECTION("sorted ascending by Re and labeled by standing wave") {
    for (size_t i = 1; i < modes.size(); ++i)
      REQUIRE(modes[i - 1].energy.real() <= modes[i].energy.real());
    // lower-branch modes approximate the dispersion at k_j = pi j / N
    for (int j = 3; j <= 15; ++j) {
      const double target = dispersion(kPi * j / 125, p);
      bool found = false;
      for (const auto& m : modes)
        if (m.index_j == j && !m.dc_labeled &&
            std::abs(m.energy.real() - target) < 0.10 * std::abs(target))
          found = true;
      REQUIRE(found);
    }
  }
}

TEST_CASE("inverse operator K") {
  ModelParams p{.n_atoms = 60, .phi = 0.02};
  SECTION("exact mode inverts H") {
    Mat h = build_single_hamiltonian(p);
    Mat k = build_k_operator(p, KOperatorMode::Exact);
    Mat prod = h * k;
    REQUIRE((prod - Mat::Identity(60, 60)).cwiseAbs().maxCoeff() < 1e-9);
  }
  SECTION("laplacian mode has the open-chain corner structure") {
    Mat k = build_k_operator(p, KOperatorMode::Laplacian);
    const double s = 1.0 / (2.0 * 0.02);
    REQUIRE_THAT(k(0, 0).real(), WithinRel(-s, 1e-12));
    REQUIRE_THAT(k(0, 1).real(), WithinRel(s, 1e-12));
    REQUIRE(std::abs(k(0, 2)) == 0.0);
    REQUIRE_THAT(k(59, 59).real(), WithinRel(-s, 1e-12));
    REQUIRE_THAT(k(30, 30).real(), WithinRel(-2 * s, 1e-12));
  }
  SECTION("discrete second derivative of a quadratic is 2") {
    Mat k = build_k_operator(p, KOperatorMode::Laplacian);
    Vec v(60);
    for (int x = 0; x < 60; ++x) v[x] = Complex((x + 1.0) * (x + 1.0), 0.0);
    Vec kv = (2.0 * 0.02) * (k * v);
    for (int x = 1; x < 59; ++x)
      REQUIRE_THAT(kv[x].real(), WithinAbs(2.0, 1e-9));
  }
  SECTION("laplacian K converges to exact K as phi decreases") {
    double prev = 1e300;
    for (double phi : {0.08, 0.04, 0.02}) {
      ModelParams q{.n_atoms = 100, .phi = phi};
      Mat ke = build_k_operator(q, KOperatorMode::Exact);
      Mat kl = build_k_operator(q, KOperatorMode::Laplacian);
      auto modes = eigensolve_single(q);
      // the 5 smoothest standing waves available on the lower branch
      // (labels below 3 can collide with the light line at larger phi)
      double err = 0.0;
      int used = 0;
      for (const auto& m : modes) {
        if (m.energy.real() >= 0.0 || m.dc_labeled) continue;
        if (m.index_j < 3 || m.index_j > 7) continue;
        err += ((ke - kl) * m.vector).norm();
        ++used;
      }
      REQUIRE(used == 5);
      REQUIRE(err < prev);
      prev = err;
    }
  }
}

TEST_CASE("fourier peak detection on standing waves") {
  const int n = 200;
  for (int j : {3, 11, 57}) {
    Vec u(n);
    for (int x = 0; x < n; ++x)
      u[x] = std::cos(kPi * j / n * (x + 1 - 0.5));
    const FourierPeak peak = dominant_wavevector(u);
    REQUIRE_THAT(peak.k_max, WithinAbs(kPi * j / n, kPi / (4.0 * n)));
    REQUIRE_FALSE(peak.dc_flag);
  }
  SECTION("constant input flags the dc bin") {
    Vec u = Vec::Ones(64);
    REQUIRE(dominant_wavevector(u).dc_flag);
  }
  SECTION("zero vector is rejected") {
    Vec u = Vec::Zero(10);
    REQUIRE_THROWS_AS(dominant_wavevector(u), ConfigError);
  }
}

TEST_CASE("quasi-superradiant mode is even and dc-labeled") {
  auto modes = eigensolve_single(ModelParams{.n_atoms = 125, .phi = 0.02});
  const auto& top = modes.back();
  REQUIRE(top.energy.real() > 10.0);
  REQUIRE(top.parity == Parity::Even);
  REQUIRE(top.dc_labeled);  // Fourier peak below the first standing wave
}
