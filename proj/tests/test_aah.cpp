#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "qhb/aah.hpp"

using namespace qhb;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("harper spectrum at zero flux") {
  const int n = 50;
  auto spec = harper_spectrum({.n_sites = n, .alpha = 0.0, .k_y = 0.0,
                               .boundary = Boundary::Open});
  // uniform tridiagonal with on-site 2: eps_q = 2 + 2 cos(pi q / (N+1))
  std::vector<double> expect;
  for (int q = 1; q <= n; ++q)
    expect.push_back(2.0 + 2.0 * std::cos(kPi * q / (n + 1)));
  std::sort(expect.begin(), expect.end());
  for (int i = 0; i < n; ++i)
    REQUIRE_THAT(spec.energies[i], WithinAbs(expect[i], 1e-10));
  REQUIRE(count_bands(spec.energies) == 1);
}

TEST_CASE("harper eigenpairs satisfy the equation") {
  auto p = HarperParams{.n_sites = 60, .alpha = 0.3, .k_y = 0.4,
                        .boundary = Boundary::Periodic};
  auto spec = harper_spectrum(p);
  RealMat h = RealMat::Zero(60, 60);
  for (int x = 0; x < 60; ++x) {
    h(x, x) = 2.0 * std::cos(2.0 * kPi * (x + 1) * 0.3 - 0.4);
    if (x + 1 < 60) h(x, x + 1) = h(x + 1, x) = 1.0;
  }
  h(0, 59) += 1.0;
  h(59, 0) += 1.0;
  for (int i = 0; i < 60; i += 7) {
    RealVec r = h * spec.vectors.col(i) - spec.energies[i] * spec.vectors.col(i);
    REQUIRE(r.norm() < 1e-10);
  }
}

TEST_CASE("band counting at rational flux") {
  // k_y = 0.7 keeps all q-1 gaps open (k_y = 0 closes the central gap of
  // even q at a Dirac point)
  const int n = 120;  // divisible by 2, 3, 4, 5
  for (int q : {2, 3, 4, 5}) {
    auto spec = harper_spectrum({.n_sites = n, .alpha = 1.0 / q, .k_y = 0.7,
                                 .boundary = Boundary::Periodic});
    REQUIRE(count_bands(spec.energies) == q);
  }
  SECTION("alpha = 1/2 leaves the central interval empty") {
    auto spec = harper_spectrum({.n_sites = 100, .alpha = 0.5, .k_y = 0.0,
                                 .boundary = Boundary::Periodic});
    REQUIRE(spec.energies.cwiseAbs().minCoeff() >= 2.0 - 1e-9);
    REQUIRE(count_bands(spec.energies) == 2);
  }
  SECTION("alpha = 1/3 gives three bands") {
    auto spec = harper_spectrum({.n_sites = 120, .alpha = 1.0 / 3.0, .k_y = 0.0,
                                 .boundary = Boundary::Periodic});
    REQUIRE(count_bands(spec.energies) == 3);
  }
}

TEST_CASE("hofstadter butterfly sweep") {
  const int n = 20;
  const double step = 1.0 / (4 * n);
  auto pts = hofstadter_butterfly(n, step, 0.0);
  SECTION("output size is N x number of flux values") {
    REQUIRE(pts.size() == static_cast<std::size_t>(n * (4 * n + 1)));
  }
  SECTION("the lattice spectrum is 1-periodic in the flux") {
    RealMat h1 = RealMat::Zero(n, n), h2m = RealMat::Zero(n, n);
    for (int x = 0; x < n; ++x) {
      h1(x, x) = 2.0 * std::cos(2.0 * kPi * (x + 1) * 0.3);
      h2m(x, x) = 2.0 * std::cos(2.0 * kPi * (x + 1) * 1.3);
      if (x + 1 < n)
        h1(x, x + 1) = h1(x + 1, x) = h2m(x, x + 1) = h2m(x + 1, x) = 1.0;
    }
    REQUIRE((h1 - h2m).cwiseAbs().maxCoeff() < 1e-12);
  }
  SECTION("spectrum symmetric under energy sign flip at alpha = 1/2") {
    auto spec = harper_spectrum({.n_sites = 100, .alpha = 0.5, .k_y = 0.0,
                                 .boundary = Boundary::Periodic});
    for (int i = 0; i < 100; ++i)
      REQUIRE_THAT(spec.energies[i], WithinAbs(-spec.energies[99 - i], 1e-8));
  }
}

TEST_CASE("self-AAH potential has j maxima") {
  for (auto [n, j] : {std::pair{100, 7}, std::pair{200, 11}}) {
    const double kj = kPi * j / n;
    RealVec pot(n);
    for (int x = 0; x < n; ++x) {
      const double c = std::cos(kj * (x + 1 - 0.5));
      pot[x] = c * c;
    }
    int maxima = 0;
    for (int x = 0; x < n; ++x) {
      const bool up = x == 0 || pot[x] > pot[x - 1];
      const bool down = x == n - 1 || pot[x] > pot[x + 1];
      if (up && down) ++maxima;
    }
    REQUIRE(maxima == j);
  }
}

TEST_CASE("omega_j in both modes") {
  SelfAahParams p{.n_atoms = 200, .j = 11, .phi = 0.02};
  SECTION("analytic value") {
    const double kj = kPi * 11 / 200.0;
    REQUIRE_THAT(omega_j(p), WithinRel(-2.0 * 0.02 / (kj * kj), 1e-12));
    REQUIRE_THAT(omega_j(p), WithinAbs(-1.34, 0.01));
  }
  SECTION("analytic agrees with exact within 5% at j=11") {
    auto pe = p;
    pe.omega_mode = OmegaMode::Exact;
    const double exact = omega_j(pe);
    REQUIRE(std::abs(exact - omega_j(p)) < 0.05 * std::abs(exact));
  }
  SECTION("analytic form loses validity near the band edge") {
    // j = 198 is the closest resolvable label to N (199 hybridizes away)
    SelfAahParams edge{.n_atoms = 200, .j = 198, .phi = 0.02,
                       .omega_mode = OmegaMode::Exact};
    const double exact = omega_j(edge);
    SelfAahParams ana = edge;
    ana.omega_mode = OmegaMode::Analytic;
    REQUIRE(std::abs(exact - omega_j(ana)) > 0.10 * std::abs(exact));
  }
  SECTION("missing label raises") {
    SelfAahParams bad{.n_atoms = 200, .j = 199, .phi = 0.02,
                      .omega_mode = OmegaMode::Exact};
    REQUIRE_THROWS_AS(omega_j(bad), SolverError);
  }
}

TEST_CASE("self-AAH spectrum: Landau level degeneracy") {
  SelfAahParams p{.n_atoms = 200, .j = 11, .phi = 0.02};
  auto spec = self_aah_spectrum(p);
  REQUIRE(spec.n_infinite >= 1);  // constant vector in the d^2 kernel
  REQUIRE(spec.energies.size() >= 100);

  // aligned view from the top of the negative branch
  std::vector<double> neg;
  for (int i = 0; i < spec.energies.size(); ++i)
    if (spec.energies[i] < 0.0) neg.push_back(spec.energies[i]);
  std::vector<double> aligned;
  for (double e : neg) aligned.push_back(neg.back() - e);
  std::sort(aligned.begin(), aligned.end());

  // lowest quasi-degenerate group, judged on the cluster-top region
  const std::vector<double> head(
      aligned.begin(), aligned.begin() + std::min<std::size_t>(40, aligned.size()));
  auto groups = group_quasi_degenerate(head);
  REQUIRE(groups.front().size() == 10);  // j - 1

  SECTION("degeneracy scan over j") {
    for (int j = 5; j <= 15; j += 2) {
      SelfAahParams q{.n_atoms = 200, .j = j, .phi = 0.02};
      auto s = self_aah_spectrum(q);
      std::vector<double> neg2;
      for (int i = 0; i < s.energies.size(); ++i)
        if (s.energies[i] < 0.0) neg2.push_back(s.energies[i]);
      std::vector<double> al;
      for (double e : neg2) al.push_back(neg2.back() - e);
      std::sort(al.begin(), al.end());
      const std::vector<double> hd(
          al.begin(), al.begin() + std::min<std::size_t>(40, al.size()));
      auto g = group_quasi_degenerate(hd);
      const int got = static_cast<int>(g.front().size());
      REQUIRE(std::abs(got - (j - 1)) <= 1);
    }
  }
}

TEST_CASE("self-AAH back-substitution residual") {
  SelfAahParams p{.n_atoms = 100, .j = 7, .phi = 0.02};
  auto spec = self_aah_spectrum(p);
  const double omega = omega_j(p);
  int checked = 0;
  for (int i = 0; i < spec.energies.size(); ++i) {
    auto r = self_aah_residual(p, spec.energies[i], spec.vectors.col(i), omega);
    if (!r) continue;  // singular denominator
    REQUIRE(*r < 1e-8);
    ++checked;
  }
  REQUIRE(checked > 50);
}

TEST_CASE("self-AAH eigenvectors have definite parity away from degeneracies") {
  SelfAahParams p{.n_atoms = 100, .j = 7, .phi = 0.02};
  auto spec = self_aah_spectrum(p);
  const int m = static_cast<int>(spec.energies.size());
  int definite = 0, isolated = 0;
  for (int i = 0; i < m; ++i) {
    const double gap_below = i == 0 ? 1e300 : spec.energies[i] - spec.energies[i - 1];
    const double gap_above = i + 1 == m ? 1e300 : spec.energies[i + 1] - spec.energies[i];
    if (std::min(gap_below, gap_above) < 1e-6) continue;  // degenerate pair
    ++isolated;
    const Vec v = spec.vectors.col(i).cast<Complex>();
    if (mirror_parity(v) != Parity::Indefinite) ++definite;
  }
  REQUIRE(isolated > 30);
  REQUIRE(definite == isolated);
}

TEST_CASE("complex-omega variant runs and reduces to the real one") {
  SelfAahParams p{.n_atoms = 60, .j = 5, .phi = 0.02};
  auto real_spec = self_aah_spectrum(p);
  auto cplx = self_aah_spectrum_complex(p);  // real omega, complex solver
  REQUIRE(cplx.energies.size() >= real_spec.energies.size());
  // real eigenvalues appear among the complex-solver ones
  for (int i = 0; i < std::min<Eigen::Index>(10, real_spec.energies.size()); ++i) {
    double best = 1e300;
    for (Eigen::Index k = 0; k < cplx.energies.size(); ++k)
      best = std::min(best, std::abs(cplx.energies[k] - real_spec.energies[i]));
    REQUIRE(best < 1e-7 * std::max(1.0, std::abs(real_spec.energies[i])));
  }
  SECTION("retained imaginary part gives decaying spectra") {
    SelfAahParams pi_ = p;
    pi_.retain_im_omega = true;
    pi_.omega_mode = OmegaMode::Exact;
    auto spec = self_aah_spectrum_complex(pi_);
    REQUIRE(spec.energies.size() > 0);
    REQUIRE_THROWS_AS(self_aah_spectrum(pi_), ConfigError);
  }
}

TEST_CASE("fourth difference DOS measure") {
  SECTION("constant sequence is maximally dense") {
    RealVec v = RealVec::Constant(12, 3.5);
    RealVec d = fourth_difference_log(v);
    for (int i = 0; i < 12; ++i) REQUIRE_THAT(d[i], WithinAbs(-16.0, 1e-9));
  }
  SECTION("quartic sequence has constant fourth difference 24 h^4") {
    RealVec v(20);
    for (int i = 0; i < 20; ++i) v[i] = std::pow(0.1 * i, 4);
    RealVec d = fourth_difference_log(v);
    for (int i = 2; i < 18; ++i)
      REQUIRE_THAT(d[i], WithinAbs(std::log10(24.0 * 1e-4), 1e-6));
  }
}

TEST_CASE("semianalytic butterfly covers the flux axis") {
  auto pts = semianalytic_butterfly(40, 0.02);
  REQUIRE(!pts.empty());
  double fmin = 1e300, fmax = 0.0;
  for (const auto& pt : pts) {
    fmin = std::min(fmin, pt.flux);
    fmax = std::max(fmax, pt.flux);
    REQUIRE(pt.energy_aligned > 0.0);
  }
  REQUIRE_THAT(fmin, WithinRel(1.0 / 40.0, 1e-12));
  REQUIRE(fmax >= 1.0 - 2.0 / 40.0 - 1e-12);
  // the top state of every flux column sits exactly at the offset
  std::map<double, double> col_min;
  for (const auto& pt : pts) {
    auto it = col_min.find(pt.flux);
    if (it == col_min.end() || pt.energy_aligned < it->second)
      col_min[pt.flux] = pt.energy_aligned;
  }
  for (const auto& [flux, mn] : col_min) REQUIRE_THAT(mn, WithinRel(1.1e-4, 1e-9));
}
