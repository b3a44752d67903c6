#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <sstream>

#include "support.hpp"
#include "wigflow/wigner.hpp"

using namespace wigflow;
using oracle::pi;

namespace {

Wavefunction gaussian_psi(double shift = 0.0, double phase = 0.0, double half = 10.0, std::size_t n = 8001) {
  return Wavefunction::sample(
      [&](double x) {
        return std::polar(std::pow(pi, -0.25) * std::exp(-0.5 * (x - shift) * (x - shift)), phase);
      },
      -half, half, n);
}

}  // namespace

TEST(Gaussian, PointValues) {
  EXPECT_NEAR(gaussian_eval({1.0, {0, 0}}, 0, 0), 1.0 / pi, 1e-16);
  EXPECT_NEAR(gaussian_eval({0.5, {0, 0}}, 0, 0), 1.0 / (4 * pi), 1e-16);
  EXPECT_NEAR(gaussian_eval({1.0, {0, 0}}, 1, 0), std::exp(-1.0) / pi, 1e-16);
  EXPECT_THROW(GaussianEnsemble(0.0, {0, 0}), Error);
}

TEST(Gaussian, HermitePartials) {
  const GaussianEnsemble g(1.0, {0, 0});
  EXPECT_DOUBLE_EQ(gaussian_partial(g, Axis::x, 0, 0.4, -0.2), gaussian_eval(g, 0.4, -0.2));
  EXPECT_NEAR(gaussian_partial(g, Axis::x, 1, 0, 0), 0.0, 1e-16);
  EXPECT_NEAR(gaussian_partial(g, Axis::x, 2, 0, 0), -2.0 / pi, 1e-15);
}

TEST(Gaussian, PartialsMatchFiniteDifferences) {
  for (int trial = 0; trial < 50; ++trial) {
    const GaussianEnsemble g(oracle::uniform(0.4, 1.5), {oracle::uniform(-1, 1), oracle::uniform(-1, 1)});
    const double x = oracle::uniform(-2, 2), k = oracle::uniform(-2, 2);
    for (int n = 1; n <= 4; ++n) {
      const double ex = gaussian_partial(g, Axis::x, n, x, k);
      const double fx = oracle::fd([&](double u) { return gaussian_eval(g, u, k); }, n, x, oracle::fd_step(n));
      const double ek = gaussian_partial(g, Axis::k, n, x, k);
      const double fk = oracle::fd([&](double u) { return gaussian_eval(g, x, u); }, n, k, oracle::fd_step(n));
      const double scale = std::pow(g.gamma, n) * g.peak();
      EXPECT_NEAR(ex, fx, 1e-5 * std::max(std::abs(ex), scale)) << "n=" << n;
      EXPECT_NEAR(ek, fk, 1e-5 * std::max(std::abs(ek), scale)) << "n=" << n;
    }
  }
}

TEST(Gaussian, NormalizedOnDefaultGrid) {
  for (double gamma : {0.25, 0.5, 1.0, 2.0}) {
    const GaussianEnsemble g(gamma, {0.3, -0.7});
    EXPECT_NEAR(as_grid(g).integral(), 1.0, 1e-10);
  }
}

TEST(Marginal, GaussianMatchesAnalytic) {
  const double gamma = 0.7;
  const GaussianEnsemble g(gamma, {0, 0});
  const Marginal mx = marginal(g, Axis::x);
  double worst = 0.0;
  for (std::size_t i = 0; i < mx.coords.size(); ++i) {
    const double x = mx.coords[i];
    worst = std::max(worst, std::abs(mx.density[i] - gamma / std::sqrt(pi) * std::exp(-gamma * gamma * x * x)));
  }
  EXPECT_LE(worst, 1e-8);

  const Marginal mk = marginal(GaussianEnsemble(1.0, {0, 0}), Axis::k);
  const PhaseGrid grid = PhaseGrid(-6, 6, -6, 6, 513, 513);  // odd count puts a node at k = 0
  const Marginal mk0 = marginal(sample_state(GaussianEnsemble(1.0, {0, 0}), grid), Axis::k);
  EXPECT_NEAR(mk0.density[256], 1.0 / std::sqrt(pi), 1e-8);
  EXPECT_EQ(mk.coords.size(), 512u);
}

TEST(Expectation, GaussianMoments) {
  const GaussianEnsemble g(1.0, {0, 0});
  EXPECT_NEAR(expectation(g, [](double, double) { return 1.0; }), 1.0, 1e-8);
  EXPECT_NEAR(expectation(g, [](double x, double) { return x * x; }), 0.5, 1e-6);
  EXPECT_NEAR(expectation(g, [](double x, double k) { return 0.5 * (x * x + k * k); }), 0.5, 1e-6);
}

TEST(Functionals, PurityAndEntropies) {
  EXPECT_NEAR(purity(GaussianEnsemble(1.0, {0, 0})), 1.0, 1e-6);
  EXPECT_NEAR(purity(GaussianEnsemble(0.5, {0, 0})), 0.25, 1e-6);
  EXPECT_NEAR(entropy_vn(GaussianEnsemble(1.0, {0, 0})), 1.0 - std::log(2.0), 1e-5);
  EXPECT_NEAR(entropy_vn(GaussianEnsemble(0.5, {0, 0})), 1.0 - std::log(0.5), 1e-5);
  EXPECT_NEAR(entropy_renyi(GaussianEnsemble(1.0, {0, 0}), 2.0), 0.0, 1e-6);
  EXPECT_NEAR(entropy_renyi(GaussianEnsemble(0.5, {0, 0}), 2.0), std::log(4.0), 1e-5);
  const GaussianEnsemble g(0.8, {0.2, 0.1});
  EXPECT_NEAR(std::exp(-entropy_renyi(g, 2.0)), purity(g), 1e-8);
}

TEST(Functionals, LinearEntropyGapIsReportedOnly) {
  const GaussianEnsemble g(0.5, {0, 0});
  const double gap = std::abs((1.0 - purity(g)) - entropy_vn(g));
  RecordProperty("linear_entropy_gap", std::to_string(gap));
  EXPECT_TRUE(std::isfinite(gap));
}

TEST(Functionals, TranslationCovariance) {
  const GaussianEnsemble base(0.6, {0, 0});
  const double p = purity(base), s = entropy_vn(base), r = entropy_renyi(base, 3.0);
  for (int trial = 0; trial < 5; ++trial) {
    const GaussianEnsemble g(0.6, {oracle::uniform(-3, 3), oracle::uniform(-3, 3)});
    EXPECT_NEAR(purity(g), p, 1e-10);
    EXPECT_NEAR(entropy_vn(g), s, 1e-10);
    EXPECT_NEAR(entropy_renyi(g, 3.0), r, 1e-10);
  }
}

TEST(Functionals, RenyiErrors) {
  const GaussianEnsemble g(1.0, {0, 0});
  EXPECT_THROW(entropy_renyi(g, 1.0), Error);
  EXPECT_THROW(entropy_renyi(g, 0.0), Error);
  std::vector<double> s(64, 0.01);
  s[5] = -0.001;
  const GridWigner w(PhaseGrid(-1, 1, -1, 1, 8, 8), s);
  try {
    entropy_renyi(w, 2.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::negative_density);
  }
  EXPECT_NO_THROW(entropy_renyi(w, 2.0));
}

TEST(WignerTransform, GaussianFidelity) {
  const Wavefunction psi = gaussian_psi();
  const PhaseGrid grid(-4, 4, -4, 4, 64, 64);
  const GridWigner w = wigner_transform(psi, grid);
  const GaussianEnsemble g(1.0, {0, 0});
  double worst = 0.0;
  for (std::size_t j = 0; j < grid.nk(); ++j) {
    for (std::size_t i = 0; i < grid.nx(); ++i) {
      worst = std::max(worst, std::abs(w.at(i, j) - gaussian_eval(g, grid.x(i), grid.k(j))));
    }
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(WignerTransform, ShiftAndPhase) {
  const PhaseGrid grid(-4, 4, -4, 4, 48, 48);
  const GridWigner shifted = wigner_transform(gaussian_psi(0.75), grid);
  const GridWigner phased = wigner_transform(gaussian_psi(0.0, 1.1), grid);
  const GridWigner plain = wigner_transform(gaussian_psi(), grid);
  const GaussianEnsemble g(1.0, {0.75, 0});
  for (std::size_t j = 0; j < grid.nk(); ++j) {
    for (std::size_t i = 0; i < grid.nx(); ++i) {
      EXPECT_NEAR(shifted.at(i, j), gaussian_eval(g, grid.x(i), grid.k(j)), 1e-6);
      EXPECT_NEAR(phased.at(i, j), plain.at(i, j), 1e-14);
    }
  }
}

TEST(WignerTransform, FirstExcitedStateIsNegativeAtOrigin) {
  const Wavefunction psi = Wavefunction::sample(
      [](double x) { return std::complex<double>(x * std::exp(-0.5 * x * x), 0.0); }, -10, 10, 8001);
  const PhaseGrid grid(-5, 5, -5, 5, 80, 80);
  const GridWigner w = wigner_transform(psi, grid);
  EXPECT_NEAR(w.integral(), 1.0, 1e-6);
  EXPECT_NEAR(purity(w), 1.0, 1e-5);
  EXPECT_LE(purity(w), 1.0 + 1e-6);
  // W_1(0,0) = -1/pi; the nearest node sits half a cell away
  EXPECT_LT(w.value(0.0, 0.0), -0.3);
}

TEST(WignerTransform, MarginalMatchesDensity) {
  const Wavefunction psi = gaussian_psi(0.4);
  const PhaseGrid grid(-5, 5, -6, 6, 40, 96);
  const Marginal m = marginal(wigner_transform(psi, grid), Axis::x);
  for (std::size_t i = 0; i < m.coords.size(); ++i) EXPECT_NEAR(m.density[i], std::norm(psi(m.coords[i])), 1e-6);
}

TEST(WignerTransform, RejectsGridOutsideSupport) {
  EXPECT_THROW(wigner_transform(gaussian_psi(0.0, 0.0, 3.0, 401), PhaseGrid(-4, 4, -1, 1, 8, 8)), Error);
}

TEST(Wavefunction, ValidatesAndReads) {
  std::vector<std::complex<double>> a(10, 1.0);
  EXPECT_THROW(Wavefunction(0.0, 0.1, a), Error);
  std::vector<std::complex<double>> b(100, 1.0);
  EXPECT_THROW(Wavefunction(0.0, 0.1, b), Error);

  std::ostringstream text;
  text << "# x re im\n";
  for (int i = 0; i <= 200; ++i) {
    const double x = -5.0 + 0.05 * i;
    text << x << ' ' << std::exp(-0.5 * x * x) << " 0\n";
  }
  std::istringstream in(text.str());
  const Wavefunction psi = read_wavefunction(in);
  EXPECT_EQ(psi.size(), 201u);
  EXPECT_NEAR(psi.norm(), 1.0, 1e-12);

  std::istringstream bad("0 1 0\n0.1 1 0\n0.3 1 0\n");
  EXPECT_THROW(read_wavefunction(bad), Error);
}

TEST(GridWigner, FiniteDifferencePartials) {
  const GaussianEnsemble g(1.0, {0.1, -0.2});
  const GridWigner w = sample_state(g, PhaseGrid::centered(0, 0, 6, 256));
  for (int trial = 0; trial < 10; ++trial) {
    const double x = oracle::uniform(-1, 1), k = oracle::uniform(-1, 1);
    EXPECT_NEAR(w.partial(0, 0, x, k), gaussian_eval(g, x, k), 5e-4);
    for (int a = 0; a <= 3; ++a) {
      for (int b = 0; b + a <= 3; ++b) {
        const double exact = gaussian_mixed_partial(g, a, b, x, k);
        EXPECT_NEAR(w.partial(a, b, x, k), exact, 5e-3) << a << ',' << b;
      }
    }
  }
}
