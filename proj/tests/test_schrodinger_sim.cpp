#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracle_values.hpp"
#include "stlc/errors.hpp"
#include "stlc/schrodinger_sim.hpp"

using namespace stlc;

namespace {

constexpr double kPi = std::numbers::pi;

Scenario make(int n_steps, int j_max = 16, double T = 1.0) {
  return Scenario::make(j_max, MuSpec::builtin("x2"), T, n_steps, ProjectionSet::range(1, std::min(8, j_max), j_max), 0,
                        0);
}

ControlSignal smooth(const TimeGrid& g, double amp = 1.0) {
  return ControlSignal::from_core_function(g, 0, [amp](double t) {
    const double s = std::sin(kPi * t);
    return amp * s * s * (1.0 + std::cos(29.6 * t));
  });
}

ModalState random_unit(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::VectorXcd c(n);
  for (int j = 0; j < n; ++j) c[j] = cdouble(g(rng), g(rng));
  return ModalState(c / c.norm());
}

}  // namespace

TEST(Propagate, ConservesNorm) {
  const Scenario scn = make(2048);
  const Trajectory tr = propagate_nonlinear(scn, 0.5 * smooth(scn.grid), random_unit(16, 1));
  ASSERT_EQ(static_cast<int>(tr.size()), scn.grid.nodes());
  for (const auto& s : tr) EXPECT_NEAR(hs_norm(s, 0.0), 1.0, 1e-12);
}

TEST(Propagate, FreeFlightIsExact) {
  const Scenario scn = make(64);
  const ModalState c = random_unit(16, 2);
  const ModalState e = propagate_endpoint(scn, ControlSignal::zero(scn.grid, 0), c);
  for (int j = 1; j <= 16; ++j) {
    EXPECT_LT(std::abs(e.coeffs[j - 1] - c.coeffs[j - 1] * std::polar(1.0, -scn.basis.lambda(j))), 1e-13);
  }
  const ModalState g = propagate_endpoint(scn, ControlSignal::zero(scn.grid, 0), ModalState::unit(16, 1));
  EXPECT_LT(hs_norm(ModalState(g.coeffs - scn.ground(1.0).coeffs), 0.0), 1e-14);
}

TEST(Propagate, SecondOrderSelfConvergence) {
  std::vector<ModalState> ends;
  for (int n : {512, 1024, 2048}) {
    const Scenario scn = make(n);
    ends.push_back(propagate_endpoint(scn, smooth(scn.grid), ModalState::unit(16, 1)));
  }
  const double d0 = (ends[0].coeffs - ends[1].coeffs).norm();
  const double d1 = (ends[1].coeffs - ends[2].coeffs).norm();
  EXPECT_NEAR(d0 / d1, 4.0, 0.3);
}

TEST(Propagate, AgreesWithDuhamelIteration) {
  const Scenario scn = make(4096);
  const ControlSignal u = 1e-2 * smooth(scn.grid);
  const ModalState a = propagate_endpoint(scn, u, ModalState::unit(16, 1));
  const ModalState b = duhamel_reference(scn, u, ModalState::unit(16, 1), 4);
  EXPECT_LT((a.coeffs - b.coeffs).norm(), 1e-6);
}

TEST(Propagate, RejectsCoarseGrid) {
  const Scenario scn = make(8);
  EXPECT_THROW(propagate_nonlinear(scn, smooth(scn.grid, 50.0), ModalState::unit(16, 1)), GridTooCoarse);
}

TEST(Duhamel, ConstantGroundSourceMatchesOracle) {
  const double T = 0.37;
  const Scenario scn = make(370, 8, T);
  SourceTerm f;
  f.samples.assign(scn.grid.nodes(), ModalState::unit(8, 1));
  const Trajectory G = duhamel_integral(scn, f);
  const cdouble g = G.back().coeffs[0];
  EXPECT_NEAR(g.real(), oracle::duhamel_mode1[0], 1e-13);
  EXPECT_NEAR(g.imag(), oracle::duhamel_mode1[1], 1e-13);
  const double lam = kPi * kPi;
  EXPECT_LT(std::abs(g - (1.0 - std::polar(1.0, -lam * T)) / cdouble(0, lam)), 1e-13);
  for (int j = 1; j < 8; ++j) EXPECT_EQ(G.back().coeffs[j], cdouble(0.0));
}

TEST(Linearized, FiniteDifferenceConsistency) {
  const Scenario scn = make(4096);
  const ControlSignal u = smooth(scn.grid);
  const ModalState Psi = propagate_linearized(scn, u, ModalState::zero(16));
  const ModalState gT = scn.ground(1.0);
  std::vector<double> err;
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    const ModalState psi = propagate_endpoint(scn, eps * u, ModalState::unit(16, 1));
    err.push_back(((psi.coeffs - gT.coeffs) / eps - Psi.coeffs).norm());
  }
  EXPECT_NEAR(std::log10(err[0] / err[1]), 1.0, 0.1);
  EXPECT_NEAR(std::log10(err[1] / err[2]), 1.0, 0.1);
}

TEST(Linearized, IsLinearInControl) {
  const Scenario scn = make(4096);
  const ControlSignal u = smooth(scn.grid);
  const ModalState a = propagate_linearized(scn, u, ModalState::zero(16));
  const ModalState b = propagate_linearized(scn, 3.0 * u, ModalState::zero(16));
  EXPECT_LT((b.coeffs - 3.0 * a.coeffs).norm(), 1e-12 * b.coeffs.norm());
}

TEST(EndpointMap, GroundStateIsFixed) {
  const Scenario scn = make(256);
  const EndpointValue v = endpoint_map(scn, ModalState::unit(16, 1), ControlSignal::zero(scn.grid, 0));
  EXPECT_LT(hs_norm(v.projected, 0.0), 1e-14);

  const Scenario off = Scenario::make(16, MuSpec::builtin("x2"), 1.0, 256, ProjectionSet({2, 3}, 16), 0, 0);
  const EndpointValue w = endpoint_map(off, ModalState::unit(16, 1), ControlSignal::zero(off.grid, 0));
  EXPECT_LT(hs_norm(w.projected, 0.0), 1e-14);
}

TEST(EndpointMap, SecondComponentIsTangent) {
  const Scenario scn = make(2048);
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    ModalState psi0 = ModalState::unit(16, 1);
    psi0.coeffs += 1e-3 * random_unit(16, seed).coeffs;
    psi0.coeffs /= psi0.coeffs.norm();
    const EndpointValue v = endpoint_map(scn, psi0, (1e-2 * seed) * smooth(scn.grid));
    EXPECT_LT(std::abs(inner(v.projected, scn.ground(1.0)).real()), 1e-14);
  }
}

TEST(QuadraticRemainder, ScalesQuadratically) {
  const Scenario scn = make(4096);
  const ControlSignal u = smooth(scn.grid);
  const double r1 = hs_norm(quadratic_remainder(scn, ModalState::unit(16, 1), 1e-2 * u), 0.0);
  const double r2 = hs_norm(quadratic_remainder(scn, ModalState::unit(16, 1), 1e-3 * u), 0.0);
  EXPECT_NEAR(std::log10(r1 / r2), 2.0, 0.1);
}

// sup_t |psi(t)|_{H^3} / |psi0|_{H^3} stays bounded: doubling the sample barely moves the max.
TEST(Propagate, RegularityRatioStableUnderSampleDoubling) {
  const Scenario scn = make(2048);
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> amp(0.0, 1.0), freq(0.0, 40.0);
  auto max_ratio = [&](int count) {
    double worst = 0.0;
    for (int s = 0; s < count; ++s) {
      Eigen::VectorXcd c = random_unit(16, 500 + s).coeffs;
      for (int j = 0; j < 16; ++j) c[j] /= std::pow(j + 1.0, 4);
      const ModalState psi0(c / c.norm());
      const double a = amp(rng), f = freq(rng);
      const ControlSignal u = ControlSignal::from_core_function(scn.grid, 0, [a, f](double t) {
        return a * std::sin(kPi * t) * std::cos(f * t);
      });
      double top = 0.0;
      for (const auto& st : propagate_nonlinear(scn, u, psi0)) top = std::max(top, hs_norm(st, 3.0));
      worst = std::max(worst, top / hs_norm(psi0, 3.0));
    }
    return worst;
  };
  const double r4 = max_ratio(4), r8 = max_ratio(8);
  EXPECT_TRUE(std::isfinite(r8));
  EXPECT_LE(r8, 2.0 * r4);
}
