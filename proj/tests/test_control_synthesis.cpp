#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "stlc/control_synthesis.hpp"
#include "stlc/errors.hpp"

using namespace stlc;

namespace {

const Scenario& reference() {
  static const Scenario scn =
      Scenario::make(32, MuSpec::builtin("x2"), 1.0, 16384, ProjectionSet::range(1, 12, 32), 0, 1);
  return scn;
}

ModalState tangent_part(const ModalState& s, const ModalState& base) {
  return project_tangent(ModalState(s.coeffs - base.coeffs), base);
}

}  // namespace

TEST(LinearizedControl, GroundPhaseTarget) {
  const Scenario& scn = reference();
  const double eps = 1e-3;
  ModalState psif = scn.ground(1.0);
  psif.coeffs *= cdouble(0.0, eps);
  const SynthesisResult r = linearized_control(scn, ModalState::zero(32), psif);
  EXPECT_NEAR(r.u.moment(0.0).real(), eps / scn.dipole.b[0], 1e-9);
  const ModalState Psi = propagate_linearized(scn, r.u, ModalState::zero(32));
  EXPECT_LT(hs_norm(ModalState(project_J(Psi, scn.J).coeffs - psif.coeffs), 0.0), 1e-8);
  EXPECT_TRUE(r.u.in_h0k());
}

TEST(LinearizedControl, RandomTangentData) {
  const Scenario& scn = reference();
  for (std::uint64_t seed = 1; seed <= 2; ++seed) {
    const ControlTask t = random_task(scn, 1e-2, seed);
    const ModalState g0 = ModalState::unit(32, 1), gT = scn.ground(1.0);
    const ModalState p0 = tangent_part(t.psi0, g0);
    const ModalState pf = project_tangent(ModalState(t.psif.coeffs - project_J(gT, scn.J).coeffs), gT);
    const SynthesisResult r = linearized_control(scn, p0, pf);
    EXPECT_LT(r.report.final_error, 1e-6);
    EXPECT_EQ(r.report.bc_values.size(), 1u);
    for (const auto& [m, v] : r.report.ratios) EXPECT_TRUE(std::isfinite(v)) << m;
  }
}

TEST(LinearizedControl, RejectsNonTangentAndOffSupportData) {
  const Scenario& scn = reference();
  EXPECT_THROW(linearized_control(scn, ModalState::zero(32), scn.ground(1.0)), TangencyViolation);
  ModalState off = ModalState::zero(32);
  off.coeffs[20] = 1e-3;
  EXPECT_THROW(linearized_control(scn, ModalState::zero(32), off), SupportViolation);
}

TEST(NonlinearControl, SmallTaskConverges) {
  const Scenario& scn = reference();
  const ControlTask task = random_task(scn, 1e-3, 11);
  const SynthesisResult r = nonlinear_control(scn, task);
  EXPECT_LE(r.report.iterations, 10);
  EXPECT_LE(r.report.final_error, 1e-8);
  EXPECT_LE(r.report.rho, 0.5);
  EXPECT_TRUE(r.u.in_h0k());
  for (int m = -2; m <= 1; ++m) {
    ASSERT_TRUE(r.report.ratios.count(m));
    EXPECT_TRUE(std::isfinite(r.report.ratios.at(m)));
  }
  const ModalState psiT = propagate_endpoint(scn, r.u, task.psi0);
  EXPECT_LT(hs_norm(ModalState(project_J(psiT, scn.J).coeffs - task.psif.coeffs), 3.0), 1e-8);
}

TEST(NonlinearControl, GroundToGroundIsZero) {
  const Scenario& scn = reference();
  const ControlTask task{ModalState::unit(32, 1), project_J(scn.ground(1.0), scn.J), 1e-3};
  const SynthesisResult r = nonlinear_control(scn, task);
  EXPECT_EQ(r.report.iterations, 0);
  EXPECT_EQ(r.u.sup_norm(), 0.0);
}

TEST(NonlinearControl, IterationCapCarriesHistory) {
  Scenario scn = reference();
  scn.cfg.max_fixed_point_iters = 0;
  const ControlTask task = random_task(scn, 1e-3, 4);
  try {
    nonlinear_control(scn, task);
    FAIL() << "expected NoConvergence";
  } catch (const NoConvergence& e) {
    ASSERT_EQ(e.history().size(), 1u);
    EXPECT_GT(e.history()[0], 0.0);
  }
}

TEST(NonlinearControl, RejectsOffSphereStart) {
  const Scenario& scn = reference();
  ControlTask task = random_task(scn, 1e-3, 4);
  task.psi0.coeffs *= 1.01;
  EXPECT_THROW(nonlinear_control(scn, task), SphereViolation);
}

TEST(RandomTask, Invariants) {
  const Scenario& scn = reference();
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const ControlTask t = random_task(scn, 1e-3, seed);
    EXPECT_NEAR(hs_norm(t.psi0, 0.0), 1.0, 1e-14);
    EXPECT_NEAR(hs_norm(t.psif, 0.0), 1.0, 1e-14);
    EXPECT_LT(hs_norm(ModalState(t.psif.coeffs - project_J(t.psif, scn.J).coeffs), 0.0), 1e-15);
    ModalState d0 = t.psi0;
    d0.coeffs[0] -= 1.0;
    EXPECT_LT(hs_norm(d0, 3.0), 1e-3);
  }
  const ControlTask a = random_task(scn, 1e-3, 9), b = random_task(scn, 1e-3, 9);
  EXPECT_EQ(a.psi0.coeffs, b.psi0.coeffs);
}

TEST(ShiftToOrigin, GlobalGroundPhase) {
  const EigenBasis B(4);
  const ControlTask t{free_evolution(B, ModalState::unit(4, 1), 0.3), ModalState::unit(4, 1), 1e-3};
  const ControlTask s = shift_to_origin(t, B, 0.3);
  EXPECT_LT(std::abs(s.psi0.coeffs[0] - 1.0), 1e-15);
}

TEST(DegenerateDipole, OddModesRejectedEvenModesControlled) {
  EXPECT_THROW(Scenario::make(32, MuSpec::builtin("x"), 1.0, 16384, ProjectionSet::range(1, 12, 32), 0, 0),
               DecayViolation);
  const Scenario scn = Scenario::make(32, MuSpec::builtin("x"), 1.0, 16384, ProjectionSet({2, 4, 6, 8, 10, 12}, 32), 0, 0);
  const ControlTask t = random_task(scn, 1e-3, 5);
  const SynthesisResult r = nonlinear_control(scn, t);
  EXPECT_LE(r.report.final_error, 1e-8);
}

TEST(RatioSweep, DeterministicAcrossThreadCounts) {
  const Scenario scn = Scenario::make(16, MuSpec::builtin("x2"), 1.0, 4096, ProjectionSet::range(1, 6, 16), 0, 0);
  const RatioSweep a = estimate_ratio_sweep(scn, 4, 1e-3, 1, 42);
  const RatioSweep b = estimate_ratio_sweep(scn, 4, 1e-3, 3, 42);
  ASSERT_EQ(a.cells.size(), b.cells.size());
  for (size_t i = 0; i < a.cells.size(); ++i) EXPECT_EQ(a.cells[i].max_ratio, b.cells[i].max_ratio);
  EXPECT_EQ(a.failures, 0);
  for (const auto& [m, g] : a.growth) EXPECT_GE(g, 1.0);
}

TEST(Sweeps, LogLogSlope) {
  std::vector<ScalingPoint> pts;
  for (double e : {1e-1, 1e-2, 1e-3}) pts.push_back({e, 3.0 * e * e, true, {}});
  pts.push_back({1e-4, 0.0, false, "skipped"});
  EXPECT_NEAR(loglog_slope(pts), 2.0, 1e-12);
}

TEST(Sweeps, SampleSeedIsStable) {
  EXPECT_EQ(sample_seed(1, 2), sample_seed(1, 2));
  EXPECT_NE(sample_seed(1, 2), sample_seed(1, 3));
  EXPECT_NE(sample_seed(1, 2), sample_seed(2, 2));
}
