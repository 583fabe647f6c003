#include <gtest/gtest.h>

#include <cmath>

#include "liesys/catalog.hpp"
#include "liesys/flows.hpp"
#include "test_support.hpp"

namespace liesys {
namespace {

using testing::max_abs;
using testing::Rng;

double rel(const CMat& a, const CMat& b) { return max_abs(a - b) / std::max(1.0, max_abs(b)); }

LinearControlSystem heisenberg_system(const Mat& d, const Vec& y) {
  const ModelPtr h = heisenberg_model();
  return LinearControlSystem(h, Derivation(h, d), {AlgebraElement(h, y)});
}

LinearControlSystem heisenberg_center_system(double p) {
  return heisenberg_system(heisenberg::derivation(1.0, 2.0, -3.0, -1.0, 0.5, -0.7), Vec(Eigen::Vector3d(0, 0, p)));
}

TEST(ParseMethod, Forms) {
  EXPECT_EQ(to_string(parse_method("product:64")), "product:64");
  EXPECT_EQ(to_string(parse_method("closed")), "closed");
  EXPECT_EQ(to_string(parse_method("rk4:1000")), "rk4:1000");
  for (const char* bad : {"product:0", "product:", "rk4:x", "euler", "product:-3", "rk4:10.5"}) {
    EXPECT_THROW(parse_method(bad), InputError) << bad;
  }
}

TEST(AutomorphismFlow, TrivialCases) {
  Rng rng(40);
  for (const ModelPtr& model : testing::catalog_models()) {
    const auto sys = testing::random_system(rng, model, 1);
    const GroupElement g = testing::random_group_element(rng, model);
    EXPECT_LE(max_abs(automorphism_flow(sys, 0.0, g).matrix() - g.matrix()), 1e-15) << model->name();
    const GroupElement e = GroupElement::identity(model);
    EXPECT_LE(max_abs(automorphism_flow(sys, 1.7, e).matrix() - e.matrix()), 1e-13) << model->name();
  }
}

TEST(AutomorphismFlow, HeisenbergDiagonal) {
  const auto sys = heisenberg_system(heisenberg::derivation(0.5, 0.0, 0.0, -1.5, 0.0, 0.0), Vec::Unit(3, 0));
  const heisenberg::Coords g(0.7, -1.2, 2.0);
  const double t = 0.9;
  const auto out = heisenberg::coords(automorphism_flow(sys, t, GroupElement(heisenberg_model(), heisenberg::element(g))).matrix());
  EXPECT_NEAR(out(0), std::exp(0.5 * t) * g(0), 1e-14);
  EXPECT_NEAR(out(1), std::exp(-1.5 * t) * g(1), 1e-14);
  EXPECT_NEAR(out(2), std::exp(-1.0 * t) * g(2), 1e-14);
}

TEST(AutomorphismFlow, BackendErrors) {
  const auto heis = heisenberg_center_system(1.0);
  const GroupElement e = GroupElement::identity(heisenberg_model());
  EXPECT_THROW(automorphism_flow(heis, 1.0, e, FlowBackend::inner_conjugation), InputError);

  const ModelPtr sl2 = sl2_model();
  const LinearControlSystem sys(sl2, derivation_from_inner(sl2, Vec::Unit(3, 0)), {AlgebraElement(sl2, Vec::Unit(3, 1))});
  EXPECT_THROW(automorphism_flow(sys, 1.0, GroupElement::identity(sl2), FlowBackend::exp_log_transport), InputError);
  EXPECT_THROW(automorphism_flow(sys, 1.0, GroupElement::identity(so3_model())), InputError);
}

TEST(AutomorphismFlow, InnerBackendOnNilpotentGroups) {
  // An inner derivation on the Heisenberg group runs through both backends.
  Rng rng(41);
  const ModelPtr h = heisenberg_model();
  const LinearControlSystem sys(h, derivation_from_inner(h, testing::random_vec(rng, 3)), {AlgebraElement(h, Vec::Unit(3, 2))});
  for (int trial = 0; trial < 50; ++trial) {
    const GroupElement g = testing::random_group_element(rng, h, 2.0);
    const double t = testing::uniform(rng, -2, 2);
    EXPECT_LE(max_abs(automorphism_flow(sys, t, g, FlowBackend::inner_conjugation).matrix() -
                      automorphism_flow(sys, t, g, FlowBackend::exp_log_transport).matrix()),
              1e-12);
  }
}

// Automorphism, one-parameter group and linearization laws for every
// catalog model; Heisenberg and abelian run the exp-log backend.
TEST(AutomorphismFlow, Laws) {
  Rng rng(42);
  for (const ModelPtr& model : testing::catalog_models()) {
    for (int trial = 0; trial < 100; ++trial) {
      const auto sys = testing::random_system(rng, model, 1);
      const GroupElement g = testing::random_group_element(rng, model);
      const GroupElement h = testing::random_group_element(rng, model);
      const double t = testing::uniform(rng, -1, 1), s = testing::uniform(rng, -1, 1);

      const CMat lhs = automorphism_flow(sys, t, g * h).matrix();
      EXPECT_LE(rel(lhs, (automorphism_flow(sys, t, g) * automorphism_flow(sys, t, h)).matrix()), 1e-9) << model->name();

      const CMat composed = automorphism_flow(sys, t, automorphism_flow(sys, s, g)).matrix();
      EXPECT_LE(rel(automorphism_flow(sys, t + s, g).matrix(), composed), 1e-9) << model->name();

      const Vec y = testing::random_algebra_coords(rng, *model);
      const GroupElement exp_y(model, group_exp(*model, model->to_matrix(y)));
      const Vec moved = expm(sys.derivation().matrix(), t) * y;
      EXPECT_LE(rel(automorphism_flow(sys, t, exp_y).matrix(), group_exp(*model, model->to_matrix(moved))), 1e-9)
          << model->name();
    }
  }
}

TEST(LinearField, MatchesDifferenceOfFlow) {
  Rng rng(43);
  for (const ModelPtr& model : testing::catalog_models()) {
    for (int trial = 0; trial < 20; ++trial) {
      const auto sys = testing::random_system(rng, model, 1);
      const CMat g = testing::random_group_element(rng, model).matrix();
      EXPECT_LE(rel(linear_field(sys, g), linear_field_difference(sys, g)), 1e-8) << model->name();
    }
  }
}

TEST(LinearField, VanishesAtIdentity) {
  Rng rng(44);
  for (const ModelPtr& model : testing::catalog_models()) {
    const auto sys = testing::random_system(rng, model, 1);
    const int n = model->ambient_size();
    EXPECT_LE(max_abs(linear_field(sys, CMat::Identity(n, n))), 1e-15) << model->name();
  }
}

TEST(ProductFormula, ZeroControl) {
  Rng rng(45);
  for (const ModelPtr& model : testing::catalog_models()) {
    const auto sys = testing::random_system(rng, model, 2);
    const int n = model->ambient_size();
    for (int factors : {1, 7, 64}) {
      EXPECT_LE(max_abs(product_formula_solution(sys, Vec::Zero(2), 1.3, factors).matrix() - CMat::Identity(n, n)),
                1e-13);
    }
  }
  EXPECT_THROW(product_formula_solution(heisenberg_center_system(1.0), Vec::Ones(1), 1.0, 0), InputError);
}

TEST(ProductFormula, HeisenbergCenterExact) {
  const auto sys = heisenberg_center_system(2.0);
  for (int n : {1, 2, 3, 17, 256, 4096}) {
    const auto g = heisenberg::coords(product_formula_solution(sys, Vec::Constant(1, 0.8), 1.5, n).matrix());
    EXPECT_LE((g - heisenberg::Coords(0, 0, 2.4)).cwiseAbs().maxCoeff(), 1e-12) << n;
  }
}

TEST(ProductFormula, HeisenbergCenterRiemannSum) {
  // c = a11 + a22 = 0.5.
  const auto sys = heisenberg_system(heisenberg::derivation(1.0, 0.3, 0.2, -0.5, 0.1, 0.4), Vec(Eigen::Vector3d(0, 0, 1.5)));
  const double u = 0.6, t = 1.2, c = 0.5, p = 1.5;
  for (int n : {1, 5, 64}) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += std::exp(i * c * t / n);
    const auto g = heisenberg::coords(product_formula_solution(sys, Vec::Constant(1, u), t, n).matrix());
    EXPECT_NEAR(g(2), u * p * (t / n) * sum, 1e-13);
    EXPECT_NEAR(g(0), 0.0, 1e-15);
    EXPECT_NEAR(g(1), 0.0, 1e-15);
  }
  const auto limit = heisenberg::coords(product_formula_solution(sys, Vec::Constant(1, u), t, 1 << 16).matrix());
  EXPECT_NEAR(limit(2), u * p * (std::exp(c * t) - 1.0) / c, 1e-4);
}

TEST(ProductFormula, MatchesExplicitFactors) {
  Rng rng(46);
  for (const ModelPtr& model : testing::catalog_models()) {
    const auto sys = testing::random_system(rng, model, 2);
    const Vec u = testing::random_vec(rng, 2);
    const double t = 0.8;
    const int n = 9;
    const Vec w = sys.control_direction(u);
    const GroupElement factor = GroupElement::unchecked(model, group_exp(*model, model->to_matrix(w), t / n));
    GroupElement expected = GroupElement::identity(model);
    for (int i = 0; i < n; ++i) expected = expected * automorphism_flow(sys, i * t / n, factor);
    EXPECT_LE(rel(product_formula_solution(sys, u, t, n).matrix(), expected.matrix()), 1e-12) << model->name();
  }
}

TEST(InnerClosedForm, TrivialCases) {
  Rng rng(47);
  const ModelPtr model = gl_plus_model(3);
  const auto sys = testing::random_system(rng, model, 2);
  EXPECT_LE(max_abs(inner_closed_form_solution(sys, Vec::Zero(2), 1.0).matrix() - CMat::Identity(3, 3)), 1e-14);

  const LinearControlSystem drift_free(model, derivation_from_inner(model, Vec::Zero(9)), sys.control_fields());
  const Vec u = testing::random_vec(rng, 2);
  EXPECT_LE(rel(inner_closed_form_solution(drift_free, u, 0.7).matrix(),
                expm(model->to_matrix(drift_free.control_direction(u)), 0.7)),
            1e-15);
  EXPECT_THROW(inner_closed_form_solution(heisenberg_center_system(1.0), Vec::Ones(1), 1.0), InputError);
}

TEST(InnerClosedForm, Sl2AgainstOracle) {
  const ModelPtr sl2 = sl2_model();
  const LinearControlSystem sys(sl2, derivation_from_inner(sl2, Vec::Unit(3, 0)), {AlgebraElement(sl2, Vec::Unit(3, 1))});
  const Vec u = Vec::Ones(1);
  const auto oracle = rk4_oracle(sys, PiecewiseControl::constant(u, 0.5), GroupElement::identity(sl2), 10000);
  EXPECT_LE(max_abs(inner_closed_form_solution(sys, u, 0.5).matrix() - oracle.endpoint().matrix()), 1e-8);
}

TEST(SolvePiecewise, Shape) {
  Rng rng(48);
  const auto sys = testing::random_system(rng, so3_model(), 1);
  const PiecewiseControl control({{0.5, Vec::Ones(1)}, {0.25, -Vec::Ones(1)}});
  const auto traj = solve_piecewise(sys, control, ClosedMethod{}, 4);
  ASSERT_EQ(traj.points.size(), 9u);
  EXPECT_EQ(traj.times.front(), 0.0);
  EXPECT_EQ(traj.times[4], 0.5);
  EXPECT_EQ(traj.times.back(), 0.75);
  EXPECT_EQ(traj.points.front().matrix(), CMat(CMat::Identity(3, 3)));
  for (std::size_t i = 1; i < traj.times.size(); ++i) EXPECT_GT(traj.times[i], traj.times[i - 1]);
  EXPECT_EQ(traj.method, "closed");
  EXPECT_THROW(solve_piecewise(sys, control, ClosedMethod{}, 0), InputError);
  EXPECT_THROW(solve_piecewise(heisenberg_center_system(1.0), PiecewiseControl::constant(Vec::Ones(1), 1.0), ClosedMethod{}, 1),
               InputError);
}

TEST(SolvePiecewise, SingleSegmentMatchesSolver) {
  Rng rng(49);
  const auto sys = testing::random_system(rng, sl2_model(), 2);
  const Vec u = testing::random_vec(rng, 2);
  const auto traj = solve_piecewise(sys, PiecewiseControl::constant(u, 1.0), ProductMethod{32}, 5);
  for (std::size_t j = 1; j < traj.points.size(); ++j) {
    EXPECT_EQ(traj.points[j].matrix(), product_formula_solution(sys, u, traj.times[j], 32).matrix());
  }
}

TEST(SolvePiecewise, EqualSegmentsFlowProperty) {
  Rng rng(50);
  for (const ModelPtr& model : testing::catalog_models()) {
    const auto sys = testing::random_system(rng, model, 2);
    const Vec u = testing::random_vec(rng, 2);
    const SolveMethod method = sys.derivation().is_inner() ? SolveMethod{ClosedMethod{}} : SolveMethod{Rk4Method{2000}};
    const auto whole = solve_piecewise(sys, PiecewiseControl::constant(u, 1.4), method, 1);
    const auto split = solve_piecewise(sys, PiecewiseControl({{0.7, u}, {0.7, u}}), method, 1);
    EXPECT_LE(rel(split.endpoint().matrix(), whole.endpoint().matrix()), 1e-8) << model->name();
  }
}

TEST(SolvePiecewise, HeisenbergCenterSegmentsAdd) {
  const auto sys = heisenberg_center_system(1.5);
  const PiecewiseControl control({{0.4, Vec::Constant(1, 2.0)}, {1.1, Vec::Constant(1, -0.5)}});
  for (const SolveMethod& method : {SolveMethod{ProductMethod{1}}, SolveMethod{ProductMethod{50}}, SolveMethod{Rk4Method{1000}}}) {
    const auto g = heisenberg::coords(solve_piecewise(sys, control, method, 3).endpoint().matrix());
    EXPECT_LE((g - heisenberg::Coords(0, 0, 1.5 * (2.0 * 0.4 - 0.5 * 1.1))).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(SolvePiecewise, TrajectoriesStayInGroup) {
  Rng rng(51);
  for (const ModelPtr& model : testing::catalog_models()) {
    const auto sys = testing::random_system(rng, model, 2);
    const PiecewiseControl control({{0.6, testing::random_vec(rng, 2)}, {0.6, testing::random_vec(rng, 2)}});
    for (const SolveMethod& method : {SolveMethod{ProductMethod{16}}, SolveMethod{Rk4Method{500}}}) {
      const auto traj = solve_piecewise(sys, control, method, 10);
      EXPECT_LE(traj.max_constraint_drift, 1e-8) << model->name();
      EXPECT_TRUE(traj.warnings.empty());
      for (const GroupElement& g : traj.points) EXPECT_LE(model->constraint_residual(g.matrix()), 1e-8);
    }
  }
}

TEST(TranslateSolution, TrivialCases) {
  Rng rng(52);
  const auto sys = testing::random_system(rng, so21_model(), 1);
  const auto traj = solve_piecewise(sys, PiecewiseControl::constant(Vec::Ones(1), 1.0), ClosedMethod{}, 5);
  const auto same = translate_solution(sys, traj, GroupElement::identity(so21_model()));
  for (std::size_t i = 0; i < traj.points.size(); ++i) {
    EXPECT_LE(max_abs(same.points[i].matrix() - traj.points[i].matrix()), 1e-14);
  }
  const GroupElement g = testing::random_group_element(rng, so21_model());
  EXPECT_LE(max_abs(translate_solution(sys, traj, g).points.front().matrix() - g.matrix()), 1e-15);

  Trajectory shifted = traj;
  shifted.times.front() = 0.1;
  EXPECT_THROW(translate_solution(sys, shifted, g), InputError);
}

TEST(TranslateSolution, Sl2AgainstOracle) {
  Rng rng(53);
  const ModelPtr sl2 = sl2_model();
  for (int trial = 0; trial < 10; ++trial) {
    const auto sys = testing::random_system(rng, sl2, 2);
    const PiecewiseControl control({{0.5, testing::random_vec(rng, 2)}, {0.5, testing::random_vec(rng, 2)}});
    const GroupElement g = testing::random_group_element(rng, sl2);
    const auto moved = translate_solution(sys, solve_piecewise(sys, control, ClosedMethod{}, 10), g);
    const auto oracle = rk4_oracle(sys, control, g, 10000, 10);
    ASSERT_EQ(moved.points.size(), oracle.points.size());
    for (std::size_t i = 0; i < moved.points.size(); ++i) {
      EXPECT_NEAR(moved.times[i], oracle.times[i], 1e-14);
      EXPECT_LE(max_abs(moved.points[i].matrix() - oracle.points[i].matrix()), 1e-7);
    }
  }
}

TEST(Rk4Oracle, StaysAtIdentityWithoutControl) {
  Rng rng(54);
  const auto sys = testing::random_system(rng, gl_plus_model(2), 1);
  const auto traj = rk4_oracle(sys, PiecewiseControl::constant(Vec::Zero(1), 1.0), GroupElement::identity(gl_plus_model(2)), 100);
  for (const GroupElement& g : traj.points) EXPECT_LE(max_abs(g.matrix() - CMat::Identity(2, 2)), 1e-10);
  EXPECT_EQ(traj.points.size(), 101u);
}

TEST(Rk4Oracle, HeisenbergCenter) {
  const auto sys = heisenberg_center_system(2.0);
  const auto traj = rk4_oracle(sys, PiecewiseControl::constant(Vec::Constant(1, 0.8), 1.0),
                               GroupElement::identity(heisenberg_model()), 1000);
  const auto g = heisenberg::coords(traj.endpoint().matrix());
  EXPECT_LE((g - heisenberg::Coords(0, 0, 1.6)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Rk4Oracle, GlRotationPlusIdentity) {
  Mat a(2, 2);
  a << 0, -1, 1, 0;
  const auto sys = gl_linear_system(a, {Mat::Identity(2, 2)});
  const auto traj = rk4_oracle(sys, PiecewiseControl::constant(Vec::Ones(1), 1.0), GroupElement::identity(gl_plus_model(2)), 1000);
  const Mat expected = expm(Mat(a + Mat::Identity(2, 2))) * expm(a, -1.0);
  EXPECT_LE(max_abs(traj.endpoint().matrix() - to_complex(expected)), 1e-8);
}

TEST(Rk4Oracle, Guards) {
  const auto sys = heisenberg_center_system(1.0);
  const auto control = PiecewiseControl::constant(Vec::Ones(1), 1.0);
  EXPECT_THROW(rk4_oracle(sys, control, GroupElement::identity(heisenberg_model()), 9), NumericalError);
  EXPECT_THROW(rk4_oracle(sys, control, GroupElement::identity(sl2_model()), 100), InputError);
}

TEST(OdeResidual, IdentityTrajectory) {
  Rng rng(55);
  const auto sys = testing::random_system(rng, sl2_model(), 1);
  const auto control = PiecewiseControl::constant(Vec::Zero(1), 1.0);
  const auto traj = solve_piecewise(sys, control, ClosedMethod{}, 200);
  EXPECT_LE(ode_residual(sys, traj, control), 1e-9);
}

TEST(OdeResidual, ClosedFormSecondOrder) {
  Rng rng(56);
  const auto sys = testing::random_system(rng, sl2_model(), 2);
  const auto control = PiecewiseControl::constant(testing::random_vec(rng, 2), 1.0);
  const auto traj = solve_piecewise(sys, control, ClosedMethod{}, 1000);
  const double r = ode_residual(sys, traj, control);
  EXPECT_LE(r, 1e-4);
  EXPECT_LE(r, 1e-5);
}

TEST(OdeResidual, DetectsCorruption) {
  Rng rng(57);
  const auto sys = testing::random_system(rng, sl2_model(), 1);
  const auto control = PiecewiseControl::constant(Vec::Ones(1), 1.0);
  auto traj = solve_piecewise(sys, control, ClosedMethod{}, 1000);
  CMat bumped = traj.points[500].matrix();
  bumped(0, 1) += 1e-2;
  traj.points[500] = GroupElement::unchecked(sl2_model(), bumped);
  EXPECT_GT(ode_residual(sys, traj, control), 1e-3);
}

TEST(OdeResidual, SkipsSwitchingTimes) {
  Rng rng(58);
  const auto sys = testing::random_system(rng, so3_model(), 1);
  const PiecewiseControl control({{0.5, Vec::Constant(1, 3.0)}, {0.5, Vec::Constant(1, -3.0)}});
  const auto traj = solve_piecewise(sys, control, ClosedMethod{}, 500);
  EXPECT_LE(ode_residual(sys, traj, control), 1e-4);
}

TEST(OdeResidual, NeedsSamples) {
  Rng rng(59);
  const auto sys = testing::random_system(rng, sl2_model(), 1);
  const auto control = PiecewiseControl::constant(Vec::Ones(1), 1.0);
  EXPECT_THROW(ode_residual(sys, solve_piecewise(sys, control, ClosedMethod{}, 50), control), InputError);
}

}  // namespace
}  // namespace liesys
