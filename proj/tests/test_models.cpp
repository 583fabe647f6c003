#include <gtest/gtest.h>

#include "liesys/catalog.hpp"
#include "liesys/models.hpp"
#include "test_support.hpp"

namespace liesys {
namespace {

using testing::Rng;

TEST(StructureConstants, CatalogMatchesMatrixBrackets) {
  for (const ModelPtr& model : testing::catalog_models()) {
    const StructureConstants recomputed = structure_constants_from_basis(model->basis());
    EXPECT_LE(model->structure_constants().max_abs_difference(recomputed), 1e-10) << model->name();
  }
}

TEST(StructureConstants, Antisymmetric) {
  for (const ModelPtr& model : testing::catalog_models()) {
    const auto& c = model->structure_constants();
    for (int k = 0; k < model->dim(); ++k)
      for (int i = 0; i < model->dim(); ++i)
        for (int j = 0; j < model->dim(); ++j) EXPECT_EQ(c(k, i, j), -c(k, j, i));
  }
}

TEST(ClassFlags, Catalog) {
  EXPECT_EQ(heisenberg_model()->flags(), (ClassFlags{true, true, false}));
  EXPECT_EQ(abelian_model(2)->flags(), (ClassFlags{true, true, false}));
  EXPECT_EQ(gl_plus_model(2)->flags(), (ClassFlags{false, false, false}));
  for (const ModelPtr& m : {sl2_model(), su2_model(), so3_model(), so21_model()}) {
    EXPECT_EQ(m->flags(), (ClassFlags{false, false, true})) << m->name();
  }
}

TEST(LieGroupModel, RejectsInconsistentConstants) {
  LieGroupModel::Definition def;
  def.name = "broken";
  def.kind = GroupKind::heisenberg;
  def.ambient_size = 3;
  def.basis = heisenberg_model()->basis();
  def.structure_constants = StructureConstants(3);
  def.flags = {true, true, false};
  EXPECT_THROW(LieGroupModel{def}, InputError);
}

TEST(LieGroupModel, RejectsDependentBasis) {
  LieGroupModel::Definition def;
  def.name = "dependent";
  def.ambient_size = 2;
  CMat e = CMat::Zero(2, 2);
  e(0, 1) = 1.0;
  def.basis = {e, CMat(2.0 * e)};
  def.structure_constants = StructureConstants(2);
  def.flags = {true, true, false};
  EXPECT_THROW(LieGroupModel{def}, InputError);
}

TEST(LieGroupModel, CoordinateRoundTrip) {
  Rng rng(20);
  for (const ModelPtr& model : testing::catalog_models()) {
    const Vec v = testing::random_vec(rng, model->dim());
    EXPECT_LE((model->to_coords(model->to_matrix(v)) - v).cwiseAbs().maxCoeff(), 1e-14) << model->name();
    EXPECT_LE(model->algebra_residual(model->to_matrix(v)), 1e-14);
  }
}

TEST(LieGroupModel, CoordinateBracketMatchesMatrices) {
  Rng rng(21);
  for (const ModelPtr& model : testing::catalog_models()) {
    const Vec a = testing::random_vec(rng, model->dim()), b = testing::random_vec(rng, model->dim());
    const CMat lhs = model->to_matrix(model->bracket(a, b));
    const CMat rhs = bracket(model->to_matrix(a), model->to_matrix(b));
    EXPECT_LE(testing::max_abs(lhs - rhs), 1e-13) << model->name();
  }
}

TEST(GroupElement, ConstraintChecked) {
  Mat bad = Mat::Identity(2, 2);
  bad(0, 0) = 2.0;
  EXPECT_THROW(GroupElement(sl2_model(), to_complex(bad)), InputError);
  EXPECT_NO_THROW(GroupElement(gl_plus_model(2), to_complex(bad)));
  bad(0, 0) = -1.0;
  EXPECT_THROW(GroupElement(gl_plus_model(2), to_complex(bad)), InputError);

  CMat lower = CMat::Identity(3, 3);
  lower(2, 0) = 0.5;
  EXPECT_THROW(GroupElement(heisenberg_model(), lower), InputError);
  EXPECT_THROW(GroupElement(so3_model(), CMat(2.0 * CMat::Identity(3, 3))), InputError);
  EXPECT_THROW(GroupElement(sl2_model(), CMat::Identity(3, 3)), InputError);
}

TEST(GroupElement, ExponentialsAreValid) {
  Rng rng(22);
  for (const ModelPtr& model : testing::catalog_models()) {
    for (int trial = 0; trial < 20; ++trial) {
      EXPECT_NO_THROW(testing::random_group_element(rng, model, 3.0)) << model->name();
    }
  }
}

TEST(GroupElement, ProductOfDifferentGroupsRejected) {
  EXPECT_THROW(GroupElement::identity(so3_model()) * GroupElement::identity(so21_model()), InputError);
}

TEST(DerivationFromInner, ZeroGenerator) {
  const Derivation d = derivation_from_inner(sl2_model(), Vec::Zero(3));
  EXPECT_EQ(d.matrix(), Mat::Zero(3, 3));
  EXPECT_TRUE(d.is_inner());
}

TEST(DerivationFromInner, HeisenbergX1) {
  const Derivation d = derivation_from_inner(heisenberg_model(), Vec::Unit(3, 0));
  Mat expected = Mat::Zero(3, 3);
  expected(2, 1) = 1.0;  // X2 -> X3
  EXPECT_EQ(d.matrix(), expected);
}

TEST(DerivationFromInner, Sl2H) {
  const Derivation d = derivation_from_inner(sl2_model(), Vec::Unit(3, 0));
  Mat expected = Mat::Zero(3, 3);
  expected.diagonal() << 0, 2, -2;
  EXPECT_LE((d.matrix() - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(DerivationFromInner, AlwaysPassesLeibniz) {
  Rng rng(23);
  for (const ModelPtr& model : testing::catalog_models()) {
    for (int trial = 0; trial < 50; ++trial) {
      const Derivation d = derivation_from_inner(model, testing::random_vec(rng, model->dim(), 3.0));
      EXPECT_TRUE(validate_derivation(d).empty()) << model->name();
    }
  }
}

TEST(Derivation, InnerGeneratorMustMatch) {
  EXPECT_THROW(Derivation(sl2_model(), Mat::Identity(3, 3), Vec(Vec::Unit(3, 0))), InputError);
}

TEST(ValidateDerivation, ZeroIsValid) {
  EXPECT_TRUE(validate_derivation(Derivation(so3_model(), Mat::Zero(3, 3))).empty());
}

TEST(ValidateDerivation, HeisenbergTemplate) {
  const Derivation d(heisenberg_model(), heisenberg::derivation(1.0, -2.0, 0.5, 3.0, 0.25, -1.0));
  EXPECT_TRUE(validate_derivation(d).empty());
}

TEST(ValidateDerivation, HeisenbergWrongTrace) {
  Mat m = heisenberg::derivation(1.0, 0.0, 0.0, 2.0, 0.0, 0.0);
  m(2, 2) = 4.0;
  const auto violations = validate_derivation(Derivation(heisenberg_model(), m));
  ASSERT_EQ(violations.size(), 1u);
  EXPECT_EQ(violations[0].i, 0);
  EXPECT_EQ(violations[0].j, 1);
  EXPECT_NEAR(violations[0].residual, 1.0, 1e-14);
}

TEST(ValidateDerivation, AnyMatrixOnAbelian) {
  Rng rng(24);
  EXPECT_TRUE(validate_derivation(Derivation(abelian_model(3), testing::random_mat(rng, 3, 3))).empty());
}

TEST(FindInnerGenerator, RecoversAd) {
  Rng rng(25);
  for (const ModelPtr& model : {sl2_model(), su2_model(), so3_model(), so21_model()}) {
    const Vec x = testing::random_vec(rng, 3);
    const auto found = find_inner_generator(model, model->ad(x));
    ASSERT_TRUE(found.has_value());
    EXPECT_LE((*found - x).cwiseAbs().maxCoeff(), 1e-12);
  }
  Mat rot(2, 2);
  rot << 0, -1, 1, 0;
  EXPECT_FALSE(find_inner_generator(abelian_model(2), rot).has_value());
  EXPECT_FALSE(find_inner_generator(heisenberg_model(), heisenberg::derivation(1, 0, 0, 1, 0, 0)).has_value());
}

TEST(LinearControlSystem, Validation) {
  const ModelPtr model = sl2_model();
  const Derivation d = derivation_from_inner(model, Vec::Unit(3, 0));
  EXPECT_THROW(LinearControlSystem(model, d, {}), InputError);
  EXPECT_THROW(LinearControlSystem(model, d, {AlgebraElement(so3_model(), Vec::Unit(3, 0))}), InputError);
  EXPECT_THROW(LinearControlSystem(so3_model(), d, {AlgebraElement(so3_model(), Vec::Unit(3, 0))}), InputError);
  const std::vector<AlgebraElement> fields{AlgebraElement(model, Vec::Unit(3, 1))};
  EXPECT_THROW(LinearControlSystem(model, d, fields, ControlRange{Vec::Ones(1), Vec::Zero(1)}), InputError);
  EXPECT_THROW(LinearControlSystem(model, d, fields, ControlRange{Vec::Zero(2), Vec::Ones(2)}), InputError);

  Mat bad = heisenberg::derivation(1, 0, 0, 1, 0, 0);
  bad(2, 2) = 0.0;
  EXPECT_THROW(LinearControlSystem(heisenberg_model(), Derivation(heisenberg_model(), bad),
                                   {AlgebraElement(heisenberg_model(), Vec::Unit(3, 0))}),
               InputError);

  const LinearControlSystem ok(model, d, fields);
  EXPECT_EQ(ok.num_controls(), 1);
  EXPECT_FALSE(ok.bounded());
  EXPECT_THROW(ok.control_direction(Vec::Ones(2)), InputError);
  EXPECT_LE((ok.control_direction(Vec::Constant(1, 2.0)) - 2.0 * Vec::Unit(3, 1)).norm(), 0.0);
}

TEST(PiecewiseControl, Validation) {
  EXPECT_THROW(PiecewiseControl({{-1.0, Vec::Ones(1)}}), InputError);
  EXPECT_THROW(PiecewiseControl({{0.0, Vec::Ones(1)}}), InputError);
  EXPECT_THROW(PiecewiseControl({{1.0, Vec::Ones(1)}, {1.0, Vec::Ones(2)}}), InputError);
  const PiecewiseControl c({{0.5, Vec::Ones(1)}, {1.25, Vec::Zero(1)}});
  EXPECT_DOUBLE_EQ(c.total_duration(), 1.75);

  const ModelPtr model = heisenberg_model();
  const LinearControlSystem bounded(model, Derivation(model, Mat::Zero(3, 3)), {AlgebraElement(model, Vec::Unit(3, 0))},
                                    ControlRange{Vec::Constant(1, -1.0), Vec::Constant(1, 1.0)});
  EXPECT_NO_THROW(c.check_against(bounded));
  EXPECT_THROW(PiecewiseControl::constant(Vec::Constant(1, 2.0), 1.0).check_against(bounded), InputError);
  EXPECT_THROW(PiecewiseControl::constant(Vec::Ones(2), 1.0).check_against(bounded), InputError);
}

}  // namespace
}  // namespace liesys
