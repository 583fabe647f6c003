#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "liesys/matcore.hpp"

namespace liesys {

enum class GroupKind { heisenberg, abelian, gl_plus, sl2, su2, so3, so21 };

enum class ExpBackend { generic_expm, closed_form };

/// How the automorphism flow of a linear vector field is evaluated.
///  - inner_conjugation: phi_t(g) = e^{tX} g e^{-tX}, needs D = ad(X).
///  - exp_log_transport: phi_t(g) = exp(e^{tD} log g), needs a globally
///    invertible exponential (nilpotent simply connected group).
enum class FlowBackend { inner_conjugation, exp_log_transport };

struct ClassFlags {
  bool nilpotent = false;
  bool solvable = false;
  bool semisimple = false;

  friend bool operator==(const ClassFlags&, const ClassFlags&) = default;
};

std::string to_string(GroupKind kind);
std::string to_string(FlowBackend backend);

/// Structure constants c^k_{ij}, defined by [e_i, e_j] = sum_k c^k_{ij} e_k.
class StructureConstants {
 public:
  StructureConstants() = default;
  explicit StructureConstants(int dim) : dim_(dim), data_(static_cast<std::size_t>(dim * dim * dim), 0.0) {}

  int dim() const { return dim_; }

  double operator()(int k, int i, int j) const { return data_[index(k, i, j)]; }
  double& operator()(int k, int i, int j) { return data_[index(k, i, j)]; }

  /// Sets c^k_{ij} and c^k_{ji} = -c^k_{ij} together.
  void set_antisymmetric(int k, int i, int j, double value) {
    (*this)(k, i, j) = value;
    (*this)(k, j, i) = -value;
  }

  /// Coordinates of [a, b].
  Vec bracket(const Vec& a, const Vec& b) const;

  /// Matrix of ad(x) acting on coordinate columns.
  Mat ad(const Vec& x) const;

  double max_abs_difference(const StructureConstants& other) const;

 private:
  std::size_t index(int k, int i, int j) const {
    return static_cast<std::size_t>((i * dim_ + j) * dim_ + k);
  }

  int dim_ = 0;
  std::vector<double> data_;
};

/// Nilpotency and solvability via the lower central and derived series;
/// semisimplicity via nondegeneracy of the Killing form.
ClassFlags compute_class_flags(const StructureConstants& c, double tol = kRankTolerance);

/// A matrix Lie group together with a basis of its Lie algebra realized in
/// the same ambient matrix space. Immutable after construction.
class LieGroupModel {
 public:
  struct Definition {
    std::string name;
    GroupKind kind = GroupKind::gl_plus;
    int ambient_size = 0;
    std::vector<CMat> basis;
    StructureConstants structure_constants;
    ClassFlags flags;
    ExpBackend exp_backend = ExpBackend::generic_expm;
    FlowBackend flow_backend = FlowBackend::inner_conjugation;
    bool complex_realization = false;
  };

  /// Validates that the stored structure constants agree with the matrix
  /// brackets of the basis to 1e-10, that they are antisymmetric, and that
  /// the class flags agree with the computed series. Throws InputError.
  explicit LieGroupModel(Definition def);

  const std::string& name() const { return def_.name; }
  GroupKind kind() const { return def_.kind; }
  int dim() const { return static_cast<int>(def_.basis.size()); }
  int ambient_size() const { return def_.ambient_size; }
  const std::vector<CMat>& basis() const { return def_.basis; }
  const StructureConstants& structure_constants() const { return def_.structure_constants; }
  const ClassFlags& flags() const { return def_.flags; }
  ExpBackend exp_backend() const { return def_.exp_backend; }
  FlowBackend flow_backend() const { return def_.flow_backend; }
  bool complex_realization() const { return def_.complex_realization; }

  CMat to_matrix(const Vec& coords) const;

  /// Least-squares coordinates of an ambient matrix in the basis.
  Vec to_coords(const CMat& m) const;

  /// Distance from m to the span of the basis, relative to max(1, |m|).
  double algebra_residual(const CMat& m) const;

  Vec bracket(const Vec& a, const Vec& b) const { return def_.structure_constants.bracket(a, b); }
  Mat ad(const Vec& x) const { return def_.structure_constants.ad(x); }

  /// Size of the violation of the group's defining constraint at g,
  /// normalized by the scale of g.
  double constraint_residual(const CMat& g) const;

  friend bool operator==(const LieGroupModel& a, const LieGroupModel& b) { return a.name() == b.name(); }

 private:
  Definition def_;
  Mat coords_solver_;  // dim x (2 n^2) pseudo-inverse of the realified basis
};

using ModelPtr = std::shared_ptr<const LieGroupModel>;

/// Constants computed from matrix brackets of a basis (least squares).
StructureConstants structure_constants_from_basis(const std::vector<CMat>& basis);

inline constexpr double kGroupConstraintTol = 1e-8;

/// Element X, Y, W of the Lie algebra, stored in coordinates.
class AlgebraElement {
 public:
  AlgebraElement(ModelPtr model, Vec coords);

  const ModelPtr& model() const { return model_; }
  const Vec& coords() const { return coords_; }
  CMat matrix() const { return model_->to_matrix(coords_); }

 private:
  ModelPtr model_;
  Vec coords_;
};

class GroupElement {
 public:
  /// Throws InputError when the matrix violates the group's constraint by
  /// more than kGroupConstraintTol.
  GroupElement(ModelPtr model, CMat matrix);

  /// Skips the constraint check; used by integrators that monitor drift.
  static GroupElement unchecked(ModelPtr model, CMat matrix);

  static GroupElement identity(const ModelPtr& model);

  const ModelPtr& model() const { return model_; }
  const CMat& matrix() const { return matrix_; }

  GroupElement operator*(const GroupElement& other) const;

 private:
  struct NoCheck {};
  GroupElement(ModelPtr model, CMat matrix, NoCheck);

  ModelPtr model_;
  CMat matrix_;
};

/// Derivation D of the Lie algebra as a dim x dim matrix acting on
/// coordinate columns. Inner derivations carry their generator X with
/// D = ad(X).
class Derivation {
 public:
  Derivation(ModelPtr model, Mat matrix, std::optional<Vec> inner_generator = std::nullopt);

  const ModelPtr& model() const { return model_; }
  const Mat& matrix() const { return matrix_; }
  const std::optional<Vec>& inner_generator() const { return inner_generator_; }
  bool is_inner() const { return inner_generator_.has_value(); }

 private:
  ModelPtr model_;
  Mat matrix_;
  std::optional<Vec> inner_generator_;
};

/// Basis pair (0-based, i < j) and residual norm.
struct LeibnizViolation {
  int i = 0;
  int j = 0;
  double residual = 0.0;
};

/// Column j of the result holds the coordinates of [X, e_j].
Derivation derivation_from_inner(const ModelPtr& model, const Vec& x);

/// Empty iff D[e_i, e_j] = [D e_i, e_j] + [e_i, D e_j] on every basis pair
/// to 1e-10 (relative to max(1, |D|)).
std::vector<LeibnizViolation> validate_derivation(const Derivation& d, double tol = 1e-10);

/// Recovers X with ad(X) = D when one exists; nullopt otherwise.
std::optional<Vec> find_inner_generator(const ModelPtr& model, const Mat& d, double tol = 1e-10);

struct ControlRange {
  Vec min;
  Vec max;
};

class LinearControlSystem {
 public:
  /// Throws InputError on mixed models, m = 0, an invalid derivation, or
  /// malformed control range.
  LinearControlSystem(ModelPtr model, Derivation derivation, std::vector<AlgebraElement> control_fields,
                      std::optional<ControlRange> control_range = std::nullopt);

  const ModelPtr& model() const { return model_; }
  const Derivation& derivation() const { return derivation_; }
  const std::vector<AlgebraElement>& control_fields() const { return control_fields_; }
  const std::optional<ControlRange>& control_range() const { return control_range_; }
  int num_controls() const { return static_cast<int>(control_fields_.size()); }
  bool bounded() const { return control_range_.has_value(); }

  /// Coordinates of W = sum_j u_j Y_j.
  Vec control_direction(const Vec& u) const;

 private:
  ModelPtr model_;
  Derivation derivation_;
  std::vector<AlgebraElement> control_fields_;
  std::optional<ControlRange> control_range_;
};

struct ControlSegment {
  double duration = 0.0;
  Vec u;
};

class PiecewiseControl {
 public:
  PiecewiseControl() = default;
  explicit PiecewiseControl(std::vector<ControlSegment> segments);

  /// Constant control u on [0, t].
  static PiecewiseControl constant(const Vec& u, double t);

  const std::vector<ControlSegment>& segments() const { return segments_; }
  bool empty() const { return segments_.empty(); }
  double total_duration() const;

  /// Throws InputError if any u has the wrong length or leaves the range.
  void check_against(const LinearControlSystem& system) const;

 private:
  std::vector<ControlSegment> segments_;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<GroupElement> points;
  std::string method;
  double max_constraint_drift = 0.0;
  std::vector<std::string> warnings;

  const GroupElement& endpoint() const { return points.back(); }
};

}  // namespace liesys
