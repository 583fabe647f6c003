#pragma once

#include <string>
#include <vector>

#include "liesys/models.hpp"

namespace liesys {

/// Orthonormal coordinate basis of a subspace of the Lie algebra.
using SubspaceBasis = std::vector<Vec>;

/// Smallest bracket-closed subspace containing the generators.
SubspaceBasis bracket_closure(const LieGroupModel& model, const std::vector<Vec>& generators);

/// span{D^i v : v in subspace, i >= 0}, the smallest D-invariant subspace
/// containing the input.
SubspaceBasis d_orbit(const Mat& derivation, const SubspaceBasis& subspace);

/// Lie{Y_1..Y_m}.
SubspaceBasis compute_a(const LinearControlSystem& system);

/// Subalgebra generated by the D-orbit of Lie{Y_1..Y_m}.
SubspaceBasis compute_h(const LinearControlSystem& system);

/// dim h == dim g.
bool rank_condition(const LinearControlSystem& system);

bool is_d_invariant(const Mat& derivation, const SubspaceBasis& subspace, double tol = kRankTolerance);

struct SplitDims {
  int positive = 0;
  int zero = 0;
  int negative = 0;

  friend bool operator==(const SplitDims&, const SplitDims&) = default;
};

/// Dimensions of the generalized eigenspaces of D restricted to h, grouped
/// by the sign of the eigenvalue real part. Throws NumericalError if h is
/// not D-invariant.
SplitDims eigensplit(const Mat& derivation, const SubspaceBasis& h_basis);

enum class VerdictKind { not_controllable_on_g, controllable_on_h, not_controllable_on_h, inconclusive };

std::string to_string(VerdictKind kind);

struct Hypothesis {
  std::string statement;
  bool holds = false;
};

/// One rule of the verdict engine with the hypotheses it checked. `applies`
/// is true when every hypothesis holds; `conclusion` is what the rule then
/// asserts (as the underlying result states it; nothing is re-proved here).
struct VerdictRule {
  std::string rule;
  std::string source;
  std::vector<Hypothesis> hypotheses;
  bool applies = false;
  VerdictKind conclusion = VerdictKind::inconclusive;
};

/// Lie-algebraic diagnostics of a linear control system.
///
/// a = Lie{Y_j}; h = subalgebra generated by span{D^i a}. H is the connected
/// subgroup with algebra h; the attainable set from the identity
/// A_H = {phi_t(u, e) : t >= 0} and its counterpart A*_H for the system with
/// drift -X are the objects the verdict rules speak about. They are not
/// computed.
struct ControllabilityReport {
  SubspaceBasis a_basis;
  SubspaceBasis h_basis;
  int dim_a = 0;
  int dim_h = 0;
  int dim_g = 0;
  bool rank_condition = false;
  bool a_is_d_invariant = false;
  bool h_is_d_invariant = false;
  SplitDims split;
  /// All rules in evaluation order.
  std::vector<VerdictRule> rules;
  /// Conclusion of the first applicable rule (inconclusive if none).
  VerdictKind verdict = VerdictKind::inconclusive;
  /// "G" when h = g, else "H".
  std::string scope;
};

ControllabilityReport controllability_report(const LinearControlSystem& system);

/// JSON text of the report (all fields plus the hypothesis trail per rule).
std::string report_to_json(const ControllabilityReport& report, const LinearControlSystem& system);

/// Human-readable summary.
std::string report_to_text(const ControllabilityReport& report, const LinearControlSystem& system);

}  // namespace liesys
