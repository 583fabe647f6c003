#include "liesys/controllability.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

namespace liesys {

namespace {

// Spread allowed for a cluster of m eigenvalues that come from one
// defective eigenvalue: a Jordan block of size m perturbed by working
// precision splits by about (eps |A|)^{1/m}.
double cluster_radius(std::size_t m, double scale) {
  return 10.0 * scale * std::pow(1e-15, 1.0 / static_cast<double>(m));
}

Complex centroid(const std::vector<Complex>& values, const std::vector<std::size_t>& members) {
  Complex sum = 0.0;
  for (std::size_t i : members) sum += values[i];
  return sum / static_cast<double>(members.size());
}

double spread(const std::vector<Complex>& values, const std::vector<std::size_t>& members) {
  const Complex c = centroid(values, members);
  double r = 0.0;
  for (std::size_t i : members) r = std::max(r, std::abs(values[i] - c));
  return r;
}

// Single-linkage components of `members` at distance `threshold`.
std::vector<std::vector<std::size_t>> linkage(const std::vector<Complex>& values,
                                              const std::vector<std::size_t>& members, double threshold) {
  std::vector<int> label(members.size(), -1);
  int next = 0;
  for (std::size_t seed = 0; seed < members.size(); ++seed) {
    if (label[seed] >= 0) continue;
    label[seed] = next;
    std::vector<std::size_t> stack{seed};
    while (!stack.empty()) {
      const std::size_t a = stack.back();
      stack.pop_back();
      for (std::size_t b = 0; b < members.size(); ++b) {
        if (label[b] < 0 && std::abs(values[members[a]] - values[members[b]]) <= threshold) {
          label[b] = next;
          stack.push_back(b);
        }
      }
    }
    ++next;
  }
  std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(next));
  for (std::size_t i = 0; i < members.size(); ++i) out[static_cast<std::size_t>(label[i])].push_back(members[i]);
  return out;
}

// A group of m eigenvalues is one cluster when it lies within the
// perturbation radius of an m-fold eigenvalue; otherwise it is split at the
// loosest radius that separates it.
void split_clusters(const std::vector<Complex>& values, const std::vector<std::size_t>& members, double scale,
                    std::vector<std::vector<std::size_t>>& out) {
  if (members.size() > 1 && spread(values, members) > cluster_radius(members.size(), scale)) {
    for (std::size_t k = members.size(); k >= 1; --k) {
      const auto parts = linkage(values, members, 2.0 * cluster_radius(k, scale));
      if (parts.size() > 1) {
        for (const auto& part : parts) split_clusters(values, part, scale, out);
        return;
      }
    }
  }
  out.push_back(members);
}

nlohmann::json basis_json(const SubspaceBasis& basis) {
  nlohmann::json out = nlohmann::json::array();
  for (const Vec& v : basis) out.push_back(std::vector<double>(v.data(), v.data() + v.size()));
  return out;
}

}  // namespace

SubspaceBasis bracket_closure(const LieGroupModel& model, const std::vector<Vec>& generators) {
  SubspaceBasis basis = span_union(generators);
  for (int round = 0; round <= model.dim(); ++round) {
    std::vector<Vec> candidates = basis;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      for (std::size_t j = i + 1; j < basis.size(); ++j) candidates.push_back(model.bracket(basis[i], basis[j]));
    }
    SubspaceBasis next = span_union(candidates);
    if (next.size() == basis.size()) break;
    basis = std::move(next);
  }
  return basis;
}

SubspaceBasis d_orbit(const Mat& derivation, const SubspaceBasis& subspace) {
  SubspaceBasis basis = span_union(subspace);
  for (Eigen::Index round = 0; round <= derivation.rows(); ++round) {
    std::vector<Vec> candidates = basis;
    for (const Vec& v : basis) candidates.push_back(derivation * v);
    SubspaceBasis next = span_union(candidates);
    if (next.size() == basis.size()) break;
    basis = std::move(next);
  }
  return basis;
}

SubspaceBasis compute_a(const LinearControlSystem& system) {
  std::vector<Vec> generators;
  for (const AlgebraElement& y : system.control_fields()) generators.push_back(y.coords());
  return bracket_closure(*system.model(), generators);
}

SubspaceBasis compute_h(const LinearControlSystem& system) {
  return bracket_closure(*system.model(), d_orbit(system.derivation().matrix(), compute_a(system)));
}

bool rank_condition(const LinearControlSystem& system) {
  return static_cast<int>(compute_h(system).size()) == system.model()->dim();
}

bool is_d_invariant(const Mat& derivation, const SubspaceBasis& subspace, double tol) {
  const double threshold = tol * std::max(1.0, derivation.cwiseAbs().maxCoeff());
  for (const Vec& v : subspace) {
    if (projection_residual(subspace, derivation * v) > threshold) return false;
  }
  return true;
}

SplitDims eigensplit(const Mat& derivation, const SubspaceBasis& h_basis) {
  SplitDims dims;
  if (h_basis.empty()) return dims;
  if (!is_d_invariant(derivation, h_basis)) {
    throw NumericalError("eigensplit: subspace is not invariant under the derivation");
  }
  const Mat q = columns(h_basis, derivation.rows());
  const Mat restricted = q.transpose() * derivation * q;
  const std::vector<Complex> values = eigenvalues(restricted);
  const double scale = std::max(1.0, restricted.norm());

  // Eigenvalues a defective block has split apart are averaged, and each
  // cluster is classified by the real part of its centroid.
  std::vector<std::vector<std::size_t>> clusters;
  std::vector<std::size_t> all(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) all[i] = i;
  split_clusters(values, all, scale, clusters);

  for (const auto& members : clusters) {
    const double re = centroid(values, members).real();
    const int count = static_cast<int>(members.size());
    if (std::abs(re) < kZeroRealPartBand * scale) {
      dims.zero += count;
    } else if (re > 0.0) {
      dims.positive += count;
    } else {
      dims.negative += count;
    }
  }
  return dims;
}

std::string to_string(VerdictKind kind) {
  switch (kind) {
    case VerdictKind::not_controllable_on_g: return "NOT_CONTROLLABLE_ON_G";
    case VerdictKind::controllable_on_h: return "CONTROLLABLE_ON_H";
    case VerdictKind::not_controllable_on_h: return "NOT_CONTROLLABLE_ON_H";
    case VerdictKind::inconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

ControllabilityReport controllability_report(const LinearControlSystem& system) {
  const ModelPtr& model = system.model();
  const Mat& d = system.derivation().matrix();
  ControllabilityReport report;
  report.a_basis = compute_a(system);
  report.h_basis = bracket_closure(*model, d_orbit(d, report.a_basis));
  report.dim_a = static_cast<int>(report.a_basis.size());
  report.dim_h = static_cast<int>(report.h_basis.size());
  report.dim_g = model->dim();
  report.rank_condition = report.dim_h == report.dim_g;
  report.a_is_d_invariant = is_d_invariant(d, report.a_basis);
  report.h_is_d_invariant = is_d_invariant(d, report.h_basis);
  report.split = eigensplit(d, report.h_basis);
  report.scope = report.rank_condition ? "G" : "H";

  const bool central = report.split == SplitDims{0, report.dim_h, 0};
  std::ostringstream split_text;
  split_text << "(" << report.split.positive << ", " << report.split.zero << ", " << report.split.negative << ")";

  VerdictRule proper;
  proper.rule = "a";
  proper.source = "trajectories from e stay in H; a proper H rules out controllability on G";
  proper.hypotheses = {{"dim h (" + std::to_string(report.dim_h) + ") < dim g (" + std::to_string(report.dim_g) + ")",
                        report.dim_h < report.dim_g}};
  proper.conclusion = VerdictKind::not_controllable_on_g;

  VerdictRule invariant;
  invariant.rule = "b";
  invariant.source = "a D-invariant implies a = h, the Lie saturate; rank condition gives controllability on H "
                     "(external result, hypotheses checked only)";
  invariant.hypotheses = {{"a is D-invariant", report.a_is_d_invariant}};
  invariant.conclusion = VerdictKind::controllable_on_h;

  VerdictRule solvable;
  solvable.rule = "c";
  solvable.source = "solvable G, D restricted to h has only eigenvalues with zero real part "
                    "(external result, hypotheses checked only)";
  solvable.hypotheses = {{"G is solvable", model->flags().solvable},
                         {"split " + split_text.str() + " has only the zero-real-part part", central}};
  solvable.conclusion = VerdictKind::controllable_on_h;

  VerdictRule nilpotent;
  nilpotent.rule = "d";
  nilpotent.source = "nilpotent G with bounded controls: controllable on H iff H = H0 "
                     "(external result, hypotheses checked only)";
  nilpotent.hypotheses = {{"G is nilpotent", model->flags().nilpotent},
                          {"control range is bounded", system.bounded()}};
  nilpotent.conclusion = central ? VerdictKind::controllable_on_h : VerdictKind::not_controllable_on_h;

  VerdictRule fallback;
  fallback.rule = "e";
  fallback.source = "no rule applies";
  fallback.conclusion = VerdictKind::inconclusive;

  report.rules = {proper, invariant, solvable, nilpotent, fallback};
  bool decided = false;
  for (VerdictRule& rule : report.rules) {
    rule.applies = std::all_of(rule.hypotheses.begin(), rule.hypotheses.end(),
                               [](const Hypothesis& h) { return h.holds; });
    if (rule.applies && !decided) {
      report.verdict = rule.conclusion;
      decided = true;
    }
  }
  return report;
}

std::string report_to_json(const ControllabilityReport& report, const LinearControlSystem& system) {
  nlohmann::ordered_json out;
  out["group"] = system.model()->name();
  out["dim_g"] = report.dim_g;
  out["dim_a"] = report.dim_a;
  out["dim_h"] = report.dim_h;
  out["a_basis"] = basis_json(report.a_basis);
  out["h_basis"] = basis_json(report.h_basis);
  out["rank_condition"] = report.rank_condition;
  out["a_is_D_invariant"] = report.a_is_d_invariant;
  out["h_is_D_invariant"] = report.h_is_d_invariant;
  out["split_dims"] = {{"positive", report.split.positive},
                       {"zero", report.split.zero},
                       {"negative", report.split.negative}};
  out["verdict"] = to_string(report.verdict);
  out["scope"] = report.scope;
  nlohmann::ordered_json rules = nlohmann::ordered_json::array();
  for (const VerdictRule& rule : report.rules) {
    nlohmann::ordered_json r;
    r["rule"] = rule.rule;
    r["source"] = rule.source;
    nlohmann::ordered_json hyps = nlohmann::ordered_json::array();
    for (const Hypothesis& h : rule.hypotheses) hyps.push_back({{"statement", h.statement}, {"holds", h.holds}});
    r["hypotheses"] = hyps;
    r["applies"] = rule.applies;
    r["conclusion"] = to_string(rule.conclusion);
    rules.push_back(r);
  }
  out["rules"] = rules;
  return out.dump(2);
}

std::string report_to_text(const ControllabilityReport& report, const LinearControlSystem& system) {
  std::ostringstream out;
  out << "group:            " << system.model()->name() << "\n";
  out << "dim g:            " << report.dim_g << "\n";
  out << "dim a:            " << report.dim_a << "\n";
  out << "dim h:            " << report.dim_h << "\n";
  out << "rank condition:   " << (report.rank_condition ? "yes" : "no") << "\n";
  out << "a D-invariant:    " << (report.a_is_d_invariant ? "yes" : "no") << "\n";
  out << "h D-invariant:    " << (report.h_is_d_invariant ? "yes" : "no") << "\n";
  out << "split (+, 0, -):  (" << report.split.positive << ", " << report.split.zero << ", "
      << report.split.negative << ")\n";
  out << "verdict:          " << to_string(report.verdict) << " (scope " << report.scope << ")\n";
  out << "rules:\n";
  for (const VerdictRule& rule : report.rules) {
    out << "  (" << rule.rule << ") " << (rule.applies ? "applies" : "does not apply") << " -> "
        << to_string(rule.conclusion) << "\n";
    out << "      " << rule.source << "\n";
    for (const Hypothesis& h : rule.hypotheses) {
      out << "      [" << (h.holds ? "x" : " ") << "] " << h.statement << "\n";
    }
  }
  return out.str();
}

}  // namespace liesys
