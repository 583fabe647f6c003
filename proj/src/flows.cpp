#include "liesys/flows.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "liesys/catalog.hpp"

namespace liesys {

namespace {

int parse_positive(const std::string& text, const std::string& what) {
  int value = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || value < 1) {
    throw InputError("invalid " + what + " '" + text + "' (expected a positive integer)");
  }
  return value;
}

CMat inner_matrix(const LinearControlSystem& system) {
  const auto& x = system.derivation().inner_generator();
  if (!x) throw InputError("system derivation is not inner");
  return system.model()->to_matrix(*x);
}

void record(Trajectory& traj, double t, const ModelPtr& model, CMat g) {
  traj.max_constraint_drift = std::max(traj.max_constraint_drift, model->constraint_residual(g));
  traj.times.push_back(t);
  traj.points.push_back(GroupElement::unchecked(model, std::move(g)));
}

void finish(Trajectory& traj) {
  if (traj.max_constraint_drift > kDriftWarning) {
    std::ostringstream msg;
    msg << "group constraint drift " << traj.max_constraint_drift << " exceeds " << kDriftWarning;
    traj.warnings.push_back(msg.str());
  }
}

// Solution from the identity under constant u at times tau_j = j dur / k,
// j = 1..k.
std::vector<CMat> segment_solutions(const LinearControlSystem& system, const Vec& u, double dur, int k,
                                    const SolveMethod& method) {
  std::vector<CMat> out;
  out.reserve(static_cast<std::size_t>(k));
  if (const auto* rk4 = std::get_if<Rk4Method>(&method)) {
    const Trajectory traj = rk4_oracle(system, PiecewiseControl::constant(u, dur),
                                       GroupElement::identity(system.model()), rk4->steps_per_unit_time, k);
    for (std::size_t j = 1; j < traj.points.size(); ++j) out.push_back(traj.points[j].matrix());
    return out;
  }
  for (int j = 1; j <= k; ++j) {
    const double tau = (j == k) ? dur : dur * j / k;
    if (const auto* product = std::get_if<ProductMethod>(&method)) {
      out.push_back(product_formula_solution(system, u, tau, product->n).matrix());
    } else {
      out.push_back(closed_solution(system, u, tau).matrix());
    }
  }
  return out;
}

// Ordered product of a stream of factors, multiplied pairwise.
class PairwiseProduct {
 public:
  void push(CMat factor) {
    std::size_t level = 0;
    while (!stack_.empty() && stack_.back().first == level) {
      factor = stack_.back().second * factor;
      stack_.pop_back();
      ++level;
    }
    stack_.emplace_back(level, std::move(factor));
  }

  CMat result(Eigen::Index size) const {
    CMat acc = CMat::Identity(size, size);
    for (auto it = stack_.rbegin(); it != stack_.rend(); ++it) acc = it->second * acc;
    return acc;
  }

 private:
  std::vector<std::pair<std::size_t, CMat>> stack_;
};

}  // namespace

std::string to_string(const SolveMethod& method) {
  if (const auto* p = std::get_if<ProductMethod>(&method)) return "product:" + std::to_string(p->n);
  if (const auto* r = std::get_if<Rk4Method>(&method)) return "rk4:" + std::to_string(r->steps_per_unit_time);
  return "closed";
}

SolveMethod parse_method(const std::string& text) {
  if (text == "closed") return ClosedMethod{};
  if (text.rfind("product:", 0) == 0) return ProductMethod{parse_positive(text.substr(8), "product count")};
  if (text.rfind("rk4:", 0) == 0) return Rk4Method{parse_positive(text.substr(4), "rk4 step density")};
  throw InputError("unknown method '" + text + "' (expected product:<n>, closed or rk4:<steps>)");
}

FlowBackend default_flow_backend(const LinearControlSystem& system) {
  const FlowBackend backend = system.model()->flow_backend();
  if (backend == FlowBackend::inner_conjugation && !system.derivation().is_inner()) {
    throw InputError("no flow backend for " + system.model()->name() +
                     ": the derivation is not inner and the group is not nilpotent");
  }
  return backend;
}

GroupElement automorphism_flow(const LinearControlSystem& system, double t, const GroupElement& g,
                               std::optional<FlowBackend> backend) {
  const ModelPtr& model = system.model();
  if (!(*g.model() == *model)) throw InputError("automorphism_flow: element belongs to a different group");
  const FlowBackend chosen = backend ? *backend : default_flow_backend(system);
  if (chosen == FlowBackend::inner_conjugation) {
    const CMat x = inner_matrix(system);
    return GroupElement::unchecked(model, expm(x, t) * g.matrix() * expm(x, -t));
  }
  if (!model->flags().nilpotent) {
    throw InputError("exp_log_transport needs a nilpotent group; " + model->name() + " is not");
  }
  const Vec y = model->to_coords(logm_unipotent(g.matrix()));
  const Vec moved = expm(system.derivation().matrix(), t) * y;
  return GroupElement::unchecked(model, group_exp(*model, model->to_matrix(moved)));
}

CMat linear_field(const LinearControlSystem& system, const CMat& g) {
  if (system.derivation().is_inner()) {
    const CMat x = inner_matrix(system);
    return x * g - g * x;
  }
  const ModelPtr& model = system.model();
  default_flow_backend(system);
  // d/dt exp(e^{tD} L) at t = 0 is dexp_L(DL), the upper-right block of
  // exp([[L, DL], [0, L]]).
  const CMat l = logm_unipotent(g);
  const CMat dl = model->to_matrix(system.derivation().matrix() * model->to_coords(l));
  const Eigen::Index n = g.rows();
  CMat block = CMat::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = l;
  block.topRightCorner(n, n) = dl;
  block.bottomRightCorner(n, n) = l;
  return expm(block).topRightCorner(n, n);
}

CMat linear_field_difference(const LinearControlSystem& system, const CMat& g, double h) {
  const GroupElement at = GroupElement::unchecked(system.model(), g);
  const CMat forward = automorphism_flow(system, h, at).matrix();
  const CMat backward = automorphism_flow(system, -h, at).matrix();
  return (forward - backward) / (2.0 * h);
}

CMat system_field(const LinearControlSystem& system, const CMat& g, const Vec& u) {
  return linear_field(system, g) + system.model()->to_matrix(system.control_direction(u)) * g;
}

GroupElement product_formula_solution(const LinearControlSystem& system, const Vec& u, double t, int n) {
  if (n < 1) throw InputError("product_formula_solution: n must be at least 1");
  const ModelPtr& model = system.model();
  const int size = model->ambient_size();
  const double dt = t / n;
  const Vec w = system.control_direction(u);
  if (default_flow_backend(system) == FlowBackend::inner_conjugation) {
    // F_i = C^i E C^{-i} with C = e^{(t/n) X}, E = exp((t/n) W), so the
    // product telescopes to (E C)^n e^{-tX}.
    const CMat x = inner_matrix(system);
    CMat base = group_exp(*model, model->to_matrix(w), dt) * expm(x, dt);
    CMat power = CMat::Identity(size, size);
    for (int k = n; k > 0; k >>= 1) {
      if (k & 1) power = power * base;
      if (k > 1) base = base * base;
    }
    return GroupElement::unchecked(model, power * expm(x, -t));
  }

  // F_i = exp(e^{(it/n) D} (t/n) W); y = e^{i dt D} dt W is recomputed from
  // scratch every 64 factors.
  const Mat& d = system.derivation().matrix();
  const Mat step = expm(d, dt);
  const Vec y0 = dt * w;
  Vec y = y0;
  PairwiseProduct product;
  for (int i = 0; i < n; ++i) {
    if (i > 0) y = (i % 64 == 0) ? Vec(expm(d, i * dt) * y0) : Vec(step * y);
    product.push(group_exp(*model, model->to_matrix(y)));
  }
  return GroupElement::unchecked(model, product.result(size));
}

GroupElement inner_closed_form_solution(const LinearControlSystem& system, const Vec& u, double t) {
  const ModelPtr& model = system.model();
  const CMat x = inner_matrix(system);
  const CMat w = model->to_matrix(system.control_direction(u));
  return GroupElement::unchecked(model, expm(CMat(x + w), t) * expm(x, -t));
}

GroupElement closed_solution(const LinearControlSystem& system, const Vec& u, double t) {
  if (has_closed_exp_3dim(system.model()->kind())) return closed_solution_3dim(system, u, t);
  return inner_closed_form_solution(system, u, t);
}

Trajectory solve_piecewise(const LinearControlSystem& system, const PiecewiseControl& control,
                           const SolveMethod& method, int samples_per_segment) {
  if (samples_per_segment < 1) throw InputError("samples_per_segment must be at least 1");
  control.check_against(system);
  if (std::holds_alternative<ClosedMethod>(method) && !system.derivation().is_inner()) {
    throw InputError("the closed method needs an inner derivation");
  }
  const ModelPtr& model = system.model();
  Trajectory traj;
  traj.method = to_string(method);
  record(traj, 0.0, model, CMat::Identity(model->ambient_size(), model->ambient_size()));

  double start = 0.0;
  for (std::size_t s = 0; s < control.segments().size(); ++s) {
    const ControlSegment& seg = control.segments()[s];
    const GroupElement previous = traj.points.back();
    const std::vector<CMat> local = segment_solutions(system, seg.u, seg.duration, samples_per_segment, method);
    for (int j = 1; j <= samples_per_segment; ++j) {
      const double tau = (j == samples_per_segment) ? seg.duration : seg.duration * j / samples_per_segment;
      const CMat& head = local[static_cast<std::size_t>(j - 1)];
      CMat point = (s == 0) ? head : CMat(head * automorphism_flow(system, tau, previous).matrix());
      record(traj, start + tau, model, std::move(point));
    }
    start += seg.duration;
  }
  finish(traj);
  return traj;
}

Trajectory translate_solution(const LinearControlSystem& system, const Trajectory& at_identity, const GroupElement& g) {
  if (at_identity.points.empty()) throw InputError("translate_solution: empty trajectory");
  const ModelPtr& model = system.model();
  const CMat& first = at_identity.points.front().matrix();
  if ((first - CMat::Identity(first.rows(), first.cols())).cwiseAbs().maxCoeff() > 1e-12 ||
      at_identity.times.front() != 0.0) {
    throw InputError("translate_solution: trajectory must start at the identity at t = 0");
  }
  Trajectory traj;
  traj.method = at_identity.method + "+translate";
  for (std::size_t i = 0; i < at_identity.points.size(); ++i) {
    const double t = at_identity.times[i];
    record(traj, t, model, at_identity.points[i].matrix() * automorphism_flow(system, t, g).matrix());
  }
  finish(traj);
  return traj;
}

Trajectory rk4_oracle(const LinearControlSystem& system, const PiecewiseControl& control, const GroupElement& g0,
                      int steps_per_unit_time, int samples_per_segment) {
  if (steps_per_unit_time < 10) {
    throw NumericalError("rk4_oracle: step density " + std::to_string(steps_per_unit_time) +
                         " is below the oracle minimum of 10 per unit time");
  }
  if (samples_per_segment < 0) throw InputError("rk4_oracle: negative sample count");
  control.check_against(system);
  const ModelPtr& model = system.model();
  if (!(*g0.model() == *model)) throw InputError("rk4_oracle: initial point belongs to a different group");
  default_flow_backend(system);

  Trajectory traj;
  traj.method = "rk4_oracle:" + std::to_string(steps_per_unit_time);
  record(traj, 0.0, model, g0.matrix());
  CMat g = g0.matrix();
  CMat carry = CMat::Zero(g.rows(), g.cols());
  double start = 0.0;
  for (const ControlSegment& seg : control.segments()) {
    const auto base = static_cast<long>(std::ceil(steps_per_unit_time * seg.duration));
    long steps = std::max(1L, base);
    long stride = 1;
    if (samples_per_segment > 0) {
      stride = (steps + samples_per_segment - 1) / samples_per_segment;
      steps = stride * samples_per_segment;
    }
    const double h = seg.duration / static_cast<double>(steps);
    for (long i = 1; i <= steps; ++i) {
      const CMat k1 = system_field(system, g, seg.u);
      const CMat k2 = system_field(system, g + (0.5 * h) * k1, seg.u);
      const CMat k3 = system_field(system, g + (0.5 * h) * k2, seg.u);
      const CMat k4 = system_field(system, g + h * k3, seg.u);
      // Compensated update.
      const CMat increment = (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4) - carry;
      const CMat next = g + increment;
      carry = (next - g) - increment;
      g = next;
      if (i % stride == 0) {
        const double t = (i == steps) ? start + seg.duration : start + h * static_cast<double>(i);
        record(traj, t, model, g);
      }
    }
    start += seg.duration;
  }
  finish(traj);
  return traj;
}

double ode_residual(const LinearControlSystem& system, const Trajectory& trajectory, const PiecewiseControl& control) {
  const std::size_t count = trajectory.points.size();
  if (count < 100) {
    throw InputError("ode_residual needs at least 100 samples, got " + std::to_string(count));
  }
  std::vector<double> bounds{0.0};
  for (const ControlSegment& seg : control.segments()) bounds.push_back(bounds.back() + seg.duration);
  const double eps = 1e-12 * std::max(1.0, bounds.back());

  double worst = 0.0;
  double field_scale = 1.0;
  for (std::size_t i = 1; i + 1 < count; ++i) {
    const double t_prev = trajectory.times[i - 1];
    const double t = trajectory.times[i];
    const double t_next = trajectory.times[i + 1];
    // Segment containing t strictly in its interior, with the whole stencil.
    std::size_t seg = control.segments().size();
    for (std::size_t s = 0; s + 1 < bounds.size(); ++s) {
      if (t > bounds[s] + eps && t < bounds[s + 1] - eps) {
        seg = s;
        break;
      }
    }
    if (seg == control.segments().size()) continue;
    if (t_prev < bounds[seg] - eps || t_next > bounds[seg + 1] + eps) continue;

    const CMat derivative = (trajectory.points[i + 1].matrix() - trajectory.points[i - 1].matrix()) / (t_next - t_prev);
    const CMat field = system_field(system, trajectory.points[i].matrix(), control.segments()[seg].u);
    worst = std::max(worst, (derivative - field).norm());
    field_scale = std::max(field_scale, field.norm());
  }
  return worst / field_scale;
}

}  // namespace liesys
