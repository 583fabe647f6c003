#pragma once

#include <optional>
#include <string>
#include <variant>

#include "liesys/models.hpp"

namespace liesys {

/// Finite product of n factors approximating the limit solution.
struct ProductMethod {
  int n = 1;
};
/// e^{t(X+W)} e^{-tX}; inner derivations only.
struct ClosedMethod {};
/// Classical RK4 in the ambient matrix space.
struct Rk4Method {
  int steps_per_unit_time = 1000;
};

using SolveMethod = std::variant<ProductMethod, ClosedMethod, Rk4Method>;

std::string to_string(const SolveMethod& method);

/// Parses "product:<n>", "closed" or "rk4:<steps>". Throws InputError.
SolveMethod parse_method(const std::string& text);

/// Relative constraint drift above which solvers attach a warning.
inline constexpr double kDriftWarning = 1e-6;

/// Default step of linear_field_difference.
inline constexpr double kFieldDifferenceStep = 1e-6;

/// The backend a system's flow is evaluated with: the model's backend,
/// provided the system supports it. Throws InputError for derivations that
/// are neither inner nor on a nilpotent group.
FlowBackend default_flow_backend(const LinearControlSystem& system);

/// phi_t(g) for the linear vector field of the system.
GroupElement automorphism_flow(const LinearControlSystem& system, double t, const GroupElement& g,
                               std::optional<FlowBackend> backend = std::nullopt);

/// The linear field X(g) = d/dt phi_t(g) at t = 0, as an ambient matrix.
/// Inner: Xg - gX. Otherwise the exact derivative of the exp-log transport.
CMat linear_field(const LinearControlSystem& system, const CMat& g);

/// Central difference (phi_h(g) - phi_{-h}(g)) / 2h of the flow.
CMat linear_field_difference(const LinearControlSystem& system, const CMat& g, double h = kFieldDifferenceStep);

/// X(g) + sum u_j Y_j g.
CMat system_field(const LinearControlSystem& system, const CMat& g, const Vec& u);

/// F_0 F_1 ... F_{n-1} with F_i = phi_{it/n}(exp(t/n W)), W = sum u_j Y_j.
/// Converges to phi_t(u, e) at first order in 1/n.
GroupElement product_formula_solution(const LinearControlSystem& system, const Vec& u, double t, int n);

/// expm(X + W, t) expm(X, -t), with the generic matrix exponential.
GroupElement inner_closed_form_solution(const LinearControlSystem& system, const Vec& u, double t);

/// Closed-form phi_t(u, e): functional-calculus exponentials on the
/// 3-dimensional semisimple groups, the generic exponential elsewhere.
GroupElement closed_solution(const LinearControlSystem& system, const Vec& u, double t);

/// Solution from the identity under a piecewise-constant control, composed
/// segment by segment with phi_{t+s}(u, e) = phi_s(u2, e) phi_s(phi_t(u1, e)).
/// The first point is the identity at t = 0, followed by
/// samples_per_segment evenly spaced points per segment.
Trajectory solve_piecewise(const LinearControlSystem& system, const PiecewiseControl& control,
                           const SolveMethod& method, int samples_per_segment);

/// phi_t(u, g) = phi_t(u, e) phi_t(g), pointwise.
Trajectory translate_solution(const LinearControlSystem& system, const Trajectory& at_identity, const GroupElement& g);

/// Direct RK4 integration of dg/dt = X(g) + sum u_j Y_j g from g0. Records
/// every step when samples_per_segment is 0, otherwise the same grid as
/// solve_piecewise. Throws NumericalError when the step density is below 10.
Trajectory rk4_oracle(const LinearControlSystem& system, const PiecewiseControl& control, const GroupElement& g0,
                      int steps_per_unit_time, int samples_per_segment = 0);

/// Largest mismatch between the central-difference derivative of the
/// sampled curve and the system field, over interior samples whose stencil
/// stays inside one control segment, divided by max(1, max |field|).
/// Needs at least 100 samples.
double ode_residual(const LinearControlSystem& system, const Trajectory& trajectory, const PiecewiseControl& control);

}  // namespace liesys
