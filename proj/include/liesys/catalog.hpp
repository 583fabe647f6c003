#pragma once

#include <string>
#include <vector>

#include "liesys/matcore.hpp"
#include "liesys/models.hpp"

namespace liesys {

// Catalog groups. Basis conventions (coordinates are always in this order):
//   heisenberg  X1 = E01, X2 = E12, X3 = E02 in 3x3 upper unipotent matrices,
//               so (x, y, z) <-> [[1 x z][0 1 y][0 0 1]]
//   abelian(n)  e_i = E_{i,n} in (n+1)x(n+1) translation matrices
//   gl_plus(n)  E_ij, row-major (coordinate i*n + j)
//   sl2         H = diag(1,-1), E = E01, F = E10
//   su2         e_k = -(i/2) sigma_k, k = x, y, z
//   so3         Lx, Ly, Lz with [Lx, Ly] = Lz
//   so21        R (rotation in the 0-1 plane), Bx, By (boosts against axis 2),
//               skew with respect to J = diag(1, 1, -1)

ModelPtr heisenberg_model();
ModelPtr abelian_model(int n);
ModelPtr gl_plus_model(int n);
ModelPtr sl2_model();
ModelPtr su2_model();
ModelPtr so3_model();
ModelPtr so21_model();

/// Looks up a catalog group by the names used in system files. `n` is the
/// parameter for gl_plus and abelian. Throws InputError for unknown names.
ModelPtr model_by_name(const std::string& name, int n = 0);

namespace heisenberg {

using Coords = Eigen::Vector3d;

CMat element(const Coords& xyz);
Coords coords(const CMat& g);

/// (x1+x2, y1+y2, z1+z2+x1 y2).
Coords product(const Coords& a, const Coords& b);

/// exp(x, y, z) = (x, y, xy/2 + z).
Coords exp(const Coords& y);

/// Tangent of the right-invariant field of Y = (m, n, p) at (x, y, z):
/// (m, n, m y + p).
Coords right_invariant_field(const Coords& field, const Coords& at);

/// Derivation matrix [[a11 a12 0][a21 a22 0][a31 a32 a11+a22]].
Mat derivation(double a11, double a12, double a21, double a22, double a31, double a32);

/// Violations of the derivation template (zeros above the diagonal in the
/// last column, a33 = a11 + a22). Empty means the matrix fits the template.
std::vector<std::string> derivation_pattern_violations(const Mat& d, double tol = 1e-10);

}  // namespace heisenberg

/// The GL(n)+ system dg/dt = Ag - gA + sum u_j B_j g.
LinearControlSystem gl_linear_system(const Mat& a, const std::vector<Mat>& b_list);

/// Below this value of |t^2 mu| the closed forms switch to the analytic limit.
inline constexpr double kClosedFormBranchTol = 1e-12;

/// e^{tZ} for traceless real 2x2 Z: with mu = -det Z (so Z^2 = mu I),
/// cosh/sinh for mu > 0, cos/sin for mu < 0, I + tZ in the limit.
Mat sl2_exp_closed(const Mat& z, double t);

/// e^{tZ} for Z anti-Hermitian traceless 2x2; lambda^2 = det Z >= 0.
CMat su2_exp_closed(const CMat& z, double t);

/// e^{tZ} for Z in so(3): I + s(t) Z + c(t) Z^2 with mu = tr(Z^2)/2.
Mat so3_exp_closed(const Mat& z, double t);

/// e^{tZ} for Z in so(2,1), same quadratic calculus as so(3).
Mat so21_exp_closed(const Mat& z, double t);

/// e^{tZ} using the model's exponential backend (closed form where the
/// catalog provides one, scaling-and-squaring otherwise).
CMat group_exp(const LieGroupModel& model, const CMat& z, double t = 1.0);

/// Closed-form solution e^{t(X + W)} e^{-tX} on the 3-dimensional
/// semisimple groups, built only from the functional-calculus exponentials.
GroupElement closed_solution_3dim(const LinearControlSystem& system, const Vec& u, double t);

bool has_closed_exp_3dim(GroupKind kind);

}  // namespace liesys
