#include "liesys/catalog.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

namespace liesys {

namespace {

CMat unit(int n, int r, int c) {
  CMat m = CMat::Zero(n, n);
  m(r, c) = 1.0;
  return m;
}

template <typename Build>
ModelPtr cached(std::map<int, ModelPtr>& cache, int key, Build build) {
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, build()).first;
  return it->second;
}

// Structure constants of a cyclic real form [e0,e1] = a e2, [e1,e2] = b e0,
// [e2,e0] = c e1.
StructureConstants cyclic_constants(double a, double b, double c) {
  StructureConstants sc(3);
  sc.set_antisymmetric(2, 0, 1, a);
  sc.set_antisymmetric(0, 1, 2, b);
  sc.set_antisymmetric(1, 2, 0, c);
  return sc;
}

double scale_of(const Mat& z) { return std::max(1.0, z.cwiseAbs().maxCoeff()); }

// I + s Z + c Z^2 with s = sinh(t r)/r, c = (cosh(t r) - 1)/r^2, r^2 = mu,
// continued to the trigonometric branch for mu < 0.
Mat quadratic_exp(const Mat& z, double t) {
  const Mat z2 = z * z;
  const double mu = 0.5 * z2.trace();
  const double s_arg = t * t * mu;
  const Mat id = Mat::Identity(3, 3);
  if (s_arg > kClosedFormBranchTol) {
    const double r = std::sqrt(mu);
    const double half = std::sinh(0.5 * t * r);
    return id + (std::sinh(t * r) / r) * z + (2.0 * half * half / mu) * z2;
  }
  if (s_arg < -kClosedFormBranchTol) {
    const double w = std::sqrt(-mu);
    const double half = std::sin(0.5 * t * w);
    return id + (std::sin(t * w) / w) * z + (2.0 * half * half / (w * w)) * z2;
  }
  return id + t * z + (0.5 * t * t) * z2;
}

}  // namespace

// ---------------------------------------------------------------------------
// Models

ModelPtr heisenberg_model() {
  static const ModelPtr model = [] {
    LieGroupModel::Definition def;
    def.name = "heisenberg";
    def.kind = GroupKind::heisenberg;
    def.ambient_size = 3;
    def.basis = {unit(3, 0, 1), unit(3, 1, 2), unit(3, 0, 2)};
    def.structure_constants = StructureConstants(3);
    def.structure_constants.set_antisymmetric(2, 0, 1, 1.0);
    def.flags = {.nilpotent = true, .solvable = true, .semisimple = false};
    def.exp_backend = ExpBackend::closed_form;
    def.flow_backend = FlowBackend::exp_log_transport;
    return std::make_shared<const LieGroupModel>(std::move(def));
  }();
  return model;
}

ModelPtr abelian_model(int n) {
  if (n < 1) throw InputError("abelian model needs n >= 1");
  static std::map<int, ModelPtr> cache;
  return cached(cache, n, [n] {
    LieGroupModel::Definition def;
    def.name = "abelian(" + std::to_string(n) + ")";
    def.kind = GroupKind::abelian;
    def.ambient_size = n + 1;
    for (int i = 0; i < n; ++i) def.basis.push_back(unit(n + 1, i, n));
    def.structure_constants = StructureConstants(n);
    def.flags = {.nilpotent = true, .solvable = true, .semisimple = false};
    def.exp_backend = ExpBackend::closed_form;
    def.flow_backend = FlowBackend::exp_log_transport;
    return std::make_shared<const LieGroupModel>(std::move(def));
  });
}

ModelPtr gl_plus_model(int n) {
  if (n < 2) throw InputError("gl_plus model needs n >= 2");
  static std::map<int, ModelPtr> cache;
  return cached(cache, n, [n] {
    LieGroupModel::Definition def;
    def.name = "gl_plus(" + std::to_string(n) + ")";
    def.kind = GroupKind::gl_plus;
    def.ambient_size = n;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) def.basis.push_back(unit(n, i, j));
    }
    // [E_ij, E_kl] = delta_jk E_il - delta_li E_kj
    StructureConstants sc(n * n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          for (int l = 0; l < n; ++l) {
            const int a = i * n + j;
            const int b = k * n + l;
            if (j == k) sc(i * n + l, a, b) += 1.0;
            if (l == i) sc(k * n + j, a, b) -= 1.0;
          }
        }
      }
    }
    def.structure_constants = sc;
    def.flags = {};
    def.exp_backend = ExpBackend::generic_expm;
    def.flow_backend = FlowBackend::inner_conjugation;
    return std::make_shared<const LieGroupModel>(std::move(def));
  });
}

ModelPtr sl2_model() {
  static const ModelPtr model = [] {
    LieGroupModel::Definition def;
    def.name = "sl2";
    def.kind = GroupKind::sl2;
    def.ambient_size = 2;
    CMat h = CMat::Zero(2, 2);
    h(0, 0) = 1.0;
    h(1, 1) = -1.0;
    def.basis = {h, unit(2, 0, 1), unit(2, 1, 0)};
    // [H,E] = 2E, [H,F] = -2F, [E,F] = H
    StructureConstants sc(3);
    sc.set_antisymmetric(1, 0, 1, 2.0);
    sc.set_antisymmetric(2, 0, 2, -2.0);
    sc.set_antisymmetric(0, 1, 2, 1.0);
    def.structure_constants = sc;
    def.flags = {.nilpotent = false, .solvable = false, .semisimple = true};
    def.exp_backend = ExpBackend::closed_form;
    def.flow_backend = FlowBackend::inner_conjugation;
    return std::make_shared<const LieGroupModel>(std::move(def));
  }();
  return model;
}

ModelPtr su2_model() {
  static const ModelPtr model = [] {
    LieGroupModel::Definition def;
    def.name = "su2";
    def.kind = GroupKind::su2;
    def.ambient_size = 2;
    const Complex i(0.0, 1.0);
    CMat sx(2, 2), sy(2, 2), sz(2, 2);
    sx << 0.0, 1.0, 1.0, 0.0;
    sy << 0.0, -i, i, 0.0;
    sz << 1.0, 0.0, 0.0, -1.0;
    const Complex f(0.0, -0.5);
    def.basis = {f * sx, f * sy, f * sz};
    def.structure_constants = cyclic_constants(1.0, 1.0, 1.0);
    def.flags = {.nilpotent = false, .solvable = false, .semisimple = true};
    def.exp_backend = ExpBackend::closed_form;
    def.flow_backend = FlowBackend::inner_conjugation;
    def.complex_realization = true;
    return std::make_shared<const LieGroupModel>(std::move(def));
  }();
  return model;
}

ModelPtr so3_model() {
  static const ModelPtr model = [] {
    LieGroupModel::Definition def;
    def.name = "so3";
    def.kind = GroupKind::so3;
    def.ambient_size = 3;
    def.basis = {unit(3, 2, 1) - unit(3, 1, 2), unit(3, 0, 2) - unit(3, 2, 0), unit(3, 1, 0) - unit(3, 0, 1)};
    def.structure_constants = cyclic_constants(1.0, 1.0, 1.0);
    def.flags = {.nilpotent = false, .solvable = false, .semisimple = true};
    def.exp_backend = ExpBackend::closed_form;
    def.flow_backend = FlowBackend::inner_conjugation;
    return std::make_shared<const LieGroupModel>(std::move(def));
  }();
  return model;
}

ModelPtr so21_model() {
  static const ModelPtr model = [] {
    LieGroupModel::Definition def;
    def.name = "so21";
    def.kind = GroupKind::so21;
    def.ambient_size = 3;
    const CMat rot = unit(3, 1, 0) - unit(3, 0, 1);
    const CMat bx = unit(3, 0, 2) + unit(3, 2, 0);
    const CMat by = unit(3, 1, 2) + unit(3, 2, 1);
    def.basis = {rot, bx, by};
    // [R,Bx] = By, [Bx,By] = -R, [By,R] = Bx
    def.structure_constants = cyclic_constants(1.0, -1.0, 1.0);
    def.flags = {.nilpotent = false, .solvable = false, .semisimple = true};
    def.exp_backend = ExpBackend::closed_form;
    def.flow_backend = FlowBackend::inner_conjugation;
    return std::make_shared<const LieGroupModel>(std::move(def));
  }();
  return model;
}

ModelPtr model_by_name(const std::string& name, int n) {
  if (name == "heisenberg") return heisenberg_model();
  if (name == "sl2") return sl2_model();
  if (name == "su2") return su2_model();
  if (name == "so3") return so3_model();
  if (name == "so21") return so21_model();
  if (name == "gl_plus") return gl_plus_model(n);
  if (name == "abelian") return abelian_model(n);
  throw InputError("unknown group '" + name + "'");
}

// ---------------------------------------------------------------------------
// Heisenberg helpers

namespace heisenberg {

CMat element(const Coords& xyz) {
  CMat g = CMat::Identity(3, 3);
  g(0, 1) = xyz.x();
  g(1, 2) = xyz.y();
  g(0, 2) = xyz.z();
  return g;
}

Coords coords(const CMat& g) { return {g(0, 1).real(), g(1, 2).real(), g(0, 2).real()}; }

Coords product(const Coords& a, const Coords& b) {
  return {a.x() + b.x(), a.y() + b.y(), a.z() + b.z() + a.x() * b.y()};
}

Coords exp(const Coords& y) { return {y.x(), y.y(), 0.5 * y.x() * y.y() + y.z()}; }

Coords right_invariant_field(const Coords& field, const Coords& at) {
  return {field.x(), field.y(), field.x() * at.y() + field.z()};
}

Mat derivation(double a11, double a12, double a21, double a22, double a31, double a32) {
  Mat d(3, 3);
  d << a11, a12, 0.0, a21, a22, 0.0, a31, a32, a11 + a22;
  return d;
}

std::vector<std::string> derivation_pattern_violations(const Mat& d, double tol) {
  std::vector<std::string> out;
  if (d.rows() != 3 || d.cols() != 3) {
    out.push_back("derivation must be 3x3");
    return out;
  }
  const double scale = scale_of(d);
  if (std::abs(d(0, 2)) > tol * scale) out.push_back("a13 must vanish");
  if (std::abs(d(1, 2)) > tol * scale) out.push_back("a23 must vanish");
  if (std::abs(d(2, 2) - d(0, 0) - d(1, 1)) > tol * scale) out.push_back("a33 must equal a11 + a22");
  return out;
}

}  // namespace heisenberg

LinearControlSystem gl_linear_system(const Mat& a, const std::vector<Mat>& b_list) {
  const auto n = static_cast<int>(a.rows());
  if (a.cols() != n) throw InputError("gl_linear_system: A must be square");
  const ModelPtr model = gl_plus_model(n);
  auto flatten = [n](const Mat& m) {
    if (m.rows() != n || m.cols() != n) throw InputError("gl_linear_system: dimension mismatch");
    Vec v(n * n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) v(i * n + j) = m(i, j);
    }
    return v;
  };
  std::vector<AlgebraElement> fields;
  for (const Mat& b : b_list) fields.emplace_back(model, flatten(b));
  return LinearControlSystem(model, derivation_from_inner(model, flatten(a)), std::move(fields));
}

// ---------------------------------------------------------------------------
// Closed-form exponentials

Mat sl2_exp_closed(const Mat& z, double t) {
  if (z.rows() != 2 || z.cols() != 2) throw InputError("sl2_exp_closed: expected a 2x2 matrix");
  if (std::abs(z.trace()) > 1e-10 * scale_of(z)) throw InputError("sl2_exp_closed: matrix is not traceless");
  const double mu = -z.determinant();
  const double s_arg = t * t * mu;
  const Mat id = Mat::Identity(2, 2);
  if (s_arg > kClosedFormBranchTol) {
    const double r = std::sqrt(mu);
    return std::cosh(t * r) * id + (std::sinh(t * r) / r) * z;
  }
  if (s_arg < -kClosedFormBranchTol) {
    const double w = std::sqrt(-mu);
    return std::cos(t * w) * id + (std::sin(t * w) / w) * z;
  }
  return id + t * z;
}

CMat su2_exp_closed(const CMat& z, double t) {
  if (z.rows() != 2 || z.cols() != 2) throw InputError("su2_exp_closed: expected a 2x2 matrix");
  const double scale = std::max(1.0, z.cwiseAbs().maxCoeff());
  if ((z + z.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale || std::abs(z.trace()) > 1e-10 * scale) {
    throw InputError("su2_exp_closed: matrix is not anti-Hermitian traceless");
  }
  const double lambda2 = z.determinant().real();
  const CMat id = CMat::Identity(2, 2);
  if (t * t * lambda2 > kClosedFormBranchTol) {
    const double lambda = std::sqrt(lambda2);
    return std::cos(t * lambda) * id + (std::sin(t * lambda) / lambda) * z;
  }
  return id + t * z;
}

Mat so3_exp_closed(const Mat& z, double t) {
  if (z.rows() != 3 || z.cols() != 3) throw InputError("so3_exp_closed: expected a 3x3 matrix");
  if ((z + z.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale_of(z)) {
    throw InputError("so3_exp_closed: matrix is not skew-symmetric");
  }
  return quadratic_exp(z, t);
}

Mat so21_exp_closed(const Mat& z, double t) {
  if (z.rows() != 3 || z.cols() != 3) throw InputError("so21_exp_closed: expected a 3x3 matrix");
  Mat j = Mat::Identity(3, 3);
  j(2, 2) = -1.0;
  if ((z.transpose() * j + j * z).cwiseAbs().maxCoeff() > 1e-10 * scale_of(z)) {
    throw InputError("so21_exp_closed: matrix is not in so(2,1)");
  }
  return quadratic_exp(z, t);
}

bool has_closed_exp_3dim(GroupKind kind) {
  return kind == GroupKind::sl2 || kind == GroupKind::su2 || kind == GroupKind::so3 || kind == GroupKind::so21;
}

CMat group_exp(const LieGroupModel& model, const CMat& z, double t) {
  if (model.exp_backend() == ExpBackend::generic_expm) return expm(z, t);
  switch (model.kind()) {
    case GroupKind::heisenberg: {
      const heisenberg::Coords y = t * heisenberg::coords(z + CMat::Identity(3, 3));
      return heisenberg::element(heisenberg::exp(y));
    }
    case GroupKind::abelian: {
      // Translations: Z^2 = 0.
      const auto n = z.rows();
      return CMat::Identity(n, n) + t * z;
    }
    case GroupKind::sl2: return to_complex(sl2_exp_closed(real_part_checked(z), t));
    case GroupKind::su2: return su2_exp_closed(z, t);
    case GroupKind::so3: return to_complex(so3_exp_closed(real_part_checked(z), t));
    case GroupKind::so21: return to_complex(so21_exp_closed(real_part_checked(z), t));
    case GroupKind::gl_plus: break;
  }
  return expm(z, t);
}

GroupElement closed_solution_3dim(const LinearControlSystem& system, const Vec& u, double t) {
  const ModelPtr& model = system.model();
  if (!has_closed_exp_3dim(model->kind())) {
    throw InputError("closed_solution_3dim: group " + model->name() + " has no 3-dimensional closed form");
  }
  if (!system.derivation().is_inner()) {
    throw InputError("closed_solution_3dim: derivation is not inner");
  }
  const CMat x = model->to_matrix(*system.derivation().inner_generator());
  const CMat sigma = x + model->to_matrix(system.control_direction(u));
  auto closed = [&](const CMat& z, double s) -> CMat {
    switch (model->kind()) {
      case GroupKind::sl2: return to_complex(sl2_exp_closed(real_part_checked(z), s));
      case GroupKind::su2: return su2_exp_closed(z, s);
      case GroupKind::so3: return to_complex(so3_exp_closed(real_part_checked(z), s));
      default: return to_complex(so21_exp_closed(real_part_checked(z), s));
    }
  };
  return GroupElement::unchecked(model, closed(sigma, t) * closed(x, -t));
}

}  // namespace liesys
