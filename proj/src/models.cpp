#include "liesys/models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace liesys {

std::string to_string(GroupKind kind) {
  switch (kind) {
    case GroupKind::heisenberg: return "heisenberg";
    case GroupKind::abelian: return "abelian";
    case GroupKind::gl_plus: return "gl_plus";
    case GroupKind::sl2: return "sl2";
    case GroupKind::su2: return "su2";
    case GroupKind::so3: return "so3";
    case GroupKind::so21: return "so21";
  }
  return "unknown";
}

std::string to_string(FlowBackend backend) {
  return backend == FlowBackend::inner_conjugation ? "inner_conjugation" : "exp_log_transport";
}

// ---------------------------------------------------------------------------
// StructureConstants

Vec StructureConstants::bracket(const Vec& a, const Vec& b) const {
  Vec out = Vec::Zero(dim_);
  for (int i = 0; i < dim_; ++i) {
    if (a(i) == 0.0) continue;
    for (int j = 0; j < dim_; ++j) {
      if (b(j) == 0.0) continue;
      const double w = a(i) * b(j);
      for (int k = 0; k < dim_; ++k) {
        out(k) += w * (*this)(k, i, j);
      }
    }
  }
  return out;
}

Mat StructureConstants::ad(const Vec& x) const {
  Mat out = Mat::Zero(dim_, dim_);
  for (int j = 0; j < dim_; ++j) {
    for (int i = 0; i < dim_; ++i) {
      if (x(i) == 0.0) continue;
      for (int k = 0; k < dim_; ++k) {
        out(k, j) += x(i) * (*this)(k, i, j);
      }
    }
  }
  return out;
}

double StructureConstants::max_abs_difference(const StructureConstants& other) const {
  if (other.dim_ != dim_) return INFINITY;
  double diff = 0.0;
  for (std::size_t i = 0; i < data_.size(); ++i) {
    diff = std::max(diff, std::abs(data_[i] - other.data_[i]));
  }
  return diff;
}

namespace {

std::vector<Vec> unit_vectors(int dim) {
  std::vector<Vec> out;
  for (int i = 0; i < dim; ++i) out.push_back(Vec::Unit(dim, i));
  return out;
}

std::vector<Vec> bracket_span(const StructureConstants& c, const std::vector<Vec>& left,
                              const std::vector<Vec>& right, double tol) {
  std::vector<Vec> products;
  for (const Vec& a : left) {
    for (const Vec& b : right) {
      products.push_back(c.bracket(a, b));
    }
  }
  // Inputs are orthonormal, so products below tol are zero in absolute terms.
  double largest = 0.0;
  for (const Vec& v : products) largest = std::max(largest, v.norm());
  if (largest < tol) return {};
  return span_union(products, tol);
}

Mat realified(const std::vector<CMat>& basis) {
  const Eigen::Index n = basis.front().rows();
  Mat out(2 * n * n, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const CMat& b = basis[k];
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < n; ++c) {
        out(r * n + c, static_cast<Eigen::Index>(k)) = b(r, c).real();
        out(n * n + r * n + c, static_cast<Eigen::Index>(k)) = b(r, c).imag();
      }
    }
  }
  return out;
}

Vec realified(const CMat& m) {
  const Eigen::Index n = m.rows();
  Vec out(2 * n * n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      out(r * n + c) = m(r, c).real();
      out(n * n + r * n + c) = m(r, c).imag();
    }
  }
  return out;
}

}  // namespace

ClassFlags compute_class_flags(const StructureConstants& c, double tol) {
  const int dim = c.dim();
  ClassFlags flags;
  const std::vector<Vec> full = unit_vectors(dim);

  std::vector<Vec> lower = full;
  for (int step = 0; step <= dim && !lower.empty(); ++step) {
    lower = bracket_span(c, full, lower, tol);
  }
  flags.nilpotent = lower.empty();

  std::vector<Vec> derived = full;
  for (int step = 0; step <= dim && !derived.empty(); ++step) {
    derived = bracket_span(c, derived, derived, tol);
  }
  flags.solvable = derived.empty();

  Mat killing(dim, dim);
  std::vector<Mat> ads;
  for (const Vec& e : full) ads.push_back(c.ad(e));
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      killing(i, j) = (ads[static_cast<std::size_t>(i)] * ads[static_cast<std::size_t>(j)]).trace();
    }
  }
  const Vec sv = killing.jacobiSvd().singularValues();
  flags.semisimple = dim > 0 && sv(0) > 0.0 && sv(dim - 1) > tol * sv(0);
  return flags;
}

StructureConstants structure_constants_from_basis(const std::vector<CMat>& basis) {
  const int dim = static_cast<int>(basis.size());
  StructureConstants c(dim);
  if (dim == 0) return c;
  const auto solver = realified(basis).completeOrthogonalDecomposition();
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      const CMat br = bracket(basis[static_cast<std::size_t>(i)], basis[static_cast<std::size_t>(j)]);
      const Vec coords = solver.solve(realified(br));
      for (int k = 0; k < dim; ++k) c(k, i, j) = coords(k);
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// LieGroupModel

LieGroupModel::LieGroupModel(Definition def) : def_(std::move(def)) {
  const int d = dim();
  const int n = def_.ambient_size;
  if (d == 0 || n <= 0) {
    throw InputError("model " + def_.name + ": empty basis or ambient size");
  }
  if (def_.structure_constants.dim() != d) {
    throw InputError("model " + def_.name + ": structure constants do not match basis size");
  }
  for (const CMat& b : def_.basis) {
    if (b.rows() != n || b.cols() != n) {
      throw InputError("model " + def_.name + ": basis matrix has wrong ambient size");
    }
  }
  const Mat real_basis = realified(def_.basis);
  const auto cod = real_basis.completeOrthogonalDecomposition();
  if (cod.rank() != d) {
    throw InputError("model " + def_.name + ": basis is linearly dependent");
  }
  coords_solver_ = cod.pseudoInverse();

  const StructureConstants& c = def_.structure_constants;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) {
        if (std::abs(c(k, i, j) + c(k, j, i)) > 1e-12) {
          throw InputError("model " + def_.name + ": structure constants are not antisymmetric");
        }
      }
      CMat expected = CMat::Zero(n, n);
      for (int k = 0; k < d; ++k) expected += c(k, i, j) * def_.basis[static_cast<std::size_t>(k)];
      const CMat actual = liesys::bracket(def_.basis[static_cast<std::size_t>(i)], def_.basis[static_cast<std::size_t>(j)]);
      if ((actual - expected).cwiseAbs().maxCoeff() > 1e-10) {
        std::ostringstream msg;
        msg << "model " << def_.name << ": structure constants disagree with matrix bracket at (" << i << ","
            << j << ")";
        throw InputError(msg.str());
      }
    }
  }
  if (compute_class_flags(c) != def_.flags) {
    throw InputError("model " + def_.name + ": class flags disagree with the computed series");
  }
}

CMat LieGroupModel::to_matrix(const Vec& coords) const {
  if (coords.size() != dim()) {
    throw InputError("model " + def_.name + ": coordinate vector has wrong length");
  }
  CMat out = CMat::Zero(def_.ambient_size, def_.ambient_size);
  for (int k = 0; k < dim(); ++k) {
    if (coords(k) != 0.0) out += coords(k) * def_.basis[static_cast<std::size_t>(k)];
  }
  return out;
}

Vec LieGroupModel::to_coords(const CMat& m) const {
  if (m.rows() != def_.ambient_size || m.cols() != def_.ambient_size) {
    throw InputError("model " + def_.name + ": matrix has wrong ambient size");
  }
  return coords_solver_ * realified(m);
}

double LieGroupModel::algebra_residual(const CMat& m) const {
  const CMat back = to_matrix(to_coords(m));
  return (m - back).cwiseAbs().maxCoeff() / std::max(1.0, m.cwiseAbs().maxCoeff());
}

double LieGroupModel::constraint_residual(const CMat& g) const {
  const int n = def_.ambient_size;
  if (g.rows() != n || g.cols() != n || !g.allFinite()) return INFINITY;
  const double scale = std::max(1.0, g.squaredNorm());
  const double entry_scale = std::max(1.0, g.cwiseAbs().maxCoeff());
  const double imag = def_.complex_realization ? 0.0 : g.imag().cwiseAbs().maxCoeff() / entry_scale;
  const CMat id = CMat::Identity(n, n);

  switch (def_.kind) {
    case GroupKind::heisenberg:
    case GroupKind::abelian: {
      // Unipotent upper triangular (Heisenberg) or identity plus last column
      // (abelian translations).
      double r = imag;
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) r = std::max(r, std::abs(g(i, j) - id(i, j)) / entry_scale);
      }
      if (def_.kind == GroupKind::abelian) {
        for (int i = 0; i < n - 1; ++i) {
          for (int j = i + 1; j < n - 1; ++j) r = std::max(r, std::abs(g(i, j)) / entry_scale);
        }
      }
      return r;
    }
    case GroupKind::gl_plus: {
      const double det = g.real().determinant();
      return det > 0.0 ? imag : std::max(imag, 1.0);
    }
    case GroupKind::sl2:
      return std::max(imag, std::abs(g.determinant() - 1.0) / scale);
    case GroupKind::su2: {
      const double unitary = (g.adjoint() * g - id).cwiseAbs().maxCoeff() / scale;
      return std::max(unitary, std::abs(g.determinant() - 1.0) / scale);
    }
    case GroupKind::so3: {
      const double orth = (g.transpose() * g - id).cwiseAbs().maxCoeff() / scale;
      return std::max({imag, orth, std::abs(g.determinant() - 1.0) / scale});
    }
    case GroupKind::so21: {
      CMat j = id;
      j(2, 2) = -1.0;
      const double form = (g.transpose() * j * g - j).cwiseAbs().maxCoeff() / scale;
      return std::max({imag, form, std::abs(g.determinant() - 1.0) / scale});
    }
  }
  return INFINITY;
}

// ---------------------------------------------------------------------------
// Elements

AlgebraElement::AlgebraElement(ModelPtr model, Vec coords) : model_(std::move(model)), coords_(std::move(coords)) {
  if (!model_) throw InputError("algebra element without a model");
  if (coords_.size() != model_->dim()) {
    throw InputError("algebra element of " + model_->name() + ": wrong coordinate count");
  }
  if (!coords_.allFinite()) throw InputError("algebra element has non-finite coordinates");
}

GroupElement::GroupElement(ModelPtr model, CMat matrix, NoCheck) : model_(std::move(model)), matrix_(std::move(matrix)) {
  if (!model_) throw InputError("group element without a model");
  if (matrix_.rows() != model_->ambient_size() || matrix_.cols() != model_->ambient_size()) {
    throw InputError("group element of " + model_->name() + ": wrong matrix size");
  }
}

GroupElement::GroupElement(ModelPtr model, CMat matrix) : GroupElement(std::move(model), std::move(matrix), NoCheck{}) {
  const double r = model_->constraint_residual(matrix_);
  if (!(r <= kGroupConstraintTol)) {
    std::ostringstream msg;
    msg << "matrix is not an element of " << model_->name() << " (constraint residual " << r << ")";
    throw InputError(msg.str());
  }
}

GroupElement GroupElement::unchecked(ModelPtr model, CMat matrix) {
  return GroupElement(std::move(model), std::move(matrix), NoCheck{});
}

GroupElement GroupElement::identity(const ModelPtr& model) {
  const int n = model->ambient_size();
  return GroupElement(model, CMat::Identity(n, n), NoCheck{});
}

GroupElement GroupElement::operator*(const GroupElement& other) const {
  if (!(*model_ == *other.model_)) throw InputError("product of elements from different groups");
  return GroupElement(model_, matrix_ * other.matrix_, NoCheck{});
}

// ---------------------------------------------------------------------------
// Derivations

Derivation::Derivation(ModelPtr model, Mat matrix, std::optional<Vec> inner_generator)
    : model_(std::move(model)), matrix_(std::move(matrix)), inner_generator_(std::move(inner_generator)) {
  if (!model_) throw InputError("derivation without a model");
  const int d = model_->dim();
  if (matrix_.rows() != d || matrix_.cols() != d) {
    throw InputError("derivation on " + model_->name() + " must be a " + std::to_string(d) + "x" +
                     std::to_string(d) + " matrix");
  }
  if (!matrix_.allFinite()) throw InputError("derivation has non-finite entries");
  if (inner_generator_) {
    if (inner_generator_->size() != d || !inner_generator_->allFinite()) {
      throw InputError("inner generator has wrong length or non-finite entries");
    }
    const Mat ad = model_->ad(*inner_generator_);
    if ((ad - matrix_).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, ad.cwiseAbs().maxCoeff())) {
      throw InputError("derivation matrix does not equal ad of its inner generator");
    }
  }
}

Derivation derivation_from_inner(const ModelPtr& model, const Vec& x) {
  AlgebraElement checked(model, x);
  return Derivation(model, model->ad(checked.coords()), checked.coords());
}

std::vector<LeibnizViolation> validate_derivation(const Derivation& d, double tol) {
  std::vector<LeibnizViolation> out;
  const ModelPtr& model = d.model();
  const int dim = model->dim();
  const Mat& m = d.matrix();
  const double threshold = tol * std::max(1.0, m.cwiseAbs().maxCoeff());
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) {
      const Vec ei = Vec::Unit(dim, i);
      const Vec ej = Vec::Unit(dim, j);
      const Vec lhs = m * model->bracket(ei, ej);
      const Vec rhs = model->bracket(m * ei, ej) + model->bracket(ei, m * ej);
      const double r = (lhs - rhs).norm();
      if (r > threshold) out.push_back({i, j, r});
    }
  }
  return out;
}

std::optional<Vec> find_inner_generator(const ModelPtr& model, const Mat& d, double tol) {
  const int dim = model->dim();
  Mat system(dim * dim, dim);
  for (int k = 0; k < dim; ++k) {
    const Mat ad = model->ad(Vec::Unit(dim, k));
    system.col(k) = Eigen::Map<const Vec>(ad.data(), dim * dim);
  }
  const Vec rhs = Eigen::Map<const Vec>(d.data(), dim * dim);
  const Vec x = system.completeOrthogonalDecomposition().solve(rhs);
  const double residual = (system * x - rhs).cwiseAbs().maxCoeff();
  if (residual > tol * std::max(1.0, d.cwiseAbs().maxCoeff())) return std::nullopt;
  return x;
}

// ---------------------------------------------------------------------------
// Systems and controls

LinearControlSystem::LinearControlSystem(ModelPtr model, Derivation derivation,
                                         std::vector<AlgebraElement> control_fields,
                                         std::optional<ControlRange> control_range)
    : model_(std::move(model)),
      derivation_(std::move(derivation)),
      control_fields_(std::move(control_fields)),
      control_range_(std::move(control_range)) {
  if (!model_) throw InputError("system without a model");
  if (!(*derivation_.model() == *model_)) throw InputError("derivation belongs to a different group");
  if (control_fields_.empty()) throw InputError("a linear control system needs at least one control field");
  for (const AlgebraElement& y : control_fields_) {
    if (!(*y.model() == *model_)) throw InputError("control field belongs to a different group");
  }
  const auto violations = validate_derivation(derivation_);
  if (!violations.empty()) {
    std::ostringstream msg;
    msg << "derivation violates the Leibniz rule on basis pair (" << violations.front().i + 1 << ","
        << violations.front().j + 1 << "), residual " << violations.front().residual;
    throw InputError(msg.str());
  }
  if (control_range_) {
    const auto m = static_cast<Eigen::Index>(control_fields_.size());
    if (control_range_->min.size() != m || control_range_->max.size() != m) {
      throw InputError("control range bounds must have one entry per control field");
    }
    if (!control_range_->min.allFinite() || !control_range_->max.allFinite()) {
      throw InputError("control range bounds must be finite");
    }
    if ((control_range_->min.array() > control_range_->max.array()).any()) {
      throw InputError("control range has min > max");
    }
  }
}

Vec LinearControlSystem::control_direction(const Vec& u) const {
  if (u.size() != num_controls()) {
    throw InputError("control vector has " + std::to_string(u.size()) + " entries, system has " +
                     std::to_string(num_controls()) + " control fields");
  }
  Vec w = Vec::Zero(model_->dim());
  for (int j = 0; j < num_controls(); ++j) {
    w += u(j) * control_fields_[static_cast<std::size_t>(j)].coords();
  }
  return w;
}

PiecewiseControl::PiecewiseControl(std::vector<ControlSegment> segments) : segments_(std::move(segments)) {
  for (const ControlSegment& s : segments_) {
    if (!(s.duration > 0.0) || !std::isfinite(s.duration)) {
      throw InputError("control segment durations must be positive and finite");
    }
    if (!s.u.allFinite()) throw InputError("control values must be finite");
    if (s.u.size() != segments_.front().u.size()) {
      throw InputError("control segments have inconsistent control dimension");
    }
  }
}

PiecewiseControl PiecewiseControl::constant(const Vec& u, double t) {
  return PiecewiseControl({ControlSegment{t, u}});
}

double PiecewiseControl::total_duration() const {
  double total = 0.0;
  for (const ControlSegment& s : segments_) total += s.duration;
  return total;
}

void PiecewiseControl::check_against(const LinearControlSystem& system) const {
  for (const ControlSegment& s : segments_) {
    if (s.u.size() != system.num_controls()) {
      throw InputError("control segment has " + std::to_string(s.u.size()) + " values, system has " +
                       std::to_string(system.num_controls()) + " control fields");
    }
    if (const auto& range = system.control_range()) {
      if ((s.u.array() < range->min.array()).any() || (s.u.array() > range->max.array()).any()) {
        throw InputError("control value outside control_range");
      }
    }
  }
}

}  // namespace liesys
