#include "liesys/matcore.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace liesys {

namespace {

template <typename Scalar>
void require_square(const Matrix<Scalar>& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    std::ostringstream msg;
    msg << what << ": expected a non-empty square matrix, got " << a.rows()
        << "x" << a.cols();
    throw InputError(msg.str());
  }
}

template <typename Scalar>
double norm1(const Matrix<Scalar>& a) {
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

// Pade [13/13] coefficients for exp, normalized so b[0] = 1.
constexpr std::array<double, 14> kPade13 = {
    1.0,
    1.0 / 2.0,
    7771770303897600.0 / 64764752532480000.0,
    1187353796428800.0 / 64764752532480000.0,
    129060195264000.0 / 64764752532480000.0,
    10559470521600.0 / 64764752532480000.0,
    670442572800.0 / 64764752532480000.0,
    33522128640.0 / 64764752532480000.0,
    1323241920.0 / 64764752532480000.0,
    40840800.0 / 64764752532480000.0,
    960960.0 / 64764752532480000.0,
    16380.0 / 64764752532480000.0,
    182.0 / 64764752532480000.0,
    1.0 / 64764752532480000.0};

constexpr double kSquaringThreshold = 0.5;

template <typename Scalar>
Matrix<Scalar> pade13(const Matrix<Scalar>& a) {
  const auto& b = kPade13;
  const Eigen::Index n = a.rows();
  const Matrix<Scalar> id = Matrix<Scalar>::Identity(n, n);
  const Matrix<Scalar> a2 = a * a;
  const Matrix<Scalar> a4 = a2 * a2;
  const Matrix<Scalar> a6 = a4 * a2;
  Matrix<Scalar> tmp = b[13] * a6 + b[11] * a4 + b[9] * a2;
  const Matrix<Scalar> u =
      a * (a6 * tmp + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
  tmp = b[12] * a6 + b[10] * a4 + b[8] * a2;
  const Matrix<Scalar> v = a6 * tmp + b[6] * a6 + b[4] * a4 + b[2] * a2 + id;
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

template <typename Scalar>
Matrix<Scalar> bracket(const Matrix<Scalar>& a, const Matrix<Scalar>& b) {
  require_square(a, "bracket");
  if (a.rows() != b.rows() || b.rows() != b.cols()) {
    throw InputError("bracket: dimension mismatch");
  }
  return a * b - b * a;
}

template <typename Scalar>
Matrix<Scalar> expm(const Matrix<Scalar>& a, double t) {
  require_square(a, "expm");
  if (!a.allFinite() || !std::isfinite(t)) {
    throw InputError("expm: non-finite input");
  }
  Matrix<Scalar> scaled = t * a;
  const double norm = norm1(scaled);
  int squarings = 0;
  if (norm > kSquaringThreshold) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / kSquaringThreshold)));
    scaled /= std::ldexp(1.0, squarings);
  }
  Matrix<Scalar> result = pade13(scaled);
  for (int i = 0; i < squarings; ++i) {
    result = result * result;
  }
  if (!result.allFinite()) {
    throw NumericalError("expm: result overflowed");
  }
  return result;
}

template <typename Scalar>
Matrix<Scalar> logm_unipotent(const Matrix<Scalar>& m) {
  require_square(m, "logm_unipotent");
  const Eigen::Index n = m.rows();
  const Matrix<Scalar> k = m - Matrix<Scalar>::Identity(n, n);
  const double scale = std::max(1.0, k.cwiseAbs().maxCoeff());

  // K^n must vanish for a nilpotent K.
  Matrix<Scalar> power = k;
  Matrix<Scalar> log = Matrix<Scalar>::Zero(n, n);
  for (Eigen::Index j = 1; j <= n; ++j) {
    if (j < n) {
      const double sign = (j % 2 == 1) ? 1.0 : -1.0;
      log += (sign / static_cast<double>(j)) * power;
      power = power * k;
    } else if (power.cwiseAbs().maxCoeff() > 1e-9 * std::pow(scale, static_cast<double>(n))) {
      throw InputError("logm_unipotent: M - I is not nilpotent");
    }
  }
  return log;
}

std::vector<Complex> eigenvalues(const Mat& a) {
  require_square(a, "eigenvalues");
  if (!a.allFinite()) {
    throw InputError("eigenvalues: non-finite input");
  }
  const Eigen::Index n = a.rows();
  Eigen::RealSchur<Mat> schur(n);
  schur.setMaxIterations(100 * n);
  schur.compute(a, /*computeU=*/false);
  const Mat& tri = schur.matrixT();
  if (schur.info() != Eigen::Success) {
    double residual = 0.0;
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      residual = std::max(residual, std::abs(tri(i + 1, i)));
    }
    std::ostringstream msg;
    msg << "eigenvalues: QR iteration did not converge within " << 100 * n
        << " iterations (largest subdiagonal residual " << residual << ")";
    throw NumericalError(msg.str());
  }

  std::vector<Complex> values;
  values.reserve(static_cast<std::size_t>(n));
  Eigen::Index i = 0;
  while (i < n) {
    if (i == n - 1 || tri(i + 1, i) == 0.0) {
      values.emplace_back(tri(i, i), 0.0);
      ++i;
      continue;
    }
    // 2x2 block [[a b][c d]].
    const double p = 0.5 * (tri(i, i) - tri(i + 1, i + 1));
    const double q = p * p + tri(i + 1, i) * tri(i, i + 1);
    const double centre = tri(i + 1, i + 1) + p;
    const double z = std::sqrt(std::abs(q));
    if (q >= 0.0) {
      values.emplace_back(centre + z, 0.0);
      values.emplace_back(centre - z, 0.0);
    } else {
      values.emplace_back(centre, z);
      values.emplace_back(centre, -z);
    }
    i += 2;
  }
  return values;
}

std::vector<Vec> span_union(const std::vector<Vec>& vectors, double tol) {
  std::vector<Vec> basis;
  if (vectors.empty()) {
    return basis;
  }
  double largest = 0.0;
  for (const Vec& v : vectors) {
    if (v.size() != vectors.front().size()) {
      throw InputError("span_union: vectors of different dimension");
    }
    largest = std::max(largest, v.norm());
  }
  const double threshold = tol * largest;
  if (largest == 0.0) {
    return basis;
  }
  for (const Vec& v : vectors) {
    Vec r = v;
    // Two Gram-Schmidt passes keep the basis orthonormal to working precision.
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vec& q : basis) {
        r -= q.dot(r) * q;
      }
    }
    const double norm = r.norm();
    if (norm > threshold && static_cast<Eigen::Index>(basis.size()) < v.size()) {
      basis.push_back(r / norm);
    }
  }
  return basis;
}

double projection_residual(const std::vector<Vec>& basis, const Vec& v) {
  Vec r = v;
  for (int pass = 0; pass < 2; ++pass) {
    for (const Vec& q : basis) {
      r -= q.dot(r) * q;
    }
  }
  return r.norm();
}

Mat columns(const std::vector<Vec>& vectors, Eigen::Index rows) {
  Mat out(rows, static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t j = 0; j < vectors.size(); ++j) {
    out.col(static_cast<Eigen::Index>(j)) = vectors[j];
  }
  return out;
}

Mat real_part_checked(const CMat& a, double tol) {
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if (a.imag().cwiseAbs().maxCoeff() > tol * scale) {
    throw InputError("expected a real matrix, found non-negligible imaginary part");
  }
  return a.real();
}

template Mat bracket<double>(const Mat&, const Mat&);
template CMat bracket<Complex>(const CMat&, const CMat&);
template Mat expm<double>(const Mat&, double);
template CMat expm<Complex>(const CMat&, double);
template Mat logm_unipotent<double>(const Mat&);
template CMat logm_unipotent<Complex>(const CMat&);

}  // namespace liesys
