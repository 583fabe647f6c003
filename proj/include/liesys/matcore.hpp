#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace liesys {

using Complex = std::complex<double>;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Real dense matrix (derivations, coordinate operators, real realizations).
using Mat = Matrix<double>;
/// Complex dense matrix (ambient realizations; su(2) needs complex entries).
using CMat = Matrix<Complex>;
/// Real coordinate vector in a fixed basis of a Lie algebra.
using Vec = Eigen::VectorXd;

/// Malformed input: bad dimensions, schema violations, constraint violations.
/// The CLI maps this to exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure: iteration caps, oracle guards, internal consistency
/// checks that should not fail in exact arithmetic. CLI exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Projection residuals and singular values below this factor times the
/// largest vector norm in play are treated as zero.
inline constexpr double kRankTolerance = 1e-9;

/// Eigenvalues with |Re| below this (times the operator scale) are
/// classified as having zero real part.
inline constexpr double kZeroRealPartBand = 1e-9;

/// Returns AB - BA.
template <typename Scalar>
Matrix<Scalar> bracket(const Matrix<Scalar>& a, const Matrix<Scalar>& b);

/// e^{tA} by scaling and squaring around a degree-13 Pade approximant.
/// The scaled argument always satisfies ||A 2^-s||_1 <= 0.5.
template <typename Scalar>
Matrix<Scalar> expm(const Matrix<Scalar>& a, double t = 1.0);

/// Logarithm of a unipotent matrix M (M - I nilpotent) by the terminating
/// Mercator series. Throws InputError if M - I is not nilpotent to 1e-9.
template <typename Scalar>
Matrix<Scalar> logm_unipotent(const Matrix<Scalar>& m);

/// All eigenvalues of a real square matrix with multiplicity, from the real
/// Schur form (Hessenberg reduction followed by shifted QR sweeps, capped at
/// 100 n iterations). Complex pairs come out exactly conjugate.
std::vector<Complex> eigenvalues(const Mat& a);

/// Orthonormal basis of span(vectors). A candidate whose residual after
/// projection onto the basis built so far is below tol times the largest
/// input norm is dropped.
std::vector<Vec> span_union(const std::vector<Vec>& vectors,
                            double tol = kRankTolerance);

/// Norm of the component of v orthogonal to span(basis); basis orthonormal.
double projection_residual(const std::vector<Vec>& basis, const Vec& v);

/// Stacks vectors as columns.
Mat columns(const std::vector<Vec>& vectors, Eigen::Index rows);

template <typename Scalar>
bool all_finite(const Matrix<Scalar>& a) {
  return a.allFinite();
}

inline CMat to_complex(const Mat& a) { return a.cast<Complex>(); }

/// Real part, after checking that the imaginary part is negligible.
Mat real_part_checked(const CMat& a, double tol = 1e-12);

}  // namespace liesys
