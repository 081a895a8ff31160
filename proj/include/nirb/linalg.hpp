// Copyright the nirb authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NIRB_LINALG_HPP
#define NIRB_LINALG_HPP

#include <complex>
#include <Eigen/Dense>

namespace nirb
{

using Complex = std::complex<double>;

// Assembled full-order operators are dense, row-major, complex double precision.
using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexVector = Eigen::VectorXcd;

// Column-major storage for bases and reduced quantities, where columns are the natural unit.
using BasisMatrix = Eigen::MatrixXcd;

// Throws NonFiniteValue if any entry is NaN or infinite. The label ends up in the message.
void RequireFinite(const ComplexMatrix &A, const char *label);
void RequireFinite(const ComplexVector &v, const char *label);

// Largest entry magnitude; zero for empty objects.
double MaxAbs(const Eigen::Ref<const Eigen::MatrixXcd> &A);

// Dense LU with partial pivoting. Throws SingularMatrix when a pivot vanishes relative to
// the matrix scale, or when the computed solution is not finite.
ComplexVector LuSolve(const ComplexMatrix &A, const ComplexVector &b);

// In-place LU solve of a small n x n system stored as split real and imaginary column-major
// arrays. Same pivot criterion as LuSolve; the solution overwrites (br, bi).
void SmallLuSolveInPlace(int n, double *ar, double *ai, double *br, double *bi);

// Smallest singular value from a dense SVD.
double SmallestSingularValue(const ComplexMatrix &A);

// Forward substitution with a unit lower-triangular matrix; only the strictly lower part of
// L is read.
ComplexVector SolveUnitLower(const Eigen::MatrixXcd &L, const ComplexVector &b);

// Modified Gram-Schmidt of v against the orthonormal columns of Q, applied twice. Returns
// the norm of v after orthogonalization (before normalization); v is overwritten.
double OrthogonalizeTwice(const BasisMatrix &Q, ComplexVector &v);

// Formats a double with 17 significant digits, the persistence format for all numeric
// arrays. ParseDecimal is its exact inverse.
std::string FormatDecimal(double x);
double ParseDecimal(const std::string &s);

}  // namespace nirb

#endif  // NIRB_LINALG_HPP
