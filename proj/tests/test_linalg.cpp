// Copyright the nirb authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <limits>
#include <random>
#include <catch_amalgamated.hpp>
#include "nirb/errors.hpp"
#include "nirb/linalg.hpp"
#include "test_support.hpp"

using namespace nirb;

namespace
{

// Textbook Gaussian elimination with partial pivoting on a copy, no library calls.
ComplexVector GaussOracle(ComplexMatrix A, ComplexVector b)
{
  const auto n = A.rows();
  for (Eigen::Index k = 0; k < n; k++)
  {
    Eigen::Index p = k;
    for (Eigen::Index i = k + 1; i < n; i++)
    {
      if (std::abs(A(i, k)) > std::abs(A(p, k)))
      {
        p = i;
      }
    }
    A.row(k).swap(A.row(p));
    std::swap(b(k), b(p));
    for (Eigen::Index i = k + 1; i < n; i++)
    {
      const Complex f = A(i, k) / A(k, k);
      for (Eigen::Index j = k; j < n; j++)
      {
        A(i, j) -= f * A(k, j);
      }
      b(i) -= f * b(k);
    }
  }
  ComplexVector x(n);
  for (Eigen::Index i = n - 1; i >= 0; i--)
  {
    Complex s = b(i);
    for (Eigen::Index j = i + 1; j < n; j++)
    {
      s -= A(i, j) * x(j);
    }
    x(i) = s / A(i, i);
  }
  return x;
}

}  // namespace

TEST_CASE("LU solve agrees with Gaussian elimination", "[linalg]")
{
  std::mt19937_64 rng(11);
  for (int n : {1, 2, 7, 30})
  {
    const ComplexMatrix A = test::RandomGrid(n, n, rng);
    const ComplexVector b = test::RandomGrid(n, 1, rng);
    const ComplexVector x = LuSolve(A, b);
    const ComplexVector y = GaussOracle(A, b);
    CHECK((x - y).norm() <= 1e-11 * y.norm());
  }
}

TEST_CASE("LU solve of the identity returns the right-hand side", "[linalg]")
{
  const ComplexMatrix I = ComplexMatrix::Identity(5, 5);
  ComplexVector e1 = ComplexVector::Zero(5);
  e1(0) = 1.0;
  CHECK(LuSolve(I, e1) == e1);
}

TEST_CASE("LU solve rejects singular and mismatched systems", "[linalg]")
{
  ComplexMatrix A(2, 2);
  A << 1.0, 2.0, 2.0, 4.0;
  CHECK_THROWS_AS(LuSolve(A, ComplexVector::Ones(2)), SingularMatrix);
  CHECK_THROWS_AS(LuSolve(ComplexMatrix::Identity(3, 3), ComplexVector::Ones(2)),
                  LengthMismatch);
}

TEST_CASE("Split small LU matches the dense LU", "[linalg]")
{
  std::mt19937_64 rng(5);
  for (int n : {1, 3, 20})
  {
    const Eigen::MatrixXcd A = test::RandomGrid(n, n, rng);
    const ComplexVector b = test::RandomGrid(n, 1, rng);
    std::vector<double> ar(n * n), ai(n * n), br(n), bi(n);
    for (int i = 0; i < n * n; i++)
    {
      ar[i] = A.data()[i].real();
      ai[i] = A.data()[i].imag();
    }
    for (int i = 0; i < n; i++)
    {
      br[i] = b(i).real();
      bi[i] = b(i).imag();
    }
    SmallLuSolveInPlace(n, ar.data(), ai.data(), br.data(), bi.data());
    const ComplexVector y = GaussOracle(A, b);
    for (int i = 0; i < n; i++)
    {
      CHECK(std::abs(Complex(br[i], bi[i]) - y(i)) <= 1e-11 * y.norm());
    }
  }
  std::vector<double> zr(4, 0.0), zi(4, 0.0), br(2, 1.0), bi(2, 0.0);
  CHECK_THROWS_AS(SmallLuSolveInPlace(2, zr.data(), zi.data(), br.data(), bi.data()),
                  SingularMatrix);
}

TEST_CASE("Smallest singular value", "[linalg]")
{
  CHECK(SmallestSingularValue(ComplexMatrix::Identity(4, 4)) == Catch::Approx(1.0).epsilon(1e-15));
  ComplexMatrix D = ComplexMatrix::Zero(2, 2);
  D(0, 0) = 3.0;
  D(1, 1) = 0.5;
  CHECK(SmallestSingularValue(D) == Catch::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("Orthogonalization against an orthonormal basis", "[linalg]")
{
  std::mt19937_64 rng(3);
  const Eigen::MatrixXcd X = test::RandomGrid(40, 5, rng);
  const BasisMatrix Q = Eigen::HouseholderQR<Eigen::MatrixXcd>(X).householderQ() *
                        Eigen::MatrixXcd::Identity(40, 5);
  ComplexVector v = test::RandomGrid(40, 1, rng);
  const ComplexVector v0 = v;
  const double norm = OrthogonalizeTwice(Q, v);
  CHECK(norm == Catch::Approx(v.norm()).epsilon(1e-14));
  CHECK((Q.adjoint() * v).norm() <= 1e-14 * v0.norm());
  // The removed part lies in span(Q).
  const ComplexVector removed = v0 - v;
  CHECK((removed - Q * (Q.adjoint() * removed)).norm() <= 1e-13 * v0.norm());
}

TEST_CASE("Unit lower triangular solve", "[linalg]")
{
  Eigen::MatrixXcd L(2, 2);
  L << 1.0, 99.0, 0.2, 1.0;  // the upper entry is never read
  ComplexVector b(2);
  b << 3.0, 1.0;
  const ComplexVector x = SolveUnitLower(L, b);
  CHECK(std::abs(x(0) - 3.0) <= 1e-15);
  CHECK(std::abs(x(1) - 0.4) <= 1e-15);
}

TEST_CASE("Decimal formatting round-trips doubles exactly", "[linalg][io]")
{
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 1000; i++)
  {
    const double x = u(rng) * std::pow(10.0, static_cast<int>(rng() % 600) - 300);
    CHECK(ParseDecimal(FormatDecimal(x)) == x);
  }
  for (double x : {0.0, -0.0, 1.0, 0.1, std::numeric_limits<double>::denorm_min(),
                   std::numeric_limits<double>::max()})
  {
    CHECK(ParseDecimal(FormatDecimal(x)) == x);
  }
}

TEST_CASE("Finite checks", "[linalg]")
{
  ComplexVector v = ComplexVector::Ones(3);
  CHECK_NOTHROW(RequireFinite(v, "v"));
  v(1) = Complex(std::nan(""), 0.0);
  CHECK_THROWS_AS(RequireFinite(v, "v"), NonFiniteValue);
}
