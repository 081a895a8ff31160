// Copyright the nirb authors.
// SPDX-License-Identifier: Apache-2.0

#include "nirb/linalg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>
#include "nirb/errors.hpp"

namespace nirb
{

namespace
{

template <typename Derived>
bool AllFinite(const Eigen::MatrixBase<Derived> &A)
{
  for (Eigen::Index j = 0; j < A.cols(); j++)
  {
    for (Eigen::Index i = 0; i < A.rows(); i++)
    {
      const Complex z = A(i, j);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

void RequireFinite(const ComplexMatrix &A, const char *label)
{
  if (!AllFinite(A))
  {
    throw NonFiniteValue(std::string("non-finite entry in ") + label);
  }
}

void RequireFinite(const ComplexVector &v, const char *label)
{
  if (!AllFinite(v))
  {
    throw NonFiniteValue(std::string("non-finite entry in ") + label);
  }
}

double MaxAbs(const Eigen::Ref<const Eigen::MatrixXcd> &A)
{
  return A.size() == 0 ? 0.0 : A.cwiseAbs().maxCoeff();
}

ComplexVector LuSolve(const ComplexMatrix &A, const ComplexVector &b)
{
  if (A.rows() != A.cols() || A.rows() != b.size())
  {
    throw LengthMismatch("LuSolve: dimension mismatch");
  }
  const Eigen::PartialPivLU<ComplexMatrix> lu(A);
  const double scale = A.cwiseAbs().maxCoeff();
  const double tol = std::numeric_limits<double>::epsilon() * static_cast<double>(A.rows()) * scale;
  const auto diag = lu.matrixLU().diagonal();
  for (Eigen::Index i = 0; i < diag.size(); i++)
  {
    if (!(std::abs(diag(i)) > tol))
    {
      throw SingularMatrix("LU pivot breakdown at row " + std::to_string(i));
    }
  }
  ComplexVector x = lu.solve(b);
  if (!AllFinite(x))
  {
    throw SingularMatrix("LU solution is not finite");
  }
  return x;
}

void SmallLuSolveInPlace(int n, double *ar, double *ai, double *br, double *bi)
{
  double scale2 = 0.0;
  for (int i = 0; i < n * n; i++)
  {
    scale2 = std::max(scale2, ar[i] * ar[i] + ai[i] * ai[i]);
  }
  const double tol = std::numeric_limits<double>::epsilon() * n * std::sqrt(scale2);
  for (int k = 0; k < n; k++)
  {
    int piv = k;
    double best = -1.0;
    for (int i = k; i < n; i++)
    {
      const double v = ar[i + k * n] * ar[i + k * n] + ai[i + k * n] * ai[i + k * n];
      if (v > best)
      {
        best = v;
        piv = i;
      }
    }
    if (!(std::sqrt(best) > tol))
    {
      throw SingularMatrix("LU pivot breakdown at row " + std::to_string(k));
    }
    if (piv != k)
    {
      for (int j = 0; j < n; j++)
      {
        std::swap(ar[k + j * n], ar[piv + j * n]);
        std::swap(ai[k + j * n], ai[piv + j * n]);
      }
      std::swap(br[k], br[piv]);
      std::swap(bi[k], bi[piv]);
    }
    const double dr = ar[k + k * n] / best, di = -ai[k + k * n] / best;
    double *lr = ar + k * n, *li = ai + k * n;
    for (int i = k + 1; i < n; i++)
    {
      const double xr = lr[i], xi = li[i];
      lr[i] = xr * dr - xi * di;
      li[i] = xr * di + xi * dr;
    }
    for (int j = k + 1; j < n; j++)
    {
      const double fr = ar[k + j * n], fi = ai[k + j * n];
      double *cr = ar + j * n, *ci = ai + j * n;
      for (int i = k + 1; i < n; i++)
      {
        cr[i] -= lr[i] * fr - li[i] * fi;
        ci[i] -= lr[i] * fi + li[i] * fr;
      }
    }
    const double fr = br[k], fi = bi[k];
    for (int i = k + 1; i < n; i++)
    {
      br[i] -= lr[i] * fr - li[i] * fi;
      bi[i] -= lr[i] * fi + li[i] * fr;
    }
  }
  for (int k = n - 1; k >= 0; k--)
  {
    const double pr = ar[k + k * n], pi = ai[k + k * n];
    const double m = pr * pr + pi * pi;
    const double xr = (br[k] * pr + bi[k] * pi) / m, xi = (bi[k] * pr - br[k] * pi) / m;
    br[k] = xr;
    bi[k] = xi;
    for (int i = 0; i < k; i++)
    {
      br[i] -= ar[i + k * n] * xr - ai[i + k * n] * xi;
      bi[i] -= ar[i + k * n] * xi + ai[i + k * n] * xr;
    }
  }
  for (int i = 0; i < n; i++)
  {
    if (!std::isfinite(br[i]) || !std::isfinite(bi[i]))
    {
      throw SingularMatrix("LU solution is not finite");
    }
  }
}

double SmallestSingularValue(const ComplexMatrix &A)
{
  if (A.size() == 0)
  {
    return 0.0;
  }
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(A);
  const auto &s = svd.singularValues();
  return s(s.size() - 1);
}

ComplexVector SolveUnitLower(const Eigen::MatrixXcd &L, const ComplexVector &b)
{
  return L.triangularView<Eigen::UnitLower>().solve(b);
}

double OrthogonalizeTwice(const BasisMatrix &Q, ComplexVector &v)
{
  for (int pass = 0; pass < 2; pass++)
  {
    for (Eigen::Index j = 0; j < Q.cols(); j++)
    {
      const Complex c = Q.col(j).dot(v);
      v.noalias() -= c * Q.col(j);
    }
  }
  return v.norm();
}

std::string FormatDecimal(double x)
{
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

double ParseDecimal(const std::string &s)
{
  double x = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
  {
    if (s == "inf" || s == "-inf" || s == "nan" || s == "-nan")
    {
      throw NonFiniteValue("non-finite decimal '" + s + "'");
    }
    throw ConfigError("malformed decimal '" + s + "'");
  }
  return x;
}

}  // namespace nirb
