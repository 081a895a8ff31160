// Copyright the nirb authors.
// SPDX-License-Identifier: Apache-2.0

#include "nirb/eim.hpp"

#include <cmath>
#include <string>

namespace nirb
{

SampleGrid::SampleGrid(Eigen::MatrixXcd values, std::vector<ParameterPoint> mu_points,
                       std::vector<double> x_points)
  : values_(std::move(values)), mu_points_(std::move(mu_points)), x_points_(std::move(x_points))
{
  if (values_.rows() < 1 || values_.cols() < 1)
  {
    throw LengthMismatch("sample grid must have at least one row and one column");
  }
  if (!mu_points_.empty() && mu_points_.size() != static_cast<std::size_t>(values_.rows()))
  {
    throw LengthMismatch("sample grid: parameter list does not match the row count");
  }
  if (!x_points_.empty() && x_points_.size() != static_cast<std::size_t>(values_.cols()))
  {
    throw LengthMismatch("sample grid: location list does not match the column count");
  }
  if (!values_.allFinite())
  {
    throw NonFiniteValue("sample grid holds non-finite values");
  }
  max_abs_ = nirb::MaxAbs(values_);
}

namespace
{

// Grid in slice orientation: rows are outer samples, columns inner samples.
Eigen::MatrixXcd Oriented(const SampleGrid &grid, Slice slice)
{
  return slice == Slice::S1 ? Eigen::MatrixXcd(grid.Values())
                            : Eigen::MatrixXcd(grid.Values().transpose());
}

double RowScore(const Eigen::MatrixXcd &R, Eigen::Index i, NormChoice norm)
{
  if (norm == NormChoice::MaxAbs)
  {
    return R.row(i).cwiseAbs().maxCoeff();
  }
  return std::sqrt(R.row(i).squaredNorm() / static_cast<double>(R.cols()));
}

// Lowest index wins on ties.
Eigen::Index ArgmaxRow(const Eigen::MatrixXcd &R, NormChoice norm)
{
  Eigen::Index best = 0;
  double best_score = -1.0;
  for (Eigen::Index i = 0; i < R.rows(); i++)
  {
    const double s = RowScore(R, i, norm);
    if (s > best_score)
    {
      best_score = s;
      best = i;
    }
  }
  return best;
}

Eigen::Index ArgmaxCol(const Eigen::MatrixXcd &R, Eigen::Index row)
{
  Eigen::Index best = 0;
  double best_abs = -1.0;
  for (Eigen::Index j = 0; j < R.cols(); j++)
  {
    const double a = std::abs(R(row, j));
    if (a > best_abs)
    {
      best_abs = a;
      best = j;
    }
  }
  return best;
}

// M - I_k M with I_k built from the first k basis rows, followed by one correction pass on
// the residual itself.
Eigen::MatrixXcd Residual(const Eigen::MatrixXcd &M, const Eigen::MatrixXcd &q,
                          const Eigen::MatrixXcd &B, const std::vector<std::size_t> &inner,
                          std::size_t k)
{
  if (k == 0)
  {
    return M;
  }
  const auto Bk = B.topLeftCorner(k, k).triangularView<Eigen::UnitLower>();
  const auto Qk = q.topRows(k);
  Eigen::MatrixXcd R = M;
  for (int pass = 0; pass < 2; pass++)
  {
    Eigen::MatrixXcd S(k, M.rows());
    for (std::size_t l = 0; l < k; l++)
    {
      S.row(l) = R.col(inner[l]).transpose();
    }
    const Eigen::MatrixXcd lambda = Bk.solve(S);
    R.noalias() -= lambda.transpose() * Qk;
  }
  return R;
}

void FinalizeModel(EimModel &m, const Eigen::MatrixXcd &M)
{
  const std::size_t k = m.rank;
  m.q.conservativeResize(k, Eigen::NoChange);
  m.B.conservativeResize(k, k);
  m.Gamma.conservativeResize(k, k);
  m.snapshots.resize(k, M.cols());
  for (std::size_t r = 0; r < k; r++)
  {
    m.snapshots.row(r) = M.row(m.outer_indices[r]);
  }
  // Delta = (Gamma B^T)^{-1} = B^{-T} Gamma^{-1}
  const Eigen::MatrixXcd Ginv =
      m.Gamma.triangularView<Eigen::Lower>().solve(Eigen::MatrixXcd::Identity(k, k));
  m.Delta = m.B.transpose().triangularView<Eigen::UnitUpper>().solve(Ginv);
  const Eigen::MatrixXcd R = Residual(M, m.q, m.B, m.inner_indices, k);
  m.final_residual = nirb::MaxAbs(R);
}

EimModel BuildOriented(const SampleGrid &grid, std::size_t d, Slice slice, NormChoice norm)
{
  if (d < 1)
  {
    throw Error("interpolation rank must be at least 1", "eim");
  }
  const Eigen::MatrixXcd M = Oriented(grid, slice);
  const double atol = kEimRankTolerance * grid.MaxAbs();
  const std::size_t max_rank = std::min<std::size_t>(M.rows(), M.cols());

  EimModel m;
  m.slice = slice;
  m.q = Eigen::MatrixXcd::Zero(d, M.cols());
  m.B = Eigen::MatrixXcd::Zero(d, d);
  m.Gamma = Eigen::MatrixXcd::Zero(d, d);

  Eigen::MatrixXcd R = M;
  for (std::size_t k = 0; k < d; k++)
  {
    const Eigen::Index io = ArgmaxRow(R, norm);
    const Eigen::Index ii = ArgmaxCol(R, io);
    const Complex pivot = R(io, ii);
    if (k >= max_rank || !(std::abs(pivot) > atol))
    {
      m.rank = k;
      FinalizeModel(m, M);
      throw RankDeficient("interpolation exhausted at rank " + std::to_string(k) +
                              " of requested " + std::to_string(d),
                          k, m);
    }
    m.outer_indices.push_back(static_cast<std::size_t>(io));
    m.inner_indices.push_back(static_cast<std::size_t>(ii));
    m.residual_history.push_back(std::abs(pivot));

    // Interpolation coefficients of the new outer row at the previous magic points.
    if (k > 0)
    {
      ComplexVector s(k);
      for (std::size_t l = 0; l < k; l++)
      {
        s(l) = M(io, m.inner_indices[l]);
      }
      const ComplexVector kappa =
          m.B.topLeftCorner(k, k).triangularView<Eigen::UnitLower>().solve(s);
      m.Gamma.block(k, 0, 1, k) = kappa.transpose();
    }
    m.Gamma(k, k) = pivot;
    m.q.row(k) = R.row(io) / pivot;
    for (std::size_t l = 0; l < k; l++)
    {
      m.B(k, l) = m.q(l, ii);
    }
    m.B(k, k) = 1.0;
    m.rank = k + 1;
    R = Residual(M, m.q, m.B, m.inner_indices, k + 1);
  }
  FinalizeModel(m, M);
  return m;
}

}  // namespace

ComplexVector EimModel::ApplyLambda(const ComplexVector &samples) const
{
  if (static_cast<std::size_t>(samples.size()) != rank)
  {
    throw LengthMismatch("expected " + std::to_string(rank) + " magic-point samples");
  }
  return B.triangularView<Eigen::UnitLower>().solve(samples);
}

ComplexVector EimModel::Interpolate(const ComplexVector &samples) const
{
  return q.transpose() * ApplyLambda(samples);
}

ComplexVector EimModel::InterpolateSnapshotForm(const ComplexVector &samples) const
{
  if (static_cast<std::size_t>(samples.size()) != rank)
  {
    throw LengthMismatch("expected " + std::to_string(rank) + " magic-point samples");
  }
  return snapshots.transpose() * (Delta.transpose() * samples);
}

ComplexVector EimModel::InterpolateDualForm(const ComplexVector &samples) const
{
  if (static_cast<std::size_t>(samples.size()) != rank)
  {
    throw LengthMismatch("expected " + std::to_string(rank) + " magic-point samples");
  }
  const Eigen::MatrixXcd lambda_hat =
      B.transpose().triangularView<Eigen::UnitUpper>().solve(q);
  return lambda_hat.transpose() * samples;
}

ComplexVector EimModel::OuterWeights(const ComplexVector &inner_samples) const
{
  const ComplexVector lambda = ApplyLambda(inner_samples);
  return Gamma.transpose().triangularView<Eigen::Upper>().solve(lambda);
}

ComplexVector EimModel::InnerWeights(const ComplexVector &outer_samples) const
{
  if (static_cast<std::size_t>(outer_samples.size()) != rank)
  {
    throw LengthMismatch("expected " + std::to_string(rank) + " snapshot samples");
  }
  const ComplexVector kappa = Gamma.triangularView<Eigen::Lower>().solve(outer_samples);
  return B.transpose().triangularView<Eigen::UnitUpper>().solve(kappa);
}

ComplexVector EimModel::MuWeights(const ComplexVector &samples_at_selected_x) const
{
  return slice == Slice::S1 ? OuterWeights(samples_at_selected_x)
                            : InnerWeights(samples_at_selected_x);
}

EimModel BuildEimS1(const SampleGrid &grid, std::size_t d, NormChoice mu_norm)
{
  return BuildOriented(grid, d, Slice::S1, mu_norm);
}

EimModel BuildEimS2(const SampleGrid &grid, std::size_t d, NormChoice x_norm)
{
  return BuildOriented(grid, d, Slice::S2, x_norm);
}

EimModel BuildEim(const SampleGrid &grid, std::size_t d, Slice slice, NormChoice norm)
{
  return BuildOriented(grid, d, slice, norm);
}

double GammaRecursionCheck(const EimModel &model, const SampleGrid &grid)
{
  const Eigen::MatrixXcd M = Oriented(grid, model.slice);
  const std::size_t d = model.rank;
  Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(d, d);
  for (std::size_t k = 0; k < d; k++)
  {
    const std::size_t o = model.outer_indices[k];
    ComplexVector kappa;
    if (k > 0)
    {
      ComplexVector s(k);
      for (std::size_t l = 0; l < k; l++)
      {
        s(l) = M(o, model.inner_indices[l]);
      }
      kappa = model.B.topLeftCorner(k, k).triangularView<Eigen::UnitLower>().solve(s);
      G.block(k, 0, 1, k) = kappa.transpose();
    }
    Complex diag = M(o, model.inner_indices[k]);
    for (std::size_t m = 0; m < k; m++)
    {
      diag -= kappa(m) * model.q(m, model.inner_indices[k]);
    }
    G(k, k) = diag;
  }
  return d == 0 ? 0.0 : nirb::MaxAbs(G - model.Gamma);
}

ComplexVector InnerSamples(const EimModel &model, const SampleGrid &grid, std::size_t outer)
{
  ComplexVector s(model.rank);
  for (std::size_t l = 0; l < model.rank; l++)
  {
    s(l) = model.slice == Slice::S1 ? grid.Values()(outer, model.inner_indices[l])
                                    : grid.Values()(model.inner_indices[l], outer);
  }
  return s;
}

Eigen::MatrixXcd InterpolateGrid(const EimModel &model, const SampleGrid &grid)
{
  const Eigen::MatrixXcd M = Oriented(grid, model.slice);
  Eigen::MatrixXcd S(model.rank, M.rows());
  for (std::size_t l = 0; l < model.rank; l++)
  {
    S.row(l) = M.col(model.inner_indices[l]).transpose();
  }
  const Eigen::MatrixXcd lambda = model.B.triangularView<Eigen::UnitLower>().solve(S);
  const Eigen::MatrixXcd I = lambda.transpose() * model.q;
  return model.slice == Slice::S1 ? I : Eigen::MatrixXcd(I.transpose());
}

}  // namespace nirb
