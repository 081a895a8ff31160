// Copyright the nirb authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NIRB_EIM_HPP
#define NIRB_EIM_HPP

#include <cstddef>
#include <optional>
#include <vector>
#include "nirb/errors.hpp"
#include "nirb/linalg.hpp"
#include "nirb/parameters.hpp"

namespace nirb
{

// Tabulated values G(i, j) = g(mu_i, x_j) of a bivariate function over finite trial sets.
// Rows are parameter samples, columns are locations. Immutable after construction.
class SampleGrid
{
public:
  SampleGrid(Eigen::MatrixXcd values, std::vector<ParameterPoint> mu_points = {},
             std::vector<double> x_points = {});

  std::size_t NumMu() const { return values_.rows(); }
  std::size_t NumX() const { return values_.cols(); }
  const Eigen::MatrixXcd &Values() const { return values_; }
  const std::vector<ParameterPoint> &MuPoints() const { return mu_points_; }
  const std::vector<double> &XPoints() const { return x_points_; }
  double MaxAbs() const { return max_abs_; }

private:
  Eigen::MatrixXcd values_;
  std::vector<ParameterPoint> mu_points_;
  std::vector<double> x_points_;
  double max_abs_ = 0.0;
};

enum class Slice
{
  S1,  // parameter selected first, basis functions over locations
  S2   // location selected first, basis functions over parameters
};

// Norm applied along the non-argmax axis when ranking candidates in the outer greedy step.
enum class NormChoice
{
  MaxAbs,
  EuclideanRms
};

//
// Offline data of one empirical interpolation run.
//
// Everything is stored in the orientation of the slice: the "outer" variable is the one
// ranked by a norm first (mu for S1, x for S2), the "inner" variable carries the basis
// functions q_m. With that convention both slices share one set of formulas:
//   B(k, i)  = q_i(inner_k),                         unit lower triangular,
//   sum_m Gamma(l, m) q_m(.) = g(outer_l, .),        Gamma lower triangular,
//   Delta    = (Gamma B^T)^{-1},                      plain transposes,
//   (I g)(outer, inner) = sum_{l,r} Delta(l, r) g(outer, inner_l) g(outer_r, inner).
//
struct EimModel
{
  Slice slice = Slice::S1;
  std::size_t rank = 0;
  std::vector<std::size_t> outer_indices;  // selected outer samples, in selection order
  std::vector<std::size_t> inner_indices;  // selected inner samples (magic points)
  Eigen::MatrixXcd q;          // rank x inner-size, row m is q_m
  Eigen::MatrixXcd snapshots;  // rank x inner-size, row r is g(outer_r, .)
  Eigen::MatrixXcd B;
  Eigen::MatrixXcd Gamma;
  Eigen::MatrixXcd Delta;
  std::vector<double> residual_history;  // |selected residual| at each rank
  double final_residual = 0.0;           // full-grid max |g - I g| after the last rank

  // Selected parameter and location indices, whatever the slice.
  const std::vector<std::size_t> &MuIndices() const
  {
    return slice == Slice::S1 ? outer_indices : inner_indices;
  }
  const std::vector<std::size_t> &XIndices() const
  {
    return slice == Slice::S1 ? inner_indices : outer_indices;
  }
  std::size_t InnerSize() const { return q.cols(); }

  // Solves B lambda = samples, with samples taken at the inner magic points
  // (S1: g(mu, x_l); S2: g(mu_l, x)). O(rank^2).
  ComplexVector ApplyLambda(const ComplexVector &samples) const;

  // Interpolant over the whole inner axis from inner magic-point samples, through the
  // basis functions: q^T B^{-1} samples.
  ComplexVector Interpolate(const ComplexVector &samples) const;

  // Same interpolant through the stored snapshot rows: snapshots^T Delta^T samples.
  ComplexVector InterpolateSnapshotForm(const ComplexVector &samples) const;

  // Remark-form interpolant: sum_m lambda_hat_m(inner) samples_m, with
  // B^T lambda_hat(inner) = q(inner).
  ComplexVector InterpolateDualForm(const ComplexVector &samples) const;

  // Weights over the selected outer samples of the snapshot form, Delta^T samples, computed
  // by triangular solves: Gamma^{-T} B^{-1} samples.
  ComplexVector OuterWeights(const ComplexVector &inner_samples) const;

  // Weights over the selected inner samples for a fixed inner point, Delta t with
  // t_r = g(outer_r, inner), computed as B^{-T} Gamma^{-1} t.
  ComplexVector InnerWeights(const ComplexVector &outer_samples) const;

  // Values at the selected locations for a fixed parameter mapped to weights over the
  // selected parameters: for S1 this is OuterWeights, for S2 InnerWeights. The result is
  // ordered like MuIndices().
  ComplexVector MuWeights(const ComplexVector &samples_at_selected_x) const;
};

// Thrown when the selected residual falls below 1e-13 max|G| before the requested rank.
// Carries the truncated model.
class RankDeficient : public Error
{
public:
  RankDeficient(const std::string &what, std::size_t achieved_rank,
                std::optional<EimModel> truncated, std::string stage = "eim")
    : Error(what, std::move(stage)), achieved_rank_(achieved_rank),
      truncated_(std::move(truncated))
  {
  }
  std::size_t AchievedRank() const { return achieved_rank_; }
  const std::optional<EimModel> &Truncated() const { return truncated_; }

private:
  std::size_t achieved_rank_;
  std::optional<EimModel> truncated_;
};

// Relative pivot threshold of the greedy.
inline constexpr double kEimRankTolerance = 1e-13;

// Offline greedy with the parameter scanned first (norm along locations).
EimModel BuildEimS1(const SampleGrid &grid, std::size_t d,
                    NormChoice mu_norm = NormChoice::MaxAbs);

// Offline greedy with the location scanned first (norm along parameters).
EimModel BuildEimS2(const SampleGrid &grid, std::size_t d,
                    NormChoice x_norm = NormChoice::MaxAbs);

EimModel BuildEim(const SampleGrid &grid, std::size_t d, Slice slice,
                  NormChoice norm = NormChoice::MaxAbs);

// Rebuilds Gamma from the grid with the rank-by-rank recursion (diagonal = selected
// residual, sub-diagonal row from the kappa system B kappa = g(outer_{k+1}, inner_l)) and
// returns max |Gamma_rebuilt - Gamma_stored|.
double GammaRecursionCheck(const EimModel &model, const SampleGrid &grid);

// Samples the grid at the model's inner magic points for a given outer index.
ComplexVector InnerSamples(const EimModel &model, const SampleGrid &grid, std::size_t outer);

// Full-grid interpolant in the grid's (mu, x) layout.
Eigen::MatrixXcd InterpolateGrid(const EimModel &model, const SampleGrid &grid);

}  // namespace nirb

#endif  // NIRB_EIM_HPP
