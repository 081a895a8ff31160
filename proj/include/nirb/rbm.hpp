// Copyright the nirb authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NIRB_RBM_HPP
#define NIRB_RBM_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>
#include "nirb/nonintrusive.hpp"
#include "nirb/problems.hpp"

namespace nirb
{

// Galerkin test space: U^H (default) or the literal U^T.
enum class Projection
{
  Hermitian,
  Transpose
};

// How the online residual norm is evaluated.
//  - Orthogonalized: rho = |R c(mu)| with R the triangular factor of the stacked residual
//    vectors [A_r u_l, C_r'], round-off at the eps |C| level.
//  - GramExpanded: rho^2 from the Gram blocks G, H, S, clamped at 0; round-off at the
//    eps |C|^2 level.
enum class ResidualMode
{
  Orthogonalized,
  GramExpanded
};

enum class FirstParameter
{
  DomainCenter,
  MaxRhsNorm
};

struct GreedyConfig
{
  std::size_t max_basis = 20;
  double tolerance = 1e-8;
  FirstParameter first = FirstParameter::DomainCenter;
  Projection projection = Projection::Hermitian;
  ResidualMode residual = ResidualMode::Orthogonalized;
  // Optional trial set override; the decomposition trial grid otherwise.
  std::vector<ParameterPoint> trial;
  // Keep the n x nhat basis in the model (debugging and validation only).
  bool keep_basis = true;
};

// Online evaluation layout derived from the reduced blocks: the reduced operators stacked
// as columns and the residual factor repacked in row blocks of split real/imaginary chunks
// for a single streaming pass. Rebuilt by PrepareOnline; never persisted.
struct OnlineLayout
{
  Eigen::MatrixXcd A_stack;  // nhat^2 x dz, column r = vec(A_hat[r])
  Eigen::MatrixXcd C_stack;  // nhat x dz_rhs
  std::vector<double> residual_packed;
  std::vector<std::size_t> residual_offsets;
  std::size_t residual_rows = 0;
  std::size_t residual_cols = 0;
};

//
// Reduced-basis model. Every online quantity is n-independent: reduced operators per
// matrix snapshot, reduced right-hand sides per rhs snapshot, residual data, inf-sup lower
// bound and the reduced output functional.
//
struct ReducedBasisModel
{
  std::size_t full_size = 0;
  std::vector<ParameterPoint> snapshot_mu;
  std::optional<BasisMatrix> basis;

  NonintrusiveDecomposition matrix_decomp;
  NonintrusiveDecomposition rhs_decomp;

  std::vector<Eigen::MatrixXcd> A_hat;  // [r]  = P(U) A_{mu_r} U
  std::vector<Eigen::VectorXcd> C_hat;  // [r'] = P(U) C_{mu_r'}
  std::vector<Eigen::MatrixXcd> G;      // [r * dz + s]      = (A_r U)^H (A_s U)
  std::vector<Eigen::VectorXcd> H;      // [r * dz_rhs + s'] = (A_r U)^H C_s'
  Eigen::MatrixXcd S;                   // (r', s')          = C_r'^H C_s'
  Eigen::MatrixXcd residual_factor;     // R of [A_0 U, ..., A_{dz-1} U, C_0, ...] = Q R

  double beta_lb = 0.0;
  Eigen::RowVectorXcd ell_hat;  // l^H U
  Projection projection = Projection::Hermitian;
  ResidualMode residual_mode = ResidualMode::Orthogonalized;

  OnlineLayout online;

  std::size_t BasisSize() const { return snapshot_mu.size(); }
  std::size_t MatrixRank() const { return A_hat.size(); }
  std::size_t RhsRank() const { return C_hat.size(); }
  const ParameterDomain &Domain() const { return matrix_decomp.domain; }
};

struct OnlineSolution
{
  ComplexVector gamma_hat;
  Complex qoi;
  double error_bound = 0.0;
  double residual_norm = 0.0;
  bool rho_clamped = false;  // expanded rho^2 was negative and clamped to zero
  bool extrapolated = false;
  ComplexVector beta;
  ComplexVector beta_rhs;
  double wall_time = 0.0;  // seconds
};

// Smallest singular value of A_mu (dense SVD). Throws SingularMatrix below
// 1e-14 |A|_F.
double ComputeInfSupLowerBound(const ProblemProvider &provider, const ParameterPoint &mu);
double ComputeInfSupLowerBound(const ComplexMatrix &A);

struct GreedyTraceRow
{
  std::size_t step = 0;
  ParameterPoint selected_mu;
  double max_bound = 0.0;
  std::size_t basis_size = 0;
};

struct GreedyResult
{
  ReducedBasisModel model;
  std::vector<GreedyTraceRow> trace;
  std::string stop_reason;
  std::vector<std::string> log;  // skipped parameters, snapshot/decomposition collisions
};

// Greedy offline stage. Each step: truth solve at the current parameter, orthonormalize
// (modified Gram-Schmidt, twice), extend the reduced blocks with the dz new products
// A_{mu_r} u, sweep the trial set with the online bound, pick the argmax. Stops at
// tolerance, at max_basis, or when the new snapshot is numerically in the basis span.
GreedyResult GreedyOffline(const ProblemProvider &provider,
                           const NonintrusiveDecomposition &matrix_decomp,
                           const NonintrusiveDecomposition &rhs_decomp, const GreedyConfig &cfg);

// Builds model.online from the reduced blocks and the residual factor.
void PrepareOnline(ReducedBasisModel &model);

// Online stage: beta(mu), reduced assembly, dense nhat x nhat solve, residual bound and QoI.
// Throws SingularReducedSystem.
OnlineSolution OnlineSolve(const ReducedBasisModel &model, const ParameterPoint &mu);

// Residual norm from the Gram blocks, rho^2 = gamma^H G(beta) gamma - 2 Re(gamma^H H(beta))
// + S(beta). Negative values are returned as is.
double ExpandedResidualSquared(const ReducedBasisModel &model, const ComplexVector &beta,
                               const ComplexVector &beta_rhs, const ComplexVector &gamma);

// Orthonormal basis from truth solves at the model's snapshot parameters, reproducing the
// greedy's orthonormalization.
BasisMatrix RebuildBasis(const ProblemProvider &provider, const ReducedBasisModel &model);

void WriteGreedyTraceCsv(std::ostream &os, const std::vector<std::string> &names,
                         const std::vector<GreedyTraceRow> &trace);

}  // namespace nirb

#endif  // NIRB_RBM_HPP
