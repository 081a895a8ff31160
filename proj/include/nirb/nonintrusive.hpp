// Copyright the nirb authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NIRB_NONINTRUSIVE_HPP
#define NIRB_NONINTRUSIVE_HPP

#include <iosfwd>
#include <string>
#include <vector>
#include "nirb/eim.hpp"
#include "nirb/problems.hpp"

namespace nirb
{

// Scalar functions g_s(mu) without location dependence (the affine-available case).
using ScalarFamily = std::vector<ScalarFeature>;

// Named analytic functions appended to the z-vector after the stage-1 blocks.
using ZetaAugmentation = std::vector<ScalarFeature>;

enum class ZVariant
{
  DeltaBased,    // z block = Delta^T g(mu, x_l)
  BInverseBased  // z block = B^{-1} g(mu, x_l) = lambda(mu)
};

// Stage-1 interpolation of one location kernel. The z block has the common width d; when
// the kernel is exhausted at a lower rank the trailing entries are zero.
struct Stage1Block
{
  std::string kernel;
  EimModel model;  // always slice S1
  std::vector<double> magic_locations;
};

struct BetaResult
{
  ComplexVector beta;
  bool extrapolated = false;
};

//
// Nonintrusive approximation Q(mu) ~ sum_r beta_r(mu) Q(mu_r) for any quantity Q linear in
// the z-vector. The z-vector is
//   [ stage-1 block of kernel 1 | ... | stage-1 block of kernel K | features ... ]
// and a second interpolation over (mu, p) -> z_p(mu) gives the coefficients beta_r. With no
// kernels the features are the affine coefficients themselves (the affine-available path).
//
// The evaluators are runtime bindings to a ProblemProvider and are not part of the
// persisted state; call Bind after loading.
//
class NonintrusiveDecomposition
{
public:
  ParameterDomain domain;
  std::vector<Stage1Block> blocks;
  std::size_t block_width = 0;  // common stage-1 rank d
  std::vector<std::string> features;
  ZVariant variant = ZVariant::BInverseBased;
  EimModel zeta;
  std::vector<ParameterPoint> selected_mu;  // ordered like the beta coefficients

  bool IsAffine() const { return blocks.empty(); }
  std::size_t ZLength() const { return blocks.size() * block_width + features.size(); }
  std::size_t Rank() const { return zeta.rank; }

  // Resolves kernel and feature names against the provider.
  void Bind(const ProblemProvider &provider);
  void Bind(std::vector<LocationKernel> kernels, std::vector<ScalarFeature> features);
  bool IsBound() const;

  // z(mu); each stage-1 block only needs the kernel at its d magic locations.
  ComplexVector BuildZ(const ParameterPoint &mu) const;

  // beta(mu), O(K d^2 + dz^2) operations, no full-order work. Points outside the box are
  // evaluated and flagged.
  BetaResult Beta(const ParameterPoint &mu) const;

private:
  std::vector<LocationKernel> kernel_evals_;
  std::vector<ScalarFeature> feature_evals_;
};

// Affine-available path: interpolation of (mu, s) -> g_s(mu) over the trial grid and
// {1..family size}.
NonintrusiveDecomposition DecomposeAffine(const ScalarFamily &family,
                                          const ParameterDomain &domain, std::size_t d,
                                          Slice slice = Slice::S1);

// Two-stage path: stage-1 S1 interpolation of every kernel (rank d), then interpolation of
// (mu, p) -> z_p(mu) at rank dz with the chosen slice. RankDeficient errors carry the stage
// ("stage1:<kernel>" or "zeta").
NonintrusiveDecomposition DecomposeNonaffine(const std::vector<LocationKernel> &families,
                                             const ParameterDomain &domain, std::size_t d,
                                             std::size_t dz, ZVariant variant,
                                             Slice zeta_slice,
                                             const ZetaAugmentation &augmentation);

// z-vector assembled from explicit stage-1 models; exposed for tests of the block layout.
ComplexVector BuildZ(const std::vector<const EimModel *> &stage1,
                     const std::vector<ComplexVector> &magic_samples, std::size_t width,
                     ZVariant variant, const std::vector<Complex> &augmentation);

// Full-order operators at the selected parameters of a decomposition.
std::vector<ComplexMatrix> AssembleMatrixSnapshots(const ProblemProvider &provider,
                                                   const NonintrusiveDecomposition &decomp);
std::vector<ComplexVector> AssembleRhsSnapshots(const ProblemProvider &provider,
                                                const NonintrusiveDecomposition &decomp);

ComplexMatrix Reconstruct(const std::vector<ComplexMatrix> &snapshots, const ComplexVector &beta);
ComplexVector Reconstruct(const std::vector<ComplexVector> &snapshots, const ComplexVector &beta);

struct ValidationRow
{
  ParameterPoint mu;
  double rel_err_matrix = 0.0;
  double rel_err_rhs = 0.0;
};

struct ValidationReport
{
  double max_rel_err_matrix = 0.0;
  double max_rel_err_rhs = 0.0;
  std::vector<ValidationRow> rows;

  // Header: mu coordinate names..., rel_err_matrix, rel_err_rhs.
  void WriteCsv(std::ostream &os, const std::vector<std::string> &names) const;
};

// Relative Frobenius (matrix) and Euclidean (right-hand side) reconstruction errors
// against freshly assembled operators. Either decomposition may be null; its column is then
// zero.
ValidationReport ValidateDecomposition(const NonintrusiveDecomposition *matrix,
                                       const NonintrusiveDecomposition *rhs,
                                       const ProblemProvider &provider,
                                       const std::vector<ParameterPoint> &samples);

}  // namespace nirb

#endif  // NIRB_NONINTRUSIVE_HPP
