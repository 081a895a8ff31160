// Copyright the nirb authors.
// SPDX-License-Identifier: Apache-2.0

#include "nirb/nonintrusive.hpp"

#include <ostream>
#include <set>

namespace nirb
{

void NonintrusiveDecomposition::Bind(const ProblemProvider &provider)
{
  std::vector<LocationKernel> kernels;
  for (const auto &b : blocks)
  {
    kernels.push_back(provider.Kernel(b.kernel));
  }
  std::vector<ScalarFeature> feats;
  for (const auto &f : features)
  {
    feats.push_back(provider.Feature(f));
  }
  Bind(std::move(kernels), std::move(feats));
}

void NonintrusiveDecomposition::Bind(std::vector<LocationKernel> kernels,
                                     std::vector<ScalarFeature> feats)
{
  if (kernels.size() != blocks.size() || feats.size() != features.size())
  {
    throw LengthMismatch("decomposition binding does not match its kernels and features");
  }
  for (std::size_t b = 0; b < blocks.size(); b++)
  {
    if (kernels[b].name != blocks[b].kernel)
    {
      throw ConfigError("kernel '" + kernels[b].name + "' bound to block '" +
                        blocks[b].kernel + "'");
    }
  }
  for (std::size_t f = 0; f < features.size(); f++)
  {
    if (feats[f].name != features[f])
    {
      throw ConfigError("feature '" + feats[f].name + "' bound to '" + features[f] + "'");
    }
  }
  kernel_evals_ = std::move(kernels);
  feature_evals_ = std::move(feats);
}

bool NonintrusiveDecomposition::IsBound() const
{
  return kernel_evals_.size() == blocks.size() && feature_evals_.size() == features.size() &&
         (!blocks.empty() || !features.empty());
}

ComplexVector NonintrusiveDecomposition::BuildZ(const ParameterPoint &mu) const
{
  if (!IsBound())
  {
    throw Error("decomposition evaluators are not bound", "decomposition");
  }
  std::vector<const EimModel *> stage1;
  std::vector<ComplexVector> samples;
  for (std::size_t b = 0; b < blocks.size(); b++)
  {
    const auto &blk = blocks[b];
    ComplexVector s(blk.magic_locations.size());
    for (std::size_t l = 0; l < blk.magic_locations.size(); l++)
    {
      s(l) = kernel_evals_[b].eval(mu, blk.magic_locations[l]);
    }
    stage1.push_back(&blk.model);
    samples.push_back(std::move(s));
  }
  std::vector<Complex> aug;
  aug.reserve(feature_evals_.size());
  for (const auto &f : feature_evals_)
  {
    aug.push_back(f.eval(mu));
  }
  return nirb::BuildZ(stage1, samples, block_width, variant, aug);
}

BetaResult NonintrusiveDecomposition::Beta(const ParameterPoint &mu) const
{
  const ComplexVector z = BuildZ(mu);
  const auto &sel = zeta.XIndices();
  ComplexVector zs(sel.size());
  for (std::size_t l = 0; l < sel.size(); l++)
  {
    zs(l) = z(sel[l]);
  }
  BetaResult res;
  res.beta = zeta.MuWeights(zs);
  res.extrapolated = !domain.Contains(mu);
  return res;
}

ComplexVector BuildZ(const std::vector<const EimModel *> &stage1,
                     const std::vector<ComplexVector> &magic_samples, std::size_t width,
                     ZVariant variant, const std::vector<Complex> &augmentation)
{
  if (stage1.size() != magic_samples.size())
  {
    throw LengthMismatch("one sample vector per stage-1 model expected");
  }
  ComplexVector z = ComplexVector::Zero(stage1.size() * width + augmentation.size());
  for (std::size_t b = 0; b < stage1.size(); b++)
  {
    const EimModel &m = *stage1[b];
    if (m.rank > width)
    {
      throw LengthMismatch("stage-1 rank exceeds the block width");
    }
    const ComplexVector blk = variant == ZVariant::BInverseBased
                                  ? m.ApplyLambda(magic_samples[b])
                                  : m.OuterWeights(magic_samples[b]);
    z.segment(b * width, m.rank) = blk;
  }
  for (std::size_t a = 0; a < augmentation.size(); a++)
  {
    z(stage1.size() * width + a) = augmentation[a];
  }
  return z;
}

namespace
{

std::vector<ParameterPoint> SelectedMu(const EimModel &zeta,
                                       const std::vector<ParameterPoint> &trial)
{
  std::vector<ParameterPoint> mu;
  for (auto i : zeta.MuIndices())
  {
    mu.push_back(trial[i]);
  }
  return mu;
}

// Trial points that differ in the coordinates read by the kernel; one representative each.
std::vector<ParameterPoint> KernelTrialPoints(const LocationKernel &kernel,
                                              const std::vector<ParameterPoint> &trial)
{
  if (kernel.depends_on.empty())
  {
    return trial;
  }
  std::set<std::vector<double>> seen;
  std::vector<ParameterPoint> pts;
  for (const auto &p : trial)
  {
    std::vector<double> key;
    for (auto k : kernel.depends_on)
    {
      key.push_back(p[k]);
    }
    if (seen.insert(key).second)
    {
      pts.push_back(p);
    }
  }
  return pts;
}

}  // namespace

NonintrusiveDecomposition DecomposeAffine(const ScalarFamily &family,
                                          const ParameterDomain &domain, std::size_t d,
                                          Slice slice)
{
  if (family.empty())
  {
    throw ConfigError("affine decomposition needs at least one scalar function");
  }
  if (d < 1 || d > family.size())
  {
    throw ConfigError("affine decomposition rank must lie in [1, family size]");
  }
  const auto trial = domain.TrialGrid();
  Eigen::MatrixXcd Z(trial.size(), family.size());
  for (std::size_t i = 0; i < trial.size(); i++)
  {
    for (std::size_t s = 0; s < family.size(); s++)
    {
      Z(i, s) = family[s].eval(trial[i]);
    }
  }
  NonintrusiveDecomposition dec;
  dec.domain = domain;
  for (const auto &f : family)
  {
    dec.features.push_back(f.name);
  }
  dec.variant = ZVariant::BInverseBased;
  try
  {
    dec.zeta = BuildEim(SampleGrid(std::move(Z), trial), d, slice);
  }
  catch (RankDeficient &e)
  {
    e.SetStage("zeta");
    throw;
  }
  dec.selected_mu = SelectedMu(dec.zeta, trial);
  dec.Bind({}, family);
  return dec;
}

NonintrusiveDecomposition DecomposeNonaffine(const std::vector<LocationKernel> &families,
                                             const ParameterDomain &domain, std::size_t d,
                                             std::size_t dz, ZVariant variant,
                                             Slice zeta_slice,
                                             const ZetaAugmentation &augmentation)
{
  if (families.empty())
  {
    throw ConfigError("two-stage decomposition needs at least one kernel");
  }
  if (d < 1 || dz < 1)
  {
    throw ConfigError("interpolation ranks must be at least 1");
  }
  std::set<std::string> names;
  for (const auto &a : augmentation)
  {
    if (!names.insert(a.name).second)
    {
      throw ConfigError("duplicate augmentation entry '" + a.name + "'");
    }
  }
  const std::size_t zlen = families.size() * d + augmentation.size();
  if (dz > zlen)
  {
    throw ConfigError("second-stage rank " + std::to_string(dz) + " exceeds z length " +
                      std::to_string(zlen));
  }

  NonintrusiveDecomposition dec;
  dec.domain = domain;
  dec.block_width = d;
  dec.variant = variant;
  for (const auto &a : augmentation)
  {
    dec.features.push_back(a.name);
  }

  const auto trial = domain.TrialGrid();
  for (const auto &kernel : families)
  {
    if (kernel.locations.empty())
    {
      throw ConfigError("kernel '" + kernel.name + "' has no trial locations");
    }
    const auto pts = KernelTrialPoints(kernel, trial);
    Eigen::MatrixXcd G(pts.size(), kernel.locations.size());
    for (std::size_t i = 0; i < pts.size(); i++)
    {
      for (std::size_t j = 0; j < kernel.locations.size(); j++)
      {
        G(i, j) = kernel.eval(pts[i], kernel.locations[j]);
      }
    }
    const SampleGrid grid(std::move(G), pts, kernel.locations);
    Stage1Block blk;
    blk.kernel = kernel.name;
    try
    {
      blk.model = BuildEimS1(grid, d);
    }
    catch (RankDeficient &e)
    {
      if (e.AchievedRank() == 0 || !e.Truncated())
      {
        e.SetStage("stage1:" + kernel.name);
        throw;
      }
      blk.model = *e.Truncated();
    }
    for (auto x : blk.model.XIndices())
    {
      blk.magic_locations.push_back(kernel.locations[x]);
    }
    dec.blocks.push_back(std::move(blk));
  }
  dec.Bind(families, augmentation);

  Eigen::MatrixXcd Z(trial.size(), zlen);
  for (std::size_t i = 0; i < trial.size(); i++)
  {
    Z.row(i) = dec.BuildZ(trial[i]).transpose();
  }
  try
  {
    dec.zeta = BuildEim(SampleGrid(std::move(Z), trial), dz, zeta_slice);
  }
  catch (RankDeficient &e)
  {
    e.SetStage("zeta");
    throw;
  }
  dec.selected_mu = SelectedMu(dec.zeta, trial);
  return dec;
}

std::vector<ComplexMatrix> AssembleMatrixSnapshots(const ProblemProvider &provider,
                                                   const NonintrusiveDecomposition &decomp)
{
  std::vector<ComplexMatrix> snaps;
  for (const auto &mu : decomp.selected_mu)
  {
    snaps.push_back(provider.AssembleMatrix(mu));
  }
  return snaps;
}

std::vector<ComplexVector> AssembleRhsSnapshots(const ProblemProvider &provider,
                                                const NonintrusiveDecomposition &decomp)
{
  std::vector<ComplexVector> snaps;
  for (const auto &mu : decomp.selected_mu)
  {
    snaps.push_back(provider.AssembleRhs(mu));
  }
  return snaps;
}

ComplexMatrix Reconstruct(const std::vector<ComplexMatrix> &snapshots, const ComplexVector &beta)
{
  if (snapshots.size() != static_cast<std::size_t>(beta.size()) || snapshots.empty())
  {
    throw LengthMismatch("one coefficient per snapshot expected");
  }
  ComplexMatrix A = beta(0) * snapshots[0];
  for (std::size_t r = 1; r < snapshots.size(); r++)
  {
    A += beta(r) * snapshots[r];
  }
  return A;
}

ComplexVector Reconstruct(const std::vector<ComplexVector> &snapshots, const ComplexVector &beta)
{
  if (snapshots.size() != static_cast<std::size_t>(beta.size()) || snapshots.empty())
  {
    throw LengthMismatch("one coefficient per snapshot expected");
  }
  ComplexVector C = beta(0) * snapshots[0];
  for (std::size_t r = 1; r < snapshots.size(); r++)
  {
    C += beta(r) * snapshots[r];
  }
  return C;
}

void ValidationReport::WriteCsv(std::ostream &os, const std::vector<std::string> &names) const
{
  for (const auto &n : names)
  {
    os << n << ',';
  }
  os << "rel_err_matrix,rel_err_rhs\n";
  for (const auto &row : rows)
  {
    for (double c : row.mu.coords)
    {
      os << FormatDecimal(c) << ',';
    }
    os << FormatDecimal(row.rel_err_matrix) << ',' << FormatDecimal(row.rel_err_rhs) << '\n';
  }
}

ValidationReport ValidateDecomposition(const NonintrusiveDecomposition *matrix,
                                       const NonintrusiveDecomposition *rhs,
                                       const ProblemProvider &provider,
                                       const std::vector<ParameterPoint> &samples)
{
  std::vector<ComplexMatrix> a_snaps;
  std::vector<ComplexVector> c_snaps;
  if (matrix)
  {
    a_snaps = AssembleMatrixSnapshots(provider, *matrix);
  }
  if (rhs)
  {
    c_snaps = AssembleRhsSnapshots(provider, *rhs);
  }
  ValidationReport rep;
  for (const auto &mu : samples)
  {
    ValidationRow row;
    row.mu = mu;
    if (matrix)
    {
      const ComplexMatrix A = provider.AssembleMatrix(mu);
      const ComplexMatrix Ar = Reconstruct(a_snaps, matrix->Beta(mu).beta);
      row.rel_err_matrix = (A - Ar).norm() / A.norm();
    }
    if (rhs)
    {
      const ComplexVector C = provider.AssembleRhs(mu);
      const ComplexVector Cr = Reconstruct(c_snaps, rhs->Beta(mu).beta);
      row.rel_err_rhs = (C - Cr).norm() / C.norm();
    }
    rep.max_rel_err_matrix = std::max(rep.max_rel_err_matrix, row.rel_err_matrix);
    rep.max_rel_err_rhs = std::max(rep.max_rel_err_rhs, row.rel_err_rhs);
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace nirb
