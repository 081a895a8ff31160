// Copyright the nirb authors.
// SPDX-License-Identifier: Apache-2.0

#include "nirb/training.hpp"

#include <chrono>
#include <ostream>
#include "nirb/random.hpp"

namespace nirb
{

namespace
{

template <typename F>
auto Timed(std::map<std::string, double> &timings, const std::string &key, const char *stage,
           F &&f)
{
  const auto t0 = std::chrono::steady_clock::now();
  try
  {
    auto out = f();
    timings[key] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
  }
  catch (Error &e)
  {
    if (e.Stage().empty() || e.Stage() == "eim")
    {
      e.SetStage(stage);
    }
    else if (e.Stage().rfind("stage1:", 0) == 0 || e.Stage() == "zeta")
    {
      e.SetStage(std::string(stage) + "/" + e.Stage());
    }
    throw;
  }
}

}  // namespace

TrainingResult Train(const TrainingConfig &cfg, const ProblemProvider &provider,
                     const std::function<void(const std::string &)> &log)
{
  auto say = [&](const std::string &msg)
  {
    if (log)
    {
      log(msg);
    }
  };
  TrainingResult res;
  say("decomposing the matrix");
  const auto mdec = Timed(res.timings, "matrix_decomposition", "decomposition:matrix",
                          [&] { return BuildDecomposition(provider, cfg.matrix); });
  say("decomposing the right-hand side");
  const auto rdec = Timed(res.timings, "rhs_decomposition", "decomposition:rhs",
                          [&] { return BuildDecomposition(provider, cfg.rhs); });
  say("running the greedy");
  auto greedy = Timed(res.timings, "greedy", "greedy",
                      [&] { return GreedyOffline(provider, mdec, rdec, cfg.greedy); });
  res.model = std::move(greedy.model);
  res.trace = std::move(greedy.trace);
  res.stop_reason = std::move(greedy.stop_reason);
  res.log = std::move(greedy.log);
  return res;
}

std::vector<ParameterPoint> RandomPoints(const ParameterDomain &domain, std::size_t count,
                                         std::uint64_t seed)
{
  SplitMix64 rng(seed);
  std::vector<ParameterPoint> pts;
  for (std::size_t i = 0; i < count; i++)
  {
    std::vector<double> c(domain.Dimension());
    for (std::size_t k = 0; k < c.size(); k++)
    {
      c[k] = rng.Uniform(domain.Range(k).lo, domain.Range(k).hi);
    }
    pts.push_back(domain.Point(std::move(c)));
  }
  return pts;
}

ModelValidation ValidateModel(const ProblemProvider &provider, const ReducedBasisModel &model,
                              const std::vector<ParameterPoint> &samples, int svd_checks)
{
  const BasisMatrix U = model.basis ? *model.basis : RebuildBasis(provider, model);
  const auto a_snaps = AssembleMatrixSnapshots(provider, model.matrix_decomp);
  const auto c_snaps = AssembleRhsSnapshots(provider, model.rhs_decomp);
  const ComplexVector &ell = provider.OutputFunctional();

  ModelValidation v;
  for (std::size_t i = 0; i < samples.size(); i++)
  {
    const auto &mu = samples[i];
    ModelValidationRow row;
    row.mu = mu;
    const ComplexMatrix A = provider.AssembleMatrix(mu);
    const ComplexVector C = provider.AssembleRhs(mu);
    const OnlineSolution sol = OnlineSolve(model, mu);
    row.rel_err_matrix = (A - Reconstruct(a_snaps, sol.beta)).norm() / A.norm();
    row.rel_err_rhs = (C - Reconstruct(c_snaps, sol.beta_rhs)).norm() / C.norm();
    const ComplexVector u = LuSolve(A, C);
    const ComplexVector ur = U * sol.gamma_hat;
    row.rb_error = (ur - u).norm();
    row.rb_rel_error = row.rb_error / u.norm();
    row.error_bound = sol.error_bound;
    row.qoi = sol.qoi;
    row.truth_qoi = ell.dot(u);
    if (svd_checks < 0 || i < static_cast<std::size_t>(svd_checks))
    {
      row.sigma_min = SmallestSingularValue(A);
      row.infsup_ok = row.sigma_min >= model.beta_lb;
    }
    row.bound_valid = row.rb_error <= row.error_bound * (1.0 + 1e-6);
    v.max_rel_err_matrix = std::max(v.max_rel_err_matrix, row.rel_err_matrix);
    v.max_rel_err_rhs = std::max(v.max_rel_err_rhs, row.rel_err_rhs);
    v.max_rb_rel_error = std::max(v.max_rb_rel_error, row.rb_rel_error);
    if (row.infsup_ok && !row.bound_valid)
    {
      v.bound_violations++;
    }
    v.rows.push_back(std::move(row));
  }
  return v;
}

void ModelValidation::WriteCsv(std::ostream &os, const std::vector<std::string> &names) const
{
  for (const auto &n : names)
  {
    os << n << ',';
  }
  os << "rel_err_matrix,rel_err_rhs,rb_error,rb_rel_error,error_bound,sigma_min,infsup_ok,"
        "bound_valid,qoi_re,qoi_im,truth_qoi_re,truth_qoi_im\n";
  for (const auto &r : rows)
  {
    for (double c : r.mu.coords)
    {
      os << FormatDecimal(c) << ',';
    }
    os << FormatDecimal(r.rel_err_matrix) << ',' << FormatDecimal(r.rel_err_rhs) << ','
       << FormatDecimal(r.rb_error) << ',' << FormatDecimal(r.rb_rel_error) << ','
       << FormatDecimal(r.error_bound) << ',' << FormatDecimal(r.sigma_min) << ','
       << (r.infsup_ok ? 1 : 0) << ',' << (r.bound_valid ? 1 : 0) << ','
       << FormatDecimal(r.qoi.real()) << ',' << FormatDecimal(r.qoi.imag()) << ','
       << FormatDecimal(r.truth_qoi.real()) << ',' << FormatDecimal(r.truth_qoi.imag()) << '\n';
  }
}

}  // namespace nirb
