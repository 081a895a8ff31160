// Copyright the nirb authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NIRB_TRAINING_HPP
#define NIRB_TRAINING_HPP

#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>
#include "nirb/config.hpp"
#include "nirb/rbm.hpp"

namespace nirb
{

struct TrainingResult
{
  ReducedBasisModel model;
  std::vector<GreedyTraceRow> trace;
  std::string stop_reason;
  std::vector<std::string> log;
  std::map<std::string, double> timings;
};

// Offline pipeline: matrix and right-hand-side decompositions, then the greedy. Errors keep
// their stage tag ("stage1:<kernel>", "zeta", "greedy", ...); untagged errors are tagged with
// the pipeline step that raised them.
TrainingResult Train(const TrainingConfig &cfg, const ProblemProvider &provider,
                     const std::function<void(const std::string &)> &log = {});

// Uniform random points in the box from a SplitMix64 stream.
std::vector<ParameterPoint> RandomPoints(const ParameterDomain &domain, std::size_t count,
                                         std::uint64_t seed);

struct ModelValidationRow
{
  ParameterPoint mu;
  double rel_err_matrix = 0.0;
  double rel_err_rhs = 0.0;
  double rb_error = 0.0;      // |U gamma - U_mu| against the truth solution
  double rb_rel_error = 0.0;
  double error_bound = 0.0;
  double sigma_min = 0.0;     // smallest singular value of A_mu
  bool infsup_ok = false;     // sigma_min >= beta_lb
  bool bound_valid = false;   // rb_error <= error_bound (1 + 1e-6)
  Complex qoi;
  Complex truth_qoi;
};

struct ModelValidation
{
  std::vector<ModelValidationRow> rows;
  double max_rel_err_matrix = 0.0;
  double max_rel_err_rhs = 0.0;
  double max_rb_rel_error = 0.0;
  std::size_t bound_violations = 0;  // rows with infsup_ok and !bound_valid

  // Header: mu names..., rel_err_matrix, rel_err_rhs, rb_error, rb_rel_error, error_bound,
  // sigma_min, infsup_ok, bound_valid, qoi_re, qoi_im, truth_qoi_re, truth_qoi_im.
  void WriteCsv(std::ostream &os, const std::vector<std::string> &names) const;
};

// Truth-versus-reduced comparison. The basis is taken from the model when present and
// rebuilt from truth solves otherwise. sigma_min is computed on the first svd_checks rows
// only (all rows when svd_checks is negative); other rows report 0 and infsup_ok false.
ModelValidation ValidateModel(const ProblemProvider &provider, const ReducedBasisModel &model,
                              const std::vector<ParameterPoint> &samples, int svd_checks = -1);

}  // namespace nirb

#endif  // NIRB_TRAINING_HPP
