// Copyright the nirb authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NIRB_EXPLORATION_HPP
#define NIRB_EXPLORATION_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>
#include "nirb/rbm.hpp"

namespace nirb
{

struct SweepEntry
{
  ParameterPoint mu;
  std::optional<OnlineSolution> solution;
  std::string error;  // set when the online solve failed for this point
};

// Online solves over a list of parameters, in input order. Evaluation may be spread over
// threads; every entry only depends on its own parameter.
std::vector<SweepEntry> Sweep(const ReducedBasisModel &model,
                              const std::vector<ParameterPoint> &points,
                              std::size_t threads = 0);

// count equispaced values of one coordinate between lo and hi, other coordinates fixed.
std::vector<ParameterPoint> AxisPoints(const ParameterPoint &base, std::size_t axis, double lo,
                                       double hi, std::size_t count);

struct Distribution
{
  enum class Kind
  {
    PointMass,           // a = value
    Uniform,             // [a, b], intersected with the box
    TruncatedGaussian,   // mean a, standard deviation b
    TruncatedLogNormal   // log-mean a, log-standard deviation b
  };
  Kind kind = Kind::Uniform;
  double a = 0.0;
  double b = 1.0;
};

struct Histogram
{
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> counts;
};

struct UqResult
{
  Histogram real;
  Histogram imag;
  std::size_t samples = 0;
  double mean_real = 0.0;
  double mean_imag = 0.0;
  std::vector<ParameterPoint> points;  // drawn parameters, in draw order
  std::vector<Complex> qoi;
};

// Draws one parameter per sample from per-coordinate distributions truncated to the box.
// Bitwise deterministic for a fixed seed.
std::vector<ParameterPoint> DrawParameters(const ParameterDomain &domain,
                                           const std::vector<Distribution> &dists,
                                           std::size_t n_samples, std::uint64_t seed);

// Histograms of Re(qoi) and Im(qoi) over the drawn samples; bins span the observed range.
UqResult UqHistogram(const ReducedBasisModel &model, const std::vector<Distribution> &dists,
                     std::size_t n_samples, std::uint64_t seed, std::size_t bins = 20);

// Surface-treatment penalty of the impedance optimization example:
// (0.2 mu1^-0.5 + 0.3 mu2^-0.8 + 0.5 mu3^-1) / 6 - 8.
double ImpedancePenalty(double mu1, double mu2, double mu3);

struct CostScanCell
{
  std::vector<double> impedances;
  double cost = 0.0;
  std::string error;
};

struct CostScanResult
{
  std::vector<CostScanCell> cells;
  std::size_t argmin = 0;
};

// Evaluates sum_i alpha_i |J_i|^2 + h over a Cartesian grid of impedance values, with J_i
// the QoI at the i-th wavenumber. impedance_axes[k] lists the values of coordinate
// impedance_indices[k].
CostScanResult ImpedanceCostScan(const ReducedBasisModel &model, std::size_t wavenumber_index,
                                 const std::vector<double> &wavenumbers,
                                 const std::vector<double> &weights,
                                 const std::vector<std::size_t> &impedance_indices,
                                 const std::vector<std::vector<double>> &impedance_axes,
                                 const ParameterPoint &base);

}  // namespace nirb

#endif  // NIRB_EXPLORATION_HPP
