// Copyright the nirb authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NIRB_PROBLEMS_HPP
#define NIRB_PROBLEMS_HPP

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>
#include "nirb/linalg.hpp"
#include "nirb/parameters.hpp"

namespace nirb
{

// Analytic scalar function of the parameter, usable as an affine coefficient or as a
// z-vector augmentation entry.
struct ScalarFeature
{
  std::string name;
  std::function<Complex(const ParameterPoint &)> eval;
};

// Bivariate kernel g(mu, t) with a scalar location variable t (a distance, a projected
// coordinate, ...) sampled at the given trial locations. depends_on lists the parameter
// coordinates the kernel actually reads; an empty list means all of them.
struct LocationKernel
{
  std::string name;
  std::function<Complex(const ParameterPoint &, double)> eval;
  std::vector<double> locations;
  std::vector<std::size_t> depends_on;
};

//
// Black-box parametrized linear system mu -> (A_mu, C_mu) with a fixed output functional
// l (the quantity of interest is l^H u). Implementations are immutable after construction
// and their assembly routines are pure, so concurrent calls are safe.
//
class ProblemProvider
{
public:
  virtual ~ProblemProvider() = default;

  virtual std::string Kind() const = 0;
  virtual std::size_t Size() const = 0;
  virtual const ParameterDomain &Domain() const = 0;
  virtual ComplexMatrix AssembleMatrix(const ParameterPoint &mu) const = 0;
  virtual ComplexVector AssembleRhs(const ParameterPoint &mu) const = 0;
  virtual const ComplexVector &OutputFunctional() const = 0;
  virtual const std::vector<ScalarFeature> &ScalarFeatures() const = 0;
  virtual const std::vector<LocationKernel> &Kernels() const = 0;

  // Name lookups; throw ConfigError for unknown names.
  const ScalarFeature &Feature(const std::string &name) const;
  const LocationKernel &Kernel(const std::string &name) const;
};

// A_mu = A_0 + sum_k mu_k A_k with A_0 = (n+1) tridiag(-1, 2, -1) and positive diagonal
// A_k (lumped-mass analogs with distinct profiles); C_mu = h (1, ..., 1); the output is the
// mean of the solution. Scalar features: one per coordinate, named after it, returning mu_k.
std::shared_ptr<const ProblemProvider> MakeAffineToyProvider(std::size_t n,
                                                             ParameterDomain domain);

// Convenience overload: mu_dim coordinates "mu0", "mu1", ... each on [0, 10] with 101
// trial points.
std::shared_ptr<const ProblemProvider> MakeAffineToyProvider(std::size_t n,
                                                             std::size_t mu_dim = 1);

struct PointCloud
{
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;
  std::vector<int> zones;  // 1, 2 or 3

  std::size_t Size() const { return points.size(); }
};

// n points uniformly distributed on the unit sphere, drawn from a SplitMix64 stream. Equal
// weights 4 pi / n. Zones are latitude bands of equal point count: zone 1 holds the
// largest z, zone 3 the smallest (ties broken by point index).
PointCloud GenerateSpherePointCloud(std::size_t n, std::uint64_t seed);

struct KernelProblemConfig
{
  PointCloud cloud;
  ParameterDomain domain;
  std::size_t wavenumber_index = 0;
  std::array<std::size_t, 3> impedance_indices = {1, 2, 3};
  std::array<double, 3> incident_direction = {0.0, 0.0, 1.0};
  std::array<double, 3> measure_direction = {0.0, 0.0, -1.0};
  std::size_t location_samples = 500;
};

// Default four-parameter box: wavenumber mu0 in [5, 10] rad/m and impedances mu1..mu3 in
// [1, 5], with the given trial resolutions.
ParameterDomain DefaultKernelDomain(int wavenumber_resolution = 21,
                                    int impedance_resolution = 5);

//
// Point-cloud analog of a Helmholtz boundary-integral system on the unit sphere:
//   A_ij = w_i w_j exp(i mu0 r_ij) / (4 pi r_ij),          i != j,
//   A_ii = w_i (1 + i mu0 / mu_{z_i} + i mu_{z_i} / mu0),
//   C_i  = w_i exp(i mu0 d . x_i),
//   l_i  = w_i exp(-i mu0* d' . x_i), mu0* the central wavenumber.
// Kernels: "helmholtz_phase" exp(i mu0 r) on [r_min, r_max], "plane_wave" exp(i mu0 s) on
// the range of s = d . x_i. Scalar features: "w_over_zk" = mu0 / mu_k and "zk_over_w" =
// mu_k / mu0 for k = 1, 2, 3.
//
// Throws ZeroDistance if two points coincide, ConfigError for an invalid cloud or index map.
std::shared_ptr<const ProblemProvider> MakeKernelProvider(KernelProblemConfig cfg);

// Full-order solve A_mu U_mu = C_mu by dense LU with partial pivoting.
ComplexVector TruthSolve(const ProblemProvider &provider, const ParameterPoint &mu);

// sum_i alpha_i |J_i|^2 + h. Throws LengthMismatch if the lists differ in length.
double CostFunction(const std::vector<Complex> &qoi_values, const std::vector<double> &weights,
                    double penalty);

}  // namespace nirb

#endif  // NIRB_PROBLEMS_HPP
