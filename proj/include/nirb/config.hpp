// Copyright the nirb authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NIRB_CONFIG_HPP
#define NIRB_CONFIG_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>
#include <json.hpp>
#include "nirb/nonintrusive.hpp"
#include "nirb/problems.hpp"
#include "nirb/rbm.hpp"

namespace nirb
{

//
// Training configuration file (JSON). Layout:
//
//   {
//     "problem": { "kind": "affine_toy" | "kernel", "n": 200, "seed": 1, "prng": "splitmix64",
//                  "wavenumber": "mu0", "impedances": ["mu1", "mu2", "mu3"],
//                  "incident_direction": [0, 0, 1], "measure_direction": [0, 0, -1],
//                  "location_samples": 500 },
//     "parameters": [ { "name": "mu0", "lo": 5, "hi": 10, "resolution": 21 }, ... ],
//     "matrix_decomposition": { "kernels": [...], "features": [...], "d": 13, "dz": 20,
//                               "variant": "b_inverse" | "delta",
//                               "zeta_slice": "S1" | "S2" },
//     "rhs_decomposition":    { same keys },
//     "greedy": { "max_basis": 20, "tolerance": 1e-8,
//                 "first_parameter": "domain_center" | "max_rhs_norm",
//                 "projection": "hermitian" | "transpose",
//                 "residual": "orthogonalized" | "gram_expanded" },
//     "validation": { "samples": 50, "seed": 7 }
//   }
//
// Keys of the kernel problem are ignored for the affine toy. Unknown keys are rejected.
//

struct ProblemConfig
{
  std::string kind = "affine_toy";
  std::size_t n = 100;
  std::uint64_t seed = 1;
  std::string prng = "splitmix64";
  std::string wavenumber = "mu0";
  std::vector<std::string> impedances = {"mu1", "mu2", "mu3"};
  std::array<double, 3> incident_direction = {0.0, 0.0, 1.0};
  std::array<double, 3> measure_direction = {0.0, 0.0, -1.0};
  std::size_t location_samples = 500;
  ParameterDomain domain;
};

struct DecompositionConfig
{
  std::vector<std::string> kernels;  // empty: affine-available path over the features
  std::vector<std::string> features;
  std::size_t d = 1;
  std::size_t dz = 1;
  ZVariant variant = ZVariant::BInverseBased;
  Slice zeta_slice = Slice::S2;
};

struct ValidationConfig
{
  std::size_t samples = 50;
  std::uint64_t seed = 7;
};

struct TrainingConfig
{
  ProblemConfig problem;
  DecompositionConfig matrix;
  DecompositionConfig rhs;
  GreedyConfig greedy;
  ValidationConfig validation;
};

// Throws ConfigError with a path-like location for malformed or inconsistent input.
TrainingConfig ParseTrainingConfig(const nlohmann::json &j);
TrainingConfig LoadTrainingConfig(const std::string &path);

// Normalized echo; ParseTrainingConfig(ToJson(c)) reproduces c.
nlohmann::json ToJson(const TrainingConfig &cfg);

std::shared_ptr<const ProblemProvider> MakeProvider(const ProblemConfig &cfg);

// Runs the configured decomposition on the provider's kernels and features.
NonintrusiveDecomposition BuildDecomposition(const ProblemProvider &provider,
                                             const DecompositionConfig &cfg);

}  // namespace nirb

#endif  // NIRB_CONFIG_HPP
