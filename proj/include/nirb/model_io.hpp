// Copyright the nirb authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NIRB_MODEL_IO_HPP
#define NIRB_MODEL_IO_HPP

#include <map>
#include <memory>
#include <string>
#include <vector>
#include <json.hpp>
#include "nirb/config.hpp"
#include "nirb/rbm.hpp"

namespace nirb
{

inline constexpr const char *kModelFormat = "nirb-model/1";
inline constexpr const char *kToolVersion = "0.3.0";

struct Provenance
{
  std::string tool_version = kToolVersion;
  std::string created_at;                 // ISO 8601, UTC
  std::map<std::string, double> timings;  // seconds per stage
};

// Numeric arrays are nested lists of 17-significant-digit decimal strings; complex arrays are
// stored as separate "re" and "im" lists.
nlohmann::json ToJson(const Eigen::MatrixXcd &A);
nlohmann::json ToJson(const Eigen::VectorXcd &v);
Eigen::MatrixXcd MatrixFromJson(const nlohmann::json &j);
Eigen::VectorXcd VectorFromJson(const nlohmann::json &j);

nlohmann::json ToJson(const EimModel &m);
EimModel EimModelFromJson(const nlohmann::json &j);

nlohmann::json ToJson(const NonintrusiveDecomposition &d);
NonintrusiveDecomposition DecompositionFromJson(const nlohmann::json &j,
                                                const ParameterDomain &domain);

// Model file document. The basis is written only when the model carries one.
nlohmann::json ModelToJson(const TrainingConfig &cfg, const ReducedBasisModel &model,
                           const Provenance &prov);

// Writes to a temporary file in the target directory and renames it into place.
void WriteFileAtomic(const std::string &path, const std::string &contents);
void SaveModel(const std::string &path, const nlohmann::json &doc);

struct LoadedModel
{
  TrainingConfig config;
  std::shared_ptr<const ProblemProvider> provider;
  ReducedBasisModel model;
  nlohmann::json provenance;
};

// Reads a model file and binds the decompositions to a provider: the given one, or one
// rebuilt from the configuration echo. Throws ConfigError for a bad format version.
LoadedModel ModelFromJson(const nlohmann::json &doc,
                          std::shared_ptr<const ProblemProvider> provider = nullptr);
LoadedModel LoadModel(const std::string &path,
                      std::shared_ptr<const ProblemProvider> provider = nullptr);

// Structural and numeric comparison of two model documents, skipping provenance timestamps
// and timings. Decimal strings are compared as numbers with the given relative tolerance.
// Returns human-readable differences; empty when the models agree.
std::vector<std::string> CompareModelDocuments(const nlohmann::json &a, const nlohmann::json &b,
                                               double rel_tol = 0.0);

}  // namespace nirb

#endif  // NIRB_MODEL_IO_HPP
