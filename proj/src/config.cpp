// Copyright the nirb authors.
// SPDX-License-Identifier: Apache-2.0

#include "nirb/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include "nirb/random.hpp"

namespace nirb
{

namespace
{

using nlohmann::json;

void RejectUnknown(const json &j, const std::string &where, const std::set<std::string> &keys)
{
  if (!j.is_object())
  {
    throw ConfigError(where + ": expected an object");
  }
  for (const auto &[k, v] : j.items())
  {
    if (!keys.count(k))
    {
      throw ConfigError(where + ": unknown key '" + k + "'");
    }
  }
}

const json &Require(const json &j, const std::string &where, const std::string &key)
{
  if (!j.contains(key))
  {
    throw ConfigError(where + ": missing key '" + key + "'");
  }
  return j.at(key);
}

double Number(const json &j, const std::string &where)
{
  if (!j.is_number())
  {
    throw ConfigError(where + ": expected a number");
  }
  const double v = j.get<double>();
  if (!std::isfinite(v))
  {
    throw ConfigError(where + ": expected a finite number");
  }
  return v;
}

std::uint64_t Unsigned(const json &j, const std::string &where)
{
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
  {
    throw ConfigError(where + ": expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

std::string String(const json &j, const std::string &where)
{
  if (!j.is_string())
  {
    throw ConfigError(where + ": expected a string");
  }
  return j.get<std::string>();
}

std::vector<std::string> Strings(const json &j, const std::string &where)
{
  if (!j.is_array())
  {
    throw ConfigError(where + ": expected an array of strings");
  }
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); i++)
  {
    out.push_back(String(j[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

std::array<double, 3> Vec3(const json &j, const std::string &where)
{
  if (!j.is_array() || j.size() != 3)
  {
    throw ConfigError(where + ": expected three numbers");
  }
  return {Number(j[0], where), Number(j[1], where), Number(j[2], where)};
}

ProblemConfig ParseProblem(const json &p, const json &params)
{
  RejectUnknown(p, "problem",
                {"kind", "n", "seed", "prng", "wavenumber", "impedances", "incident_direction",
                 "measure_direction", "location_samples"});
  ProblemConfig cfg;
  cfg.kind = String(Require(p, "problem", "kind"), "problem.kind");
  if (cfg.kind != "affine_toy" && cfg.kind != "kernel")
  {
    throw ConfigError("problem.kind: unknown problem '" + cfg.kind + "'");
  }
  cfg.n = Unsigned(Require(p, "problem", "n"), "problem.n");
  if (p.contains("seed"))
  {
    cfg.seed = Unsigned(p["seed"], "problem.seed");
  }
  if (p.contains("prng"))
  {
    cfg.prng = String(p["prng"], "problem.prng");
  }
  if (cfg.prng != SplitMix64::kAlgorithm)
  {
    throw ConfigError("problem.prng: unsupported generator '" + cfg.prng + "'");
  }
  if (p.contains("wavenumber"))
  {
    cfg.wavenumber = String(p["wavenumber"], "problem.wavenumber");
  }
  if (p.contains("impedances"))
  {
    cfg.impedances = Strings(p["impedances"], "problem.impedances");
  }
  if (p.contains("incident_direction"))
  {
    cfg.incident_direction = Vec3(p["incident_direction"], "problem.incident_direction");
  }
  if (p.contains("measure_direction"))
  {
    cfg.measure_direction = Vec3(p["measure_direction"], "problem.measure_direction");
  }
  if (p.contains("location_samples"))
  {
    cfg.location_samples = Unsigned(p["location_samples"], "problem.location_samples");
  }

  if (!params.is_array() || params.empty())
  {
    throw ConfigError("parameters: expected a non-empty array");
  }
  std::vector<ParameterRange> ranges;
  for (std::size_t i = 0; i < params.size(); i++)
  {
    const std::string where = "parameters[" + std::to_string(i) + "]";
    RejectUnknown(params[i], where, {"name", "lo", "hi", "resolution"});
    ParameterRange r;
    r.name = String(Require(params[i], where, "name"), where + ".name");
    r.lo = Number(Require(params[i], where, "lo"), where + ".lo");
    r.hi = Number(Require(params[i], where, "hi"), where + ".hi");
    const auto res = Unsigned(Require(params[i], where, "resolution"), where + ".resolution");
    if (res < 2 || res > 100000)
    {
      throw ConfigError(where + ".resolution: expected an integer in [2, 100000]");
    }
    r.resolution = static_cast<int>(res);
    ranges.push_back(r);
  }
  cfg.domain = ParameterDomain(std::move(ranges));
  if (cfg.kind == "kernel")
  {
    if (cfg.impedances.size() != 3)
    {
      throw ConfigError("problem.impedances: expected three parameter names");
    }
    cfg.domain.IndexOf(cfg.wavenumber);
    for (const auto &z : cfg.impedances)
    {
      cfg.domain.IndexOf(z);
    }
  }
  return cfg;
}

DecompositionConfig ParseDecomposition(const json &j, const std::string &where)
{
  RejectUnknown(j, where, {"kernels", "features", "d", "dz", "variant", "zeta_slice"});
  DecompositionConfig cfg;
  if (j.contains("kernels"))
  {
    cfg.kernels = Strings(j["kernels"], where + ".kernels");
  }
  if (j.contains("features"))
  {
    cfg.features = Strings(j["features"], where + ".features");
  }
  if (cfg.kernels.empty() && cfg.features.empty())
  {
    throw ConfigError(where + ": needs kernels or features");
  }
  cfg.d = Unsigned(Require(j, where, "d"), where + ".d");
  cfg.dz = j.contains("dz") ? Unsigned(j["dz"], where + ".dz") : cfg.d;
  if (cfg.d < 1 || cfg.dz < 1)
  {
    throw ConfigError(where + ": ranks must be at least 1");
  }
  if (cfg.kernels.empty() && cfg.dz != cfg.d)
  {
    throw ConfigError(where + ": the affine path has a single rank, dz must equal d");
  }
  if (j.contains("variant"))
  {
    const auto v = String(j["variant"], where + ".variant");
    if (v == "b_inverse")
    {
      cfg.variant = ZVariant::BInverseBased;
    }
    else if (v == "delta")
    {
      cfg.variant = ZVariant::DeltaBased;
    }
    else
    {
      throw ConfigError(where + ".variant: expected 'b_inverse' or 'delta'");
    }
  }
  if (j.contains("zeta_slice"))
  {
    const auto s = String(j["zeta_slice"], where + ".zeta_slice");
    if (s == "S1")
    {
      cfg.zeta_slice = Slice::S1;
    }
    else if (s == "S2")
    {
      cfg.zeta_slice = Slice::S2;
    }
    else
    {
      throw ConfigError(where + ".zeta_slice: expected 'S1' or 'S2'");
    }
  }
  return cfg;
}

GreedyConfig ParseGreedy(const json &j)
{
  RejectUnknown(j, "greedy",
                {"max_basis", "tolerance", "first_parameter", "projection", "residual"});
  GreedyConfig cfg;
  cfg.keep_basis = false;
  if (j.contains("max_basis"))
  {
    cfg.max_basis = Unsigned(j["max_basis"], "greedy.max_basis");
  }
  if (cfg.max_basis < 1)
  {
    throw ConfigError("greedy.max_basis: expected at least 1");
  }
  if (j.contains("tolerance"))
  {
    cfg.tolerance = Number(j["tolerance"], "greedy.tolerance");
  }
  if (!(cfg.tolerance >= 0.0))
  {
    throw ConfigError("greedy.tolerance: expected a non-negative number");
  }
  if (j.contains("first_parameter"))
  {
    const auto f = String(j["first_parameter"], "greedy.first_parameter");
    if (f == "domain_center")
    {
      cfg.first = FirstParameter::DomainCenter;
    }
    else if (f == "max_rhs_norm")
    {
      cfg.first = FirstParameter::MaxRhsNorm;
    }
    else
    {
      throw ConfigError("greedy.first_parameter: expected 'domain_center' or 'max_rhs_norm'");
    }
  }
  if (j.contains("projection"))
  {
    const auto p = String(j["projection"], "greedy.projection");
    if (p == "hermitian")
    {
      cfg.projection = Projection::Hermitian;
    }
    else if (p == "transpose")
    {
      cfg.projection = Projection::Transpose;
    }
    else
    {
      throw ConfigError("greedy.projection: expected 'hermitian' or 'transpose'");
    }
  }
  if (j.contains("residual"))
  {
    const auto r = String(j["residual"], "greedy.residual");
    if (r == "orthogonalized")
    {
      cfg.residual = ResidualMode::Orthogonalized;
    }
    else if (r == "gram_expanded")
    {
      cfg.residual = ResidualMode::GramExpanded;
    }
    else
    {
      throw ConfigError("greedy.residual: expected 'orthogonalized' or 'gram_expanded'");
    }
  }
  return cfg;
}

json DecompositionJson(const DecompositionConfig &c)
{
  return {{"kernels", c.kernels},
          {"features", c.features},
          {"d", c.d},
          {"dz", c.dz},
          {"variant", c.variant == ZVariant::BInverseBased ? "b_inverse" : "delta"},
          {"zeta_slice", c.zeta_slice == Slice::S1 ? "S1" : "S2"}};
}

}  // namespace

TrainingConfig ParseTrainingConfig(const json &j)
{
  RejectUnknown(j, "config",
                {"problem", "parameters", "matrix_decomposition", "rhs_decomposition", "greedy",
                 "validation"});
  TrainingConfig cfg;
  try
  {
    cfg.problem =
        ParseProblem(Require(j, "config", "problem"), Require(j, "config", "parameters"));
    cfg.matrix = ParseDecomposition(Require(j, "config", "matrix_decomposition"),
                                    "matrix_decomposition");
    cfg.rhs = ParseDecomposition(Require(j, "config", "rhs_decomposition"), "rhs_decomposition");
    cfg.greedy = ParseGreedy(j.contains("greedy") ? j["greedy"] : json::object());
    if (j.contains("validation"))
    {
      const auto &v = j["validation"];
      RejectUnknown(v, "validation", {"samples", "seed"});
      if (v.contains("samples"))
      {
        cfg.validation.samples = Unsigned(v["samples"], "validation.samples");
      }
      if (v.contains("seed"))
      {
        cfg.validation.seed = Unsigned(v["seed"], "validation.seed");
      }
    }
  }
  catch (const ConfigError &)
  {
    throw;
  }
  catch (const Error &e)
  {
    throw ConfigError(e.what());
  }
  catch (const json::exception &e)
  {
    throw ConfigError(std::string("malformed configuration: ") + e.what());
  }
  return cfg;
}

TrainingConfig LoadTrainingConfig(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw ConfigError("cannot open configuration '" + path + "'");
  }
  json j;
  try
  {
    j = json::parse(in);
  }
  catch (const json::exception &e)
  {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
  return ParseTrainingConfig(j);
}

json ToJson(const TrainingConfig &cfg)
{
  const auto &p = cfg.problem;
  json params = json::array();
  for (const auto &r : p.domain.Ranges())
  {
    params.push_back({{"name", r.name}, {"lo", r.lo}, {"hi", r.hi}, {"resolution", r.resolution}});
  }
  const auto &g = cfg.greedy;
  return {
      {"problem",
       {{"kind", p.kind},
        {"n", p.n},
        {"seed", p.seed},
        {"prng", p.prng},
        {"wavenumber", p.wavenumber},
        {"impedances", p.impedances},
        {"incident_direction", p.incident_direction},
        {"measure_direction", p.measure_direction},
        {"location_samples", p.location_samples}}},
      {"parameters", params},
      {"matrix_decomposition", DecompositionJson(cfg.matrix)},
      {"rhs_decomposition", DecompositionJson(cfg.rhs)},
      {"greedy",
       {{"max_basis", g.max_basis},
        {"tolerance", g.tolerance},
        {"first_parameter",
         g.first == FirstParameter::DomainCenter ? "domain_center" : "max_rhs_norm"},
        {"projection", g.projection == Projection::Hermitian ? "hermitian" : "transpose"},
        {"residual",
         g.residual == ResidualMode::Orthogonalized ? "orthogonalized" : "gram_expanded"}}},
      {"validation", {{"samples", cfg.validation.samples}, {"seed", cfg.validation.seed}}}};
}

std::shared_ptr<const ProblemProvider> MakeProvider(const ProblemConfig &cfg)
{
  if (cfg.kind == "affine_toy")
  {
    return MakeAffineToyProvider(cfg.n, cfg.domain);
  }
  KernelProblemConfig kc;
  kc.cloud = GenerateSpherePointCloud(cfg.n, cfg.seed);
  kc.domain = cfg.domain;
  kc.wavenumber_index = cfg.domain.IndexOf(cfg.wavenumber);
  for (std::size_t k = 0; k < 3; k++)
  {
    kc.impedance_indices[k] = cfg.domain.IndexOf(cfg.impedances.at(k));
  }
  kc.incident_direction = cfg.incident_direction;
  kc.measure_direction = cfg.measure_direction;
  kc.location_samples = cfg.location_samples;
  return MakeKernelProvider(std::move(kc));
}

NonintrusiveDecomposition BuildDecomposition(const ProblemProvider &provider,
                                             const DecompositionConfig &cfg)
{
  std::vector<ScalarFeature> features;
  for (const auto &f : cfg.features)
  {
    features.push_back(provider.Feature(f));
  }
  if (cfg.kernels.empty())
  {
    return DecomposeAffine(features, provider.Domain(), cfg.d, cfg.zeta_slice);
  }
  std::vector<LocationKernel> kernels;
  for (const auto &k : cfg.kernels)
  {
    kernels.push_back(provider.Kernel(k));
  }
  return DecomposeNonaffine(kernels, provider.Domain(), cfg.d, cfg.dz, cfg.variant,
                            cfg.zeta_slice, features);
}

}  // namespace nirb
