// Copyright the nirb authors.
// SPDX-License-Identifier: Apache-2.0

#include "nirb/model_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <unistd.h>

namespace nirb
{

using nlohmann::json;

namespace
{

json Reals(const std::vector<double> &v)
{
  json a = json::array();
  for (double x : v)
  {
    a.push_back(FormatDecimal(x));
  }
  return a;
}

std::vector<double> RealsFrom(const json &j)
{
  std::vector<double> v;
  for (const auto &x : j)
  {
    v.push_back(ParseDecimal(x.get<std::string>()));
  }
  return v;
}

json Points(const std::vector<ParameterPoint> &pts)
{
  json a = json::array();
  for (const auto &p : pts)
  {
    a.push_back(Reals(p.coords));
  }
  return a;
}

std::vector<ParameterPoint> PointsFrom(const json &j, const ParameterDomain &domain)
{
  std::vector<ParameterPoint> pts;
  for (const auto &p : j)
  {
    pts.push_back(domain.Point(RealsFrom(p)));
  }
  return pts;
}

std::vector<std::size_t> Indices(const json &j)
{
  return j.get<std::vector<std::size_t>>();
}

}  // namespace

json ToJson(const Eigen::MatrixXcd &A)
{
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < A.rows(); i++)
  {
    json rr = json::array(), ri = json::array();
    for (Eigen::Index k = 0; k < A.cols(); k++)
    {
      rr.push_back(FormatDecimal(A(i, k).real()));
      ri.push_back(FormatDecimal(A(i, k).imag()));
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return {{"rows", A.rows()}, {"cols", A.cols()}, {"re", re}, {"im", im}};
}

json ToJson(const Eigen::VectorXcd &v)
{
  json re = json::array(), im = json::array();
  for (Eigen::Index i = 0; i < v.size(); i++)
  {
    re.push_back(FormatDecimal(v(i).real()));
    im.push_back(FormatDecimal(v(i).imag()));
  }
  return {{"re", re}, {"im", im}};
}

Eigen::MatrixXcd MatrixFromJson(const json &j)
{
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto &re = j.at("re");
  const auto &im = j.at("im");
  if (static_cast<Eigen::Index>(re.size()) != rows || static_cast<Eigen::Index>(im.size()) != rows)
  {
    throw ConfigError("matrix row count does not match its shape");
  }
  Eigen::MatrixXcd A(rows, cols);
  for (Eigen::Index i = 0; i < rows; i++)
  {
    if (static_cast<Eigen::Index>(re[i].size()) != cols ||
        static_cast<Eigen::Index>(im[i].size()) != cols)
    {
      throw ConfigError("matrix column count does not match its shape");
    }
    for (Eigen::Index k = 0; k < cols; k++)
    {
      A(i, k) = Complex(ParseDecimal(re[i][k].get<std::string>()),
                        ParseDecimal(im[i][k].get<std::string>()));
    }
  }
  return A;
}

Eigen::VectorXcd VectorFromJson(const json &j)
{
  const auto re = RealsFrom(j.at("re"));
  const auto im = RealsFrom(j.at("im"));
  if (re.size() != im.size())
  {
    throw ConfigError("complex vector parts differ in length");
  }
  Eigen::VectorXcd v(re.size());
  for (std::size_t i = 0; i < re.size(); i++)
  {
    v(i) = Complex(re[i], im[i]);
  }
  return v;
}

json ToJson(const EimModel &m)
{
  return {{"slice", m.slice == Slice::S1 ? "S1" : "S2"},
          {"rank", m.rank},
          {"outer_indices", m.outer_indices},
          {"inner_indices", m.inner_indices},
          {"q", ToJson(m.q)},
          {"snapshots", ToJson(m.snapshots)},
          {"B", ToJson(m.B)},
          {"Gamma", ToJson(m.Gamma)},
          {"Delta", ToJson(m.Delta)},
          {"residual_history", Reals(m.residual_history)},
          {"final_residual", FormatDecimal(m.final_residual)}};
}

EimModel EimModelFromJson(const json &j)
{
  EimModel m;
  const auto slice = j.at("slice").get<std::string>();
  if (slice != "S1" && slice != "S2")
  {
    throw ConfigError("unknown slice '" + slice + "'");
  }
  m.slice = slice == "S1" ? Slice::S1 : Slice::S2;
  m.rank = j.at("rank").get<std::size_t>();
  m.outer_indices = Indices(j.at("outer_indices"));
  m.inner_indices = Indices(j.at("inner_indices"));
  m.q = MatrixFromJson(j.at("q"));
  m.snapshots = MatrixFromJson(j.at("snapshots"));
  m.B = MatrixFromJson(j.at("B"));
  m.Gamma = MatrixFromJson(j.at("Gamma"));
  m.Delta = MatrixFromJson(j.at("Delta"));
  m.residual_history = RealsFrom(j.at("residual_history"));
  m.final_residual = ParseDecimal(j.at("final_residual").get<std::string>());
  const auto r = static_cast<Eigen::Index>(m.rank);
  if (m.outer_indices.size() != m.rank || m.inner_indices.size() != m.rank || m.B.rows() != r ||
      m.B.cols() != r || m.Gamma.rows() != r || m.Gamma.cols() != r || m.q.rows() != r)
  {
    throw ConfigError("inconsistent interpolation model dimensions");
  }
  return m;
}

json ToJson(const NonintrusiveDecomposition &d)
{
  json blocks = json::array();
  for (const auto &b : d.blocks)
  {
    blocks.push_back({{"kernel", b.kernel},
                      {"magic_locations", Reals(b.magic_locations)},
                      {"model", ToJson(b.model)}});
  }
  return {{"block_width", d.block_width},
          {"variant", d.variant == ZVariant::BInverseBased ? "b_inverse" : "delta"},
          {"features", d.features},
          {"blocks", blocks},
          {"zeta", ToJson(d.zeta)},
          {"selected_mu", Points(d.selected_mu)}};
}

NonintrusiveDecomposition DecompositionFromJson(const json &j, const ParameterDomain &domain)
{
  NonintrusiveDecomposition d;
  d.domain = domain;
  d.block_width = j.at("block_width").get<std::size_t>();
  d.variant = j.at("variant").get<std::string>() == "delta" ? ZVariant::DeltaBased
                                                             : ZVariant::BInverseBased;
  d.features = j.at("features").get<std::vector<std::string>>();
  for (const auto &b : j.at("blocks"))
  {
    Stage1Block blk;
    blk.kernel = b.at("kernel").get<std::string>();
    blk.magic_locations = RealsFrom(b.at("magic_locations"));
    blk.model = EimModelFromJson(b.at("model"));
    d.blocks.push_back(std::move(blk));
  }
  d.zeta = EimModelFromJson(j.at("zeta"));
  d.selected_mu = PointsFrom(j.at("selected_mu"), domain);
  if (d.selected_mu.size() != d.zeta.rank)
  {
    throw ConfigError("decomposition parameter count does not match its rank");
  }
  return d;
}

json ModelToJson(const TrainingConfig &cfg, const ReducedBasisModel &m, const Provenance &prov)
{
  json a_hat = json::array(), c_hat = json::array(), G = json::array(), H = json::array();
  for (const auto &x : m.A_hat)
  {
    a_hat.push_back(ToJson(x));
  }
  for (const auto &x : m.C_hat)
  {
    c_hat.push_back(ToJson(x));
  }
  for (const auto &x : m.G)
  {
    G.push_back(ToJson(x));
  }
  for (const auto &x : m.H)
  {
    H.push_back(ToJson(x));
  }
  json rbm = {{"full_size", m.full_size},
              {"snapshot_mu", Points(m.snapshot_mu)},
              {"A_hat", a_hat},
              {"C_hat", c_hat},
              {"G", G},
              {"H", H},
              {"S", ToJson(m.S)},
              {"residual_factor", ToJson(m.residual_factor)},
              {"beta_lb", FormatDecimal(m.beta_lb)},
              {"ell_hat", ToJson(Eigen::VectorXcd(m.ell_hat.transpose()))},
              {"projection", m.projection == Projection::Hermitian ? "hermitian" : "transpose"},
              {"residual_mode", m.residual_mode == ResidualMode::Orthogonalized
                                    ? "orthogonalized"
                                    : "gram_expanded"}};
  if (m.basis)
  {
    rbm["basis"] = ToJson(*m.basis);
  }
  json timings = json::object();
  for (const auto &[k, v] : prov.timings)
  {
    timings[k] = v;
  }
  json provenance = {{"tool_version", prov.tool_version},
                     {"created_at", prov.created_at},
                     {"seed", cfg.problem.seed},
                     {"prng", cfg.problem.prng},
                     {"d", {{"matrix", cfg.matrix.d}, {"rhs", cfg.rhs.d}}},
                     {"dz", {{"matrix", m.MatrixRank()}, {"rhs", m.RhsRank()}}},
                     {"nhat", m.BasisSize()},
                     {"beta_lb", FormatDecimal(m.beta_lb)},
                     {"timings", timings}};
  return {{"format_version", kModelFormat},
          {"config", ToJson(cfg)},
          {"decompositions",
           {{"matrix", ToJson(m.matrix_decomp)}, {"rhs", ToJson(m.rhs_decomp)}}},
          {"rbm", rbm},
          {"provenance", provenance}};
}

void WriteFileAtomic(const std::string &path, const std::string &contents)
{
  namespace fs = std::filesystem;
  const fs::path target(path);
  const fs::path tmp = target.parent_path() /
                       (target.filename().string() + ".tmp." + std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out)
    {
      throw Error("cannot write '" + tmp.string() + "'", "io");
    }
    out << contents;
    out.flush();
    if (!out)
    {
      out.close();
      fs::remove(tmp);
      throw Error("failed writing '" + tmp.string() + "'", "io");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec)
  {
    fs::remove(tmp);
    throw Error("cannot move model into '" + path + "': " + ec.message(), "io");
  }
}

void SaveModel(const std::string &path, const json &doc)
{
  WriteFileAtomic(path, doc.dump(1) + "\n");
}

LoadedModel ModelFromJson(const json &doc, std::shared_ptr<const ProblemProvider> provider)
{
  try
  {
    if (!doc.contains("format_version") || doc["format_version"] != kModelFormat)
    {
      throw ConfigError("unsupported model format (expected " + std::string(kModelFormat) + ")");
    }
    LoadedModel lm;
    lm.config = ParseTrainingConfig(doc.at("config"));
    lm.provider = provider ? std::move(provider) : MakeProvider(lm.config.problem);
    const auto &domain = lm.config.problem.domain;
    auto &m = lm.model;
    m.matrix_decomp = DecompositionFromJson(doc.at("decompositions").at("matrix"), domain);
    m.rhs_decomp = DecompositionFromJson(doc.at("decompositions").at("rhs"), domain);
    m.matrix_decomp.Bind(*lm.provider);
    m.rhs_decomp.Bind(*lm.provider);

    const auto &r = doc.at("rbm");
    m.full_size = r.at("full_size").get<std::size_t>();
    m.snapshot_mu = PointsFrom(r.at("snapshot_mu"), domain);
    for (const auto &x : r.at("A_hat"))
    {
      m.A_hat.push_back(MatrixFromJson(x));
    }
    for (const auto &x : r.at("C_hat"))
    {
      m.C_hat.push_back(VectorFromJson(x));
    }
    for (const auto &x : r.at("G"))
    {
      m.G.push_back(MatrixFromJson(x));
    }
    for (const auto &x : r.at("H"))
    {
      m.H.push_back(VectorFromJson(x));
    }
    m.S = MatrixFromJson(r.at("S"));
    m.residual_factor = MatrixFromJson(r.at("residual_factor"));
    m.beta_lb = ParseDecimal(r.at("beta_lb").get<std::string>());
    m.ell_hat = VectorFromJson(r.at("ell_hat")).transpose();
    m.projection = r.at("projection").get<std::string>() == "transpose" ? Projection::Transpose
                                                                        : Projection::Hermitian;
    m.residual_mode = r.at("residual_mode").get<std::string>() == "gram_expanded"
                          ? ResidualMode::GramExpanded
                          : ResidualMode::Orthogonalized;
    if (r.contains("basis"))
    {
      m.basis = MatrixFromJson(r["basis"]);
    }
    const auto nb = static_cast<Eigen::Index>(m.BasisSize());
    if (m.A_hat.size() != m.matrix_decomp.Rank() || m.C_hat.size() != m.rhs_decomp.Rank() ||
        !(m.beta_lb > 0.0) || m.ell_hat.size() != nb)
    {
      throw ConfigError("inconsistent reduced-basis section");
    }
    for (const auto &A : m.A_hat)
    {
      if (A.rows() != nb || A.cols() != nb)
      {
        throw ConfigError("inconsistent reduced operator size");
      }
    }
    const auto rcols = static_cast<Eigen::Index>(m.A_hat.size()) * nb +
                       static_cast<Eigen::Index>(m.C_hat.size());
    if (m.residual_factor.cols() != rcols || m.residual_factor.rows() > rcols)
    {
      throw ConfigError("inconsistent residual factor size");
    }
    PrepareOnline(m);
    lm.provenance = doc.value("provenance", json::object());
    return lm;
  }
  catch (const json::exception &e)
  {
    throw ConfigError(std::string("malformed model file: ") + e.what());
  }
}

LoadedModel LoadModel(const std::string &path, std::shared_ptr<const ProblemProvider> provider)
{
  std::ifstream in(path);
  if (!in)
  {
    throw ConfigError("cannot open model '" + path + "'");
  }
  json doc;
  try
  {
    doc = json::parse(in);
  }
  catch (const json::exception &e)
  {
    throw ConfigError("'" + path + "' is not valid JSON: " + e.what());
  }
  return ModelFromJson(doc, std::move(provider));
}

namespace
{

bool AsDecimal(const json &j, double &x)
{
  if (j.is_number())
  {
    x = j.get<double>();
    return true;
  }
  if (!j.is_string())
  {
    return false;
  }
  try
  {
    x = ParseDecimal(j.get<std::string>());
    return true;
  }
  catch (const Error &)
  {
    return false;
  }
}

void Compare(const json &a, const json &b, const std::string &path, double tol,
             std::vector<std::string> &diffs)
{
  if (diffs.size() >= 50)
  {
    return;
  }
  if (path == "/provenance/created_at" || path == "/provenance/timings")
  {
    return;
  }
  double x = 0.0, y = 0.0;
  if (AsDecimal(a, x) && AsDecimal(b, y))
  {
    const bool same = (x == y) || std::abs(x - y) <= tol * std::max(std::abs(x), std::abs(y));
    if (!same)
    {
      diffs.push_back(path + ": " + FormatDecimal(x) + " vs " + FormatDecimal(y));
    }
    return;
  }
  if (a.type() != b.type())
  {
    diffs.push_back(path + ": type differs");
    return;
  }
  if (a.is_object())
  {
    for (const auto &[k, v] : a.items())
    {
      if (!b.contains(k))
      {
        if (path + "/" + k != "/provenance/created_at" && path + "/" + k != "/provenance/timings")
        {
          diffs.push_back(path + "/" + k + ": missing in second document");
        }
        continue;
      }
      Compare(v, b[k], path + "/" + k, tol, diffs);
    }
    for (const auto &[k, v] : b.items())
    {
      if (!a.contains(k))
      {
        diffs.push_back(path + "/" + k + ": missing in first document");
      }
    }
    return;
  }
  if (a.is_array())
  {
    if (a.size() != b.size())
    {
      diffs.push_back(path + ": length " + std::to_string(a.size()) + " vs " +
                      std::to_string(b.size()));
      return;
    }
    for (std::size_t i = 0; i < a.size(); i++)
    {
      Compare(a[i], b[i], path + "/" + std::to_string(i), tol, diffs);
    }
    return;
  }
  if (a != b)
  {
    diffs.push_back(path + ": " + a.dump() + " vs " + b.dump());
  }
}

}  // namespace

std::vector<std::string> CompareModelDocuments(const json &a, const json &b, double rel_tol)
{
  std::vector<std::string> diffs;
  Compare(a, b, "", rel_tol, diffs);
  return diffs;
}

}  // namespace nirb
