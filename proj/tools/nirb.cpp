// Copyright the nirb authors.
// SPDX-License-Identifier: Apache-2.0

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <CLI11.hpp>
#include "nirb/model_io.hpp"
#include "nirb/service.hpp"
#include "nirb/training.hpp"

namespace
{

namespace fs = std::filesystem;

constexpr int kExitConfig = 2;
constexpr int kExitStage = 3;

std::string UtcNow()
{
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// "<dir>/<stem>.model.json" -> "<dir>/<stem>"
std::string OutputStem(const std::string &model_path)
{
  std::string s = model_path;
  for (const char *suffix : {".model.json", ".json"})
  {
    const std::string suf(suffix);
    if (s.size() > suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0)
    {
      return s.substr(0, s.size() - suf.size());
    }
  }
  return s;
}

int Fail(int code, const std::string &stage, const std::string &msg)
{
  std::cerr << "nirb: " << (stage.empty() ? "" : "[" + stage + "] ") << msg << '\n';
  return code;
}

int Train(const std::string &config_path, std::string out, bool include_basis)
{
  nirb::TrainingConfig cfg;
  std::shared_ptr<const nirb::ProblemProvider> provider;
  try
  {
    cfg = nirb::LoadTrainingConfig(config_path);
    provider = nirb::MakeProvider(cfg.problem);
  }
  catch (const nirb::Error &e)
  {
    return Fail(kExitConfig, "config", e.what());
  }
  const std::string default_name = fs::path(config_path).stem().string() + ".model.json";
  if (out.empty())
  {
    out = default_name;
  }
  else if (fs::is_directory(out))
  {
    out = (fs::path(out) / default_name).string();
  }
  const std::string stem = OutputStem(out);

  try
  {
    cfg.greedy.keep_basis = true;
    auto res = nirb::Train(cfg, *provider,
                           [](const std::string &m) { std::cerr << "nirb: " << m << '\n'; });
    for (const auto &line : res.log)
    {
      std::cerr << "nirb: greedy: " << line << '\n';
    }

    const auto t0 = std::chrono::steady_clock::now();
    const auto samples = nirb::RandomPoints(provider->Domain(), cfg.validation.samples,
                                            cfg.validation.seed);
    const auto validation = nirb::ValidateModel(*provider, res.model, samples, 10);
    res.timings["validation"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (!include_basis)
    {
      res.model.basis.reset();
    }
    nirb::Provenance prov;
    prov.created_at = UtcNow();
    prov.timings = res.timings;
    cfg.greedy.keep_basis = false;
    nirb::SaveModel(out, nirb::ModelToJson(cfg, res.model, prov));

    std::ostringstream trace, report;
    const auto names = provider->Domain().Names();
    nirb::WriteGreedyTraceCsv(trace, names, res.trace);
    validation.WriteCsv(report, names);
    nirb::WriteFileAtomic(stem + ".greedy.csv", trace.str());
    nirb::WriteFileAtomic(stem + ".validation.csv", report.str());

    std::cout << "model: " << out << '\n'
              << "basis size: " << res.model.BasisSize() << " (" << res.stop_reason << ")\n"
              << "max decomposition error: matrix "
              << nirb::FormatDecimal(validation.max_rel_err_matrix) << ", rhs "
              << nirb::FormatDecimal(validation.max_rel_err_rhs) << '\n'
              << "max reduced relative error: "
              << nirb::FormatDecimal(validation.max_rb_rel_error) << '\n'
              << "bound violations: " << validation.bound_violations << '\n';
  }
  catch (const nirb::ConfigError &e)
  {
    return Fail(kExitConfig, e.Stage(), e.what());
  }
  catch (const nirb::Error &e)
  {
    return Fail(kExitStage, e.Stage(), e.what());
  }
  return 0;
}

int Validate(const std::string &model_path, std::size_t samples, bool grid, std::uint64_t seed,
             std::string out)
{
  try
  {
    const auto lm = nirb::LoadModel(model_path);
    const auto &domain = lm.model.Domain();
    const auto points = grid ? domain.TrialGrid() : nirb::RandomPoints(domain, samples, seed);
    const auto v = nirb::ValidateModel(*lm.provider, lm.model, points, 10);
    if (out.empty())
    {
      out = OutputStem(model_path) + ".validation.csv";
    }
    std::ostringstream os;
    v.WriteCsv(os, domain.Names());
    nirb::WriteFileAtomic(out, os.str());
    std::cout << "report: " << out << '\n'
              << "rows: " << v.rows.size() << '\n'
              << "max reduced relative error: " << nirb::FormatDecimal(v.max_rb_rel_error)
              << '\n'
              << "bound violations: " << v.bound_violations << '\n';
  }
  catch (const nirb::ConfigError &e)
  {
    return Fail(kExitConfig, e.Stage(), e.what());
  }
  catch (const nirb::Error &e)
  {
    return Fail(kExitStage, e.Stage(), e.what());
  }
  return 0;
}

int Serve(const std::string &model_path, const std::string &bind, bool allow_extrapolation)
{
  std::shared_ptr<const nirb::LoadedModel> lm;
  try
  {
    lm = std::make_shared<const nirb::LoadedModel>(nirb::LoadModel(model_path));
  }
  catch (const nirb::Error &e)
  {
    return Fail(kExitConfig, e.Stage(), e.what());
  }
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos)
  {
    return Fail(kExitConfig, "serve", "bind address must be host:port");
  }
  const std::string host = bind.substr(0, colon);
  int port = 0;
  try
  {
    port = std::stoi(bind.substr(colon + 1));
  }
  catch (const std::exception &)
  {
    return Fail(kExitConfig, "serve", "invalid port in '" + bind + "'");
  }
  nirb::ServiceOptions opts;
  opts.allow_extrapolation = allow_extrapolation;
  const nirb::ModelService service(lm, opts);
  nirb::HttpServer server(service);
  const int bound = server.Bind(host, port);
  if (bound < 0)
  {
    return Fail(1, "serve", "cannot bind " + bind);
  }
  std::cerr << "nirb: serving " << model_path << " on " << host << ':' << bound << '\n';
  return server.Listen() ? 0 : 1;
}

int Compare(const std::string &a, const std::string &b)
{
  auto read = [](const std::string &p)
  {
    std::ifstream in(p);
    if (!in)
    {
      throw nirb::ConfigError("cannot open '" + p + "'");
    }
    return nlohmann::json::parse(in);
  };
  try
  {
    const auto diffs = nirb::CompareModelDocuments(read(a), read(b));
    for (const auto &d : diffs)
    {
      std::cout << d << '\n';
    }
    std::cout << (diffs.empty() ? "identical" : "different") << '\n';
    return diffs.empty() ? 0 : 1;
  }
  catch (const std::exception &e)
  {
    return Fail(kExitConfig, "compare", e.what());
  }
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Nonintrusive reduced-basis toolkit"};
  app.require_subcommand(1);

  std::string config, model, out, bind = "127.0.0.1:8080", other;
  bool include_basis = false, grid = false, allow_extrapolation = false;
  std::size_t samples = 20;
  std::uint64_t seed = 11;

  auto *train = app.add_subcommand("train", "Run decompositions, greedy and validation");
  train->add_option("config", config, "Training configuration (JSON)")->required();
  train->add_option("--out", out, "Model file path or directory (default <config stem>.model.json)");
  train->add_flag("--include-basis", include_basis, "Store the full-size basis in the model");

  auto *validate = app.add_subcommand("validate", "Compare reduced and truth solutions");
  validate->add_option("model", model, "Model file")->required();
  auto *opt_samples = validate->add_option("--samples", samples, "Random sample count");
  auto *opt_grid = validate->add_flag("--grid", grid, "Use the full trial grid");
  opt_samples->excludes(opt_grid);
  validate->add_option("--seed", seed, "Sampling seed");
  validate->add_option("--out", out, "CSV report path");

  auto *serve = app.add_subcommand("serve", "Serve the online stage over HTTP");
  serve->add_option("model", model, "Model file")->required();
  serve->add_option("--bind", bind, "host:port");
  serve->add_flag("--allow-extrapolation", allow_extrapolation,
                  "Accept parameters outside the training box");

  auto *compare = app.add_subcommand("compare", "Numerically compare two model files");
  compare->add_option("first", model, "Model file")->required();
  compare->add_option("second", other, "Model file")->required();

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  if (*train)
  {
    return Train(config, out, include_basis);
  }
  if (*validate)
  {
    return Validate(model, samples, grid, seed, out);
  }
  if (*serve)
  {
    return Serve(model, bind, allow_extrapolation);
  }
  return Compare(model, other);
}
