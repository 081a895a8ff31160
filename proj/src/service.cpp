// Copyright the nirb authors.
// SPDX-License-Identifier: Apache-2.0

#include "nirb/service.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>
#define CPPHTTPLIB_LISTEN_BACKLOG 512
#include <httplib.h>
#include "nirb/exploration.hpp"

namespace nirb
{

using nlohmann::json;

namespace
{

struct HttpError
{
  int status;
  std::string message;
};

HttpReply Reply(int status, const json &body)
{
  HttpReply r;
  r.status = status;
  r.body = body.dump();
  return r;
}

json ComplexJson(Complex z)
{
  return {{"re", z.real()}, {"im", z.imag()}};
}

json ParseBody(const std::string &body)
{
  json j;
  try
  {
    j = json::parse(body);
  }
  catch (const json::exception &)
  {
    throw HttpError{400, "request body is not valid JSON"};
  }
  if (!j.is_object())
  {
    throw HttpError{400, "request body must be a JSON object"};
  }
  return j;
}

bool Flag(const json &j, const std::string &key)
{
  if (!j.contains(key))
  {
    return false;
  }
  if (!j[key].is_boolean())
  {
    throw HttpError{400, "'" + key + "' must be a boolean"};
  }
  return j[key].get<bool>();
}

double FiniteNumber(const json &j, const std::string &what)
{
  if (!j.is_number())
  {
    throw HttpError{400, what + " must be a number"};
  }
  const double x = j.get<double>();
  if (!std::isfinite(x))
  {
    throw HttpError{400, what + " must be finite"};
  }
  return x;
}

std::size_t Count(const json &j, const std::string &key, std::size_t fallback, std::size_t cap)
{
  if (!j.contains(key))
  {
    return fallback;
  }
  if (!j[key].is_number_integer() || j[key].get<long long>() < 0)
  {
    throw HttpError{400, "'" + key + "' must be a non-negative integer"};
  }
  const auto v = j[key].get<unsigned long long>();
  if (v > cap)
  {
    throw HttpError{400, "'" + key + "' exceeds the limit of " + std::to_string(cap)};
  }
  return static_cast<std::size_t>(v);
}

void CheckBox(const ParameterDomain &domain, const ParameterPoint &mu, bool allow)
{
  if (!allow && !domain.Contains(mu))
  {
    throw HttpError{422, "parameter values lie outside the model box"};
  }
}

// All names of the domain are required; values outside the box are checked by the caller.
ParameterPoint ParsePoint(const json &j, const ParameterDomain &domain, const std::string &what,
                          const ParameterPoint *base = nullptr)
{
  if (!j.is_object())
  {
    throw HttpError{400, what + " must be an object of named values"};
  }
  std::vector<double> c(domain.Dimension(), std::nan(""));
  if (base)
  {
    c = base->coords;
  }
  for (const auto &[k, v] : j.items())
  {
    std::size_t idx = 0;
    try
    {
      idx = domain.IndexOf(k);
    }
    catch (const DomainError &)
    {
      throw HttpError{400, "unknown parameter '" + k + "'"};
    }
    c[idx] = FiniteNumber(v, "parameter '" + k + "'");
  }
  for (std::size_t i = 0; i < c.size(); i++)
  {
    if (std::isnan(c[i]))
    {
      throw HttpError{400, "missing parameter '" + domain.Range(i).name + "'"};
    }
  }
  return domain.Point(std::move(c));
}

json PointJson(const ParameterPoint &mu)
{
  json o = json::object();
  for (std::size_t i = 0; i < mu.Size(); i++)
  {
    o[mu.names[i]] = mu[i];
  }
  return o;
}

json SolutionJson(const ParameterPoint &mu, const OnlineSolution &s, bool gamma)
{
  json o = {{"parameters", PointJson(mu)},
            {"qoi", ComplexJson(s.qoi)},
            {"error_bound", s.error_bound},
            {"residual_norm", s.residual_norm},
            {"rho_clamped", s.rho_clamped},
            {"extrapolated", s.extrapolated}};
  if (gamma)
  {
    json g = json::array();
    for (Eigen::Index i = 0; i < s.gamma_hat.size(); i++)
    {
      g.push_back(ComplexJson(s.gamma_hat(i)));
    }
    o["gamma_hat"] = g;
  }
  return o;
}

Distribution ParseLaw(const json &j, const std::string &name)
{
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
  {
    throw HttpError{400, "law of '" + name + "' needs a 'kind'"};
  }
  const auto kind = j["kind"].get<std::string>();
  auto field = [&](const char *key)
  {
    if (!j.contains(key))
    {
      throw HttpError{400, "law of '" + name + "' needs '" + key + "'"};
    }
    return FiniteNumber(j[key], "'" + std::string(key) + "' of '" + name + "'");
  };
  Distribution d;
  if (kind == "point")
  {
    d.kind = Distribution::Kind::PointMass;
    d.a = field("value");
  }
  else if (kind == "uniform")
  {
    d.kind = Distribution::Kind::Uniform;
    d.a = field("lo");
    d.b = field("hi");
  }
  else if (kind == "truncated_gaussian")
  {
    d.kind = Distribution::Kind::TruncatedGaussian;
    d.a = field("mean");
    d.b = field("std");
  }
  else if (kind == "truncated_lognormal")
  {
    d.kind = Distribution::Kind::TruncatedLogNormal;
    d.a = field("log_mean");
    d.b = field("log_std");
  }
  else
  {
    throw HttpError{400, "unknown law '" + kind + "' for '" + name + "'"};
  }
  return d;
}

json HistogramJson(const Histogram &h)
{
  return {{"lo", h.lo}, {"hi", h.hi}, {"counts", h.counts}};
}

template <typename F>
HttpReply Guard(const char *route, F &&f)
{
  try
  {
    return f();
  }
  catch (const HttpError &e)
  {
    return Reply(e.status, {{"error", e.message}});
  }
  catch (const DomainError &e)
  {
    return Reply(422, {{"error", e.what()}});
  }
  catch (const std::exception &e)
  {
    static std::mutex log_mutex;
    std::lock_guard<std::mutex> lock(log_mutex);
    std::cerr << "nirb serve: " << route << " failed: " << e.what() << '\n';
    return Reply(500, {{"error", "internal error"}});
  }
}

std::string TimingHeader(double seconds)
{
  std::ostringstream os;
  os << "online;dur=" << seconds * 1e3;
  return os.str();
}

}  // namespace

ModelService::ModelService(std::shared_ptr<const LoadedModel> model, ServiceOptions options)
  : model_(std::move(model)), options_(options)
{
  if (!model_)
  {
    throw Error("service needs a model", "serve");
  }
}

HttpReply ModelService::Handle(const std::string &method, const std::string &path,
                               const std::string &body) const
{
  if (path == "/model/info")
  {
    return method == "GET" ? Info() : Reply(405, {{"error", "use GET"}});
  }
  if (path == "/solve" || path == "/sweep" || path == "/uq" || path == "/cost-scan")
  {
    if (method != "POST")
    {
      return Reply(405, {{"error", "use POST"}});
    }
    if (path == "/solve")
    {
      return Solve(body);
    }
    if (path == "/sweep")
    {
      return Sweep(body);
    }
    if (path == "/uq")
    {
      return Uq(body);
    }
    return CostScan(body);
  }
  return Reply(404, {{"error", "unknown route"}});
}

HttpReply ModelService::Info() const
{
  return Guard("/model/info",
               [&]
               {
                 const auto &m = model_->model;
                 const auto &cfg = model_->config;
                 json params = json::array();
                 for (const auto &r : m.Domain().Ranges())
                 {
                   params.push_back({{"name", r.name},
                                     {"lo", r.lo},
                                     {"hi", r.hi},
                                     {"resolution", r.resolution}});
                 }
                 json info = {{"format_version", kModelFormat},
                              {"problem", cfg.problem.kind},
                              {"n", m.full_size},
                              {"parameters", params},
                              {"nhat", m.BasisSize()},
                              {"dz", {{"matrix", m.MatrixRank()}, {"rhs", m.RhsRank()}}},
                              {"beta_lb", m.beta_lb},
                              {"kernels",
                               {{"matrix", cfg.matrix.kernels}, {"rhs", cfg.rhs.kernels}}},
                              {"features",
                               {{"matrix", cfg.matrix.features}, {"rhs", cfg.rhs.features}}},
                              {"allow_extrapolation", options_.allow_extrapolation}};
                 if (cfg.problem.kind == "kernel")
                 {
                   info["wavenumber"] = cfg.problem.wavenumber;
                   info["impedances"] = cfg.problem.impedances;
                 }
                 return Reply(200, info);
               });
}

HttpReply ModelService::Solve(const std::string &body) const
{
  return Guard("/solve",
               [&]
               {
                 const json j = ParseBody(body);
                 const auto &domain = model_->model.Domain();
                 if (!j.contains("parameters"))
                 {
                   throw HttpError{400, "missing 'parameters'"};
                 }
                 const auto mu = ParsePoint(j["parameters"], domain, "'parameters'");
                 CheckBox(domain, mu,
                          options_.allow_extrapolation || Flag(j, "allow_extrapolation"));
                 const OnlineSolution s = OnlineSolve(model_->model, mu);
                 json out = SolutionJson(mu, s, Flag(j, "include_gamma"));
                 if (Flag(j, "include_timing"))
                 {
                   out["timing"] = {{"online_seconds", s.wall_time}};
                 }
                 HttpReply r = Reply(200, out);
                 r.headers["Server-Timing"] = TimingHeader(s.wall_time);
                 return r;
               });
}

HttpReply ModelService::Sweep(const std::string &body) const
{
  return Guard("/sweep",
               [&]
               {
                 const json j = ParseBody(body);
                 const auto &domain = model_->model.Domain();
                 const bool allow =
                     options_.allow_extrapolation || Flag(j, "allow_extrapolation");
                 std::vector<ParameterPoint> pts;
                 if (j.contains("points"))
                 {
                   if (!j["points"].is_array())
                   {
                     throw HttpError{400, "'points' must be an array"};
                   }
                   if (j["points"].size() > options_.max_sweep_points)
                   {
                     throw HttpError{400, "too many sweep points"};
                   }
                   for (const auto &p : j["points"])
                   {
                     pts.push_back(ParsePoint(p, domain, "sweep point"));
                   }
                 }
                 else
                 {
                   if (!j.contains("axis") || !j["axis"].is_string())
                   {
                     throw HttpError{400, "sweep needs 'points' or an 'axis' name"};
                   }
                   const auto axis_name = j["axis"].get<std::string>();
                   std::size_t axis = 0;
                   try
                   {
                     axis = domain.IndexOf(axis_name);
                   }
                   catch (const DomainError &)
                   {
                     throw HttpError{400, "unknown parameter '" + axis_name + "'"};
                   }
                   const ParameterPoint center = domain.Center();
                   const ParameterPoint base =
                       j.contains("base") ? ParsePoint(j["base"], domain, "'base'", &center)
                                          : center;
                   const double lo =
                       j.contains("lo") ? FiniteNumber(j["lo"], "'lo'") : domain.Range(axis).lo;
                   const double hi =
                       j.contains("hi") ? FiniteNumber(j["hi"], "'hi'") : domain.Range(axis).hi;
                   const std::size_t count =
                       Count(j, "count", 50, options_.max_sweep_points);
                   pts = AxisPoints(base, axis, lo, hi, count);
                 }
                 for (const auto &p : pts)
                 {
                   CheckBox(domain, p, allow);
                 }
                 const bool gamma = Flag(j, "include_gamma");
                 const auto table = nirb::Sweep(model_->model, pts, 1);
                 json entries = json::array();
                 double total = 0.0;
                 for (const auto &e : table)
                 {
                   if (e.solution)
                   {
                     entries.push_back(SolutionJson(e.mu, *e.solution, gamma));
                     total += e.solution->wall_time;
                   }
                   else
                   {
                     entries.push_back({{"parameters", PointJson(e.mu)}, {"error", e.error}});
                   }
                 }
                 HttpReply r = Reply(200, {{"entries", entries}});
                 r.headers["Server-Timing"] = TimingHeader(total);
                 return r;
               });
}

HttpReply ModelService::Uq(const std::string &body) const
{
  return Guard("/uq",
               [&]
               {
                 const json j = ParseBody(body);
                 const auto &domain = model_->model.Domain();
                 std::vector<Distribution> laws;
                 for (const auto &r : domain.Ranges())
                 {
                   laws.push_back({Distribution::Kind::Uniform, r.lo, r.hi});
                 }
                 if (j.contains("distributions"))
                 {
                   if (!j["distributions"].is_object())
                   {
                     throw HttpError{400, "'distributions' must be an object"};
                   }
                   for (const auto &[k, v] : j["distributions"].items())
                   {
                     std::size_t idx = 0;
                     try
                     {
                       idx = domain.IndexOf(k);
                     }
                     catch (const DomainError &)
                     {
                       throw HttpError{400, "unknown parameter '" + k + "'"};
                     }
                     laws[idx] = ParseLaw(v, k);
                   }
                 }
                 const std::size_t samples = Count(j, "samples", 1000, options_.max_uq_samples);
                 const std::size_t bins = Count(j, "bins", 20, options_.max_uq_bins);
                 if (samples < 1 || bins < 1)
                 {
                   throw HttpError{400, "'samples' and 'bins' must be at least 1"};
                 }
                 std::uint64_t seed = 0;
                 if (j.contains("seed"))
                 {
                   if (!j["seed"].is_number_unsigned())
                   {
                     throw HttpError{400, "'seed' must be a non-negative integer"};
                   }
                   seed = j["seed"].get<std::uint64_t>();
                 }
                 const UqResult res = UqHistogram(model_->model, laws, samples, seed, bins);
                 return Reply(200, {{"samples", res.samples},
                                    {"seed", seed},
                                    {"bins", bins},
                                    {"real", HistogramJson(res.real)},
                                    {"imag", HistogramJson(res.imag)},
                                    {"mean", {{"re", res.mean_real}, {"im", res.mean_imag}}}});
               });
}

HttpReply ModelService::CostScan(const std::string &body) const
{
  return Guard("/cost-scan",
               [&]
               {
                 const json j = ParseBody(body);
                 const auto &cfg = model_->config;
                 if (cfg.problem.kind != "kernel")
                 {
                   throw HttpError{400, "the cost scan needs a wavenumber/impedance problem"};
                 }
                 const auto &domain = model_->model.Domain();
                 const bool allow =
                     options_.allow_extrapolation || Flag(j, "allow_extrapolation");
                 auto numbers = [&](const char *key)
                 {
                   if (!j.contains(key) || !j[key].is_array() || j[key].empty())
                   {
                     throw HttpError{400, "'" + std::string(key) + "' must be a non-empty array"};
                   }
                   std::vector<double> v;
                   for (const auto &x : j[key])
                   {
                     v.push_back(FiniteNumber(x, "'" + std::string(key) + "' entry"));
                   }
                   return v;
                 };
                 const auto wavenumbers = numbers("wavenumbers");
                 const auto weights = numbers("weights");
                 if (wavenumbers.size() != weights.size())
                 {
                   throw HttpError{400, "one weight per wavenumber expected"};
                 }
                 const std::size_t kw = domain.IndexOf(cfg.problem.wavenumber);
                 std::vector<std::size_t> kz;
                 std::vector<std::vector<double>> axes;
                 if (!j.contains("impedance_axes") || !j["impedance_axes"].is_object())
                 {
                   throw HttpError{400, "'impedance_axes' must be an object"};
                 }
                 for (const auto &k : j["impedance_axes"].items())
                 {
                   const auto &name = k.key();
                   if (std::find(cfg.problem.impedances.begin(), cfg.problem.impedances.end(),
                                 name) == cfg.problem.impedances.end())
                   {
                     throw HttpError{400, "'" + name + "' is not an impedance parameter"};
                   }
                 }
                 std::size_t cells = 1;
                 for (const auto &name : cfg.problem.impedances)
                 {
                   kz.push_back(domain.IndexOf(name));
                   if (!j["impedance_axes"].contains(name) ||
                       !j["impedance_axes"][name].is_array() ||
                       j["impedance_axes"][name].empty())
                   {
                     throw HttpError{400, "impedance axis '" + name + "' must be a non-empty array"};
                   }
                   std::vector<double> v;
                   for (const auto &x : j["impedance_axes"][name])
                   {
                     v.push_back(FiniteNumber(x, "impedance value"));
                   }
                   cells *= v.size();
                   axes.push_back(std::move(v));
                 }
                 if (cells > options_.max_scan_cells ||
                     cells * wavenumbers.size() > options_.max_scan_cells * 100)
                 {
                   throw HttpError{400, "cost scan too large"};
                 }
                 const ParameterPoint center = domain.Center();
                 const ParameterPoint base =
                     j.contains("base") ? ParsePoint(j["base"], domain, "'base'", &center)
                                        : center;
                 for (double w : wavenumbers)
                 {
                   for (const auto &z1 : axes[0])
                     for (const auto &z2 : axes[1])
                       for (const auto &z3 : axes[2])
                       {
                         ParameterPoint p = base;
                         p.coords[kw] = w;
                         p.coords[kz[0]] = z1;
                         p.coords[kz[1]] = z2;
                         p.coords[kz[2]] = z3;
                         CheckBox(domain, p, allow);
                       }
                 }
                 const auto res =
                     ImpedanceCostScan(model_->model, kw, wavenumbers, weights, kz, axes, base);
                 json out_cells = json::array();
                 for (const auto &c : res.cells)
                 {
                   json imp = json::object();
                   for (std::size_t k = 0; k < 3; k++)
                   {
                     imp[cfg.problem.impedances[k]] = c.impedances[k];
                   }
                   json cell = {{"impedances", imp}};
                   if (c.error.empty())
                   {
                     cell["cost"] = c.cost;
                   }
                   else
                   {
                     cell["cost"] = nullptr;
                     cell["error"] = c.error;
                   }
                   out_cells.push_back(std::move(cell));
                 }
                 const auto &best = res.cells.at(res.argmin);
                 return Reply(200, {{"cells", out_cells},
                                    {"argmin",
                                     {{"index", res.argmin},
                                      {"impedances", out_cells[res.argmin]["impedances"]},
                                      {"cost", best.error.empty() ? json(best.cost) : json()}}}});
               });
}

struct HttpServer::Impl
{
  explicit Impl(const ModelService &s) : service(s) {}
  const ModelService &service;
  httplib::Server server;
  std::thread thread;
};

HttpServer::HttpServer(const ModelService &service)
  : impl_(std::make_unique<Impl>(service))
{
  auto handler = [this](const httplib::Request &req, httplib::Response &res)
  {
    const HttpReply r = impl_->service.Handle(req.method, req.path, req.body);
    res.status = r.status;
    for (const auto &[k, v] : r.headers)
    {
      res.set_header(k, v);
    }
    res.set_content(r.body, "application/json");
  };
  impl_->server.Get(".*", handler);
  impl_->server.Post(".*", handler);
  impl_->server.Put(".*", handler);
  impl_->server.Delete(".*", handler);
}

HttpServer::~HttpServer()
{
  Stop();
}

int HttpServer::Bind(const std::string &host, int port)
{
  if (port == 0)
  {
    return impl_->server.bind_to_any_port(host);
  }
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::Listen()
{
  return impl_->server.listen_after_bind();
}

void HttpServer::Start()
{
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void HttpServer::Stop()
{
  if (impl_->server.is_running())
  {
    impl_->server.stop();
  }
  if (impl_->thread.joinable())
  {
    impl_->thread.join();
  }
}

}  // namespace nirb
