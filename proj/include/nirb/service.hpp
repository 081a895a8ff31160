// Copyright the nirb authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NIRB_SERVICE_HPP
#define NIRB_SERVICE_HPP

#include <map>
#include <memory>
#include <string>
#include "nirb/model_io.hpp"

namespace nirb
{

struct ServiceOptions
{
  bool allow_extrapolation = false;
  std::size_t max_sweep_points = 10000;
  std::size_t max_uq_samples = 200000;
  std::size_t max_uq_bins = 1000;
  std::size_t max_scan_cells = 100000;
};

struct HttpReply
{
  int status = 200;
  std::string body;  // JSON
  std::map<std::string, std::string> headers;
};

//
// Online-stage endpoints as pure request handlers over a shared immutable model:
//   GET  /model/info   domain box, basis size, ranks, inf-sup bound, problem names
//   POST /solve        {"parameters": {name: value}, "allow_extrapolation"?, "include_gamma"?}
//   POST /sweep        {"base": {...}, "axis": name, "lo"?, "hi"?, "count"} or {"points": [...]}
//   POST /uq           {"distributions": {name: law}, "samples", "seed", "bins"?}
//   POST /cost-scan    {"wavenumbers", "weights", "impedance_axes": {name: [...]}, "base"?}
// Errors: 400 malformed input or unknown names, 422 out-of-box values without
// extrapolation, 404 unknown route, 500 internal failure (details logged, not returned).
// Online timings go to the Server-Timing header so bodies are reproducible.
//
class ModelService
{
public:
  ModelService(std::shared_ptr<const LoadedModel> model, ServiceOptions options = {});

  HttpReply Handle(const std::string &method, const std::string &path,
                   const std::string &body) const;

  HttpReply Info() const;
  HttpReply Solve(const std::string &body) const;
  HttpReply Sweep(const std::string &body) const;
  HttpReply Uq(const std::string &body) const;
  HttpReply CostScan(const std::string &body) const;

  const LoadedModel &Model() const { return *model_; }

private:
  std::shared_ptr<const LoadedModel> model_;
  ServiceOptions options_;
};

// HTTP front end for a ModelService.
class HttpServer
{
public:
  explicit HttpServer(const ModelService &service);
  ~HttpServer();
  HttpServer(const HttpServer &) = delete;
  HttpServer &operator=(const HttpServer &) = delete;

  // Binds the socket; port 0 picks a free port. Returns the bound port, or -1.
  int Bind(const std::string &host, int port);

  // Serves until Stop(); blocking.
  bool Listen();

  // Listen() on a background thread; returns once the server accepts connections.
  void Start();
  void Stop();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace nirb

#endif  // NIRB_SERVICE_HPP
