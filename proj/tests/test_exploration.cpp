// Copyright the nirb authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numeric>
#include <catch_amalgamated.hpp>
#include "nirb/exploration.hpp"
#include "test_support.hpp"

using namespace nirb;

namespace
{

std::vector<Distribution> BoxLaws(const ParameterDomain &d)
{
  std::vector<Distribution> laws;
  for (const auto &r : d.Ranges())
  {
    laws.push_back({Distribution::Kind::Uniform, r.lo, r.hi});
  }
  return laws;
}

std::vector<double> Linspace(double lo, double hi, std::size_t n)
{
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; i++)
  {
    v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

}  // namespace

TEST_CASE("Axis points", "[exploration]")
{
  const ParameterDomain d({{"a", 0.0, 1.0, 2}, {"b", 2.0, 3.0, 2}});
  const auto pts = AxisPoints(d.Point({0.5, 2.5}), 1, 2.0, 3.0, 5);
  REQUIRE(pts.size() == 5);
  CHECK(pts.front()[1] == 2.0);
  CHECK(pts.back()[1] == 3.0);
  for (const auto &p : pts)
  {
    CHECK(p[0] == 0.5);
  }
  CHECK(AxisPoints(d.Center(), 0, 0.0, 1.0, 0).empty());
}

TEST_CASE("Sweeps", "[exploration][kernel]")
{
  const auto &m = test::KernelModel().result.model;
  CHECK(Sweep(m, {}).empty());

  const auto pts = AxisPoints(m.Domain().Center(), 0, 5.0, 10.0, 50);
  const auto serial = Sweep(m, pts, 1);
  const auto parallel = Sweep(m, pts, 6);
  REQUIRE(serial.size() == 50);
  for (std::size_t i = 0; i < pts.size(); i++)
  {
    CHECK(serial[i].mu == pts[i]);
    REQUIRE(serial[i].solution.has_value());
    CHECK(serial[i].solution->error_bound >= 0.0);
    CHECK(parallel[i].solution->qoi == serial[i].solution->qoi);
    CHECK(parallel[i].solution->error_bound == serial[i].solution->error_bound);
  }
}

TEST_CASE("Parameter draws", "[exploration]")
{
  const ParameterDomain d({{"a", 1.0, 5.0, 2}, {"b", 1.0, 5.0, 2}, {"c", 1.0, 5.0, 2}});
  const std::vector<Distribution> laws = {{Distribution::Kind::TruncatedGaussian, 3.0, 1.0},
                                          {Distribution::Kind::Uniform, 1.0, 5.0},
                                          {Distribution::Kind::TruncatedLogNormal, 0.5, 0.5}};
  const auto x = DrawParameters(d, laws, 5000, 1);
  const auto y = DrawParameters(d, laws, 5000, 1);
  const auto z = DrawParameters(d, laws, 5000, 2);
  CHECK(x == y);
  CHECK(x != z);
  double mean[3] = {0, 0, 0};
  for (const auto &p : x)
  {
    CHECK(d.Contains(p, 0.0));
    for (int k = 0; k < 3; k++)
    {
      mean[k] += p[k] / 5000.0;
    }
  }
  // Symmetric truncation keeps the Gaussian mean; the uniform law has mean 3.
  CHECK(std::abs(mean[0] - 3.0) < 0.05);
  CHECK(std::abs(mean[1] - 3.0) < 0.1);

  const std::vector<Distribution> point = {{Distribution::Kind::PointMass, 2.0, 0.0},
                                           {Distribution::Kind::PointMass, 3.0, 0.0},
                                           {Distribution::Kind::PointMass, 4.0, 0.0}};
  for (const auto &p : DrawParameters(d, point, 10, 3))
  {
    CHECK(p.coords == std::vector<double>{2.0, 3.0, 4.0});
  }
  CHECK_THROWS(DrawParameters(d, {laws[0]}, 10, 1));
}

TEST_CASE("Uncertainty propagation histograms", "[exploration][kernel]")
{
  const auto &t = test::KernelModel();
  const auto &m = t.result.model;

  SECTION("point masses give a single occupied bin")
  {
    std::vector<Distribution> laws;
    for (double v : {7.0, 2.0, 3.0, 4.0})
    {
      laws.push_back({Distribution::Kind::PointMass, v, 0.0});
    }
    const auto res = UqHistogram(m, laws, 200, 5, 10);
    CHECK(res.samples == 200);
    for (const auto &q : res.qoi)
    {
      CHECK(q == res.qoi.front());
    }
    for (const auto *h : {&res.real, &res.imag})
    {
      REQUIRE(h->counts.size() == 10);
      CHECK(std::count_if(h->counts.begin(), h->counts.end(), [](auto c) { return c > 0; }) == 1);
      CHECK(std::accumulate(h->counts.begin(), h->counts.end(), std::size_t{0}) == 200);
    }
  }

  SECTION("seed repeatability")
  {
    const auto a = UqHistogram(m, BoxLaws(m.Domain()), 2000, 11);
    const auto b = UqHistogram(m, BoxLaws(m.Domain()), 2000, 11);
    CHECK(a.real.counts == b.real.counts);
    CHECK(a.imag.counts == b.imag.counts);
    CHECK(a.mean_real == b.mean_real);
    CHECK(a.qoi == b.qoi);
  }

  SECTION("mean against truth solves on a subsample")
  {
    const std::size_t n = 10000, sub = 200;
    const auto res = UqHistogram(m, BoxLaws(m.Domain()), n, 2024);
    REQUIRE(res.points.size() == n);
    double sum = 0.0, sum2 = 0.0, rb_sub = 0.0;
    for (std::size_t i = 0; i < sub; i++)
    {
      const auto &mu = res.points[i * (n / sub)];
      const double v = t.provider->OutputFunctional().dot(TruthSolve(*t.provider, mu)).real();
      sum += v;
      sum2 += v * v;
      rb_sub += res.qoi[i * (n / sub)].real();
    }
    const double mean = sum / sub;
    const double sigma = std::sqrt(std::max(0.0, sum2 / sub - mean * mean));
    // Reduced and truth outputs agree pointwise on the subsample.
    CHECK(std::abs(rb_sub / sub - mean) <= 0.02 * sigma + 1e-12);
    // Full reduced mean within three standard errors of the subsample mean.
    const double se = sigma * std::sqrt(1.0 / sub + 1.0 / n);
    INFO("reduced mean " << res.mean_real << ", truth subsample mean " << mean << ", se " << se);
    CHECK(std::abs(res.mean_real - mean) <= 3.0 * se);
  }
}

TEST_CASE("Impedance cost scan", "[exploration][kernel]")
{
  const auto &m = test::KernelModel().result.model;
  const auto &dom = m.Domain();
  const auto wavenumbers = Linspace(5.0, 10.0, 20);
  std::vector<double> weights;
  for (int i = 1; i <= 20; i++)
  {
    weights.push_back(i <= 7 ? 2.0 : (i <= 13 ? 1.0 : 3.0));
  }
  const auto axis = Linspace(1.0, 5.0, 10);
  const auto res = ImpedanceCostScan(m, 0, wavenumbers, weights, {1, 2, 3}, {axis, axis, axis},
                                     dom.Center());
  REQUIRE(res.cells.size() == 1000);

  // Replay: brute-force minimum through independent online solves.
  double best = std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t c = 0; c < res.cells.size(); c++)
  {
    const auto &z = res.cells[c].impedances;
    double cost = (0.2 / std::sqrt(z[0]) + 0.3 * std::pow(z[1], -0.8) + 0.5 / z[2]) / 6.0 - 8.0;
    for (std::size_t i = 0; i < wavenumbers.size(); i++)
    {
      const auto s = OnlineSolve(m, dom.Point({wavenumbers[i], z[0], z[1], z[2]}));
      cost += weights[i] * std::norm(s.qoi);
    }
    CHECK(std::abs(cost - res.cells[c].cost) <= 1e-12 * std::abs(cost));
    if (cost < best)
    {
      best = cost;
      arg = c;
    }
  }
  CHECK(res.argmin == arg);

  SECTION("zero weights leave the penalty alone")
  {
    const std::vector<double> zero(20, 0.0);
    const auto r0 = ImpedanceCostScan(m, 0, wavenumbers, zero, {1, 2, 3}, {axis, axis, axis},
                                      dom.Center());
    CHECK(r0.cells[r0.argmin].impedances == std::vector<double>{5.0, 5.0, 5.0});
  }
  SECTION("argument checks")
  {
    CHECK_THROWS_AS(ImpedanceCostScan(m, 0, wavenumbers, {1.0}, {1, 2, 3}, {axis, axis, axis},
                                      dom.Center()),
                    LengthMismatch);
    CHECK_THROWS_AS(ImpedanceCostScan(m, 0, wavenumbers, weights, {0, 2, 3}, {axis, axis, axis},
                                      dom.Center()),
                    DomainError);
  }
}
