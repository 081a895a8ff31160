// Copyright the nirb authors.
// SPDX-License-Identifier: Apache-2.0

#include "nirb/exploration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>
#include "nirb/random.hpp"

namespace nirb
{

std::vector<SweepEntry> Sweep(const ReducedBasisModel &model,
                              const std::vector<ParameterPoint> &points, std::size_t threads)
{
  std::vector<SweepEntry> out(points.size());
  auto work = [&](std::size_t begin, std::size_t stride)
  {
    for (std::size_t i = begin; i < points.size(); i += stride)
    {
      out[i].mu = points[i];
      try
      {
        out[i].solution = OnlineSolve(model, points[i]);
      }
      catch (const std::exception &e)
      {
        out[i].error = e.what();
      }
    }
  };
  if (threads == 0)
  {
    threads = std::max(1u, std::thread::hardware_concurrency());
  }
  threads = std::min(threads, std::max<std::size_t>(1, points.size() / 16));
  if (threads <= 1)
  {
    work(0, 1);
    return out;
  }
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; t++)
  {
    pool.emplace_back(work, t, threads);
  }
  for (auto &t : pool)
  {
    t.join();
  }
  return out;
}

std::vector<ParameterPoint> AxisPoints(const ParameterPoint &base, std::size_t axis, double lo,
                                       double hi, std::size_t count)
{
  if (axis >= base.Size())
  {
    throw DomainError("sweep axis out of range");
  }
  std::vector<ParameterPoint> pts;
  for (std::size_t j = 0; j < count; j++)
  {
    ParameterPoint p = base;
    p.coords[axis] = count == 1 ? lo
                                : lo + (hi - lo) * static_cast<double>(j) /
                                           static_cast<double>(count - 1);
    if (j + 1 == count && count > 1)
    {
      p.coords[axis] = hi;
    }
    pts.push_back(std::move(p));
  }
  return pts;
}

namespace
{

constexpr int kMaxRejections = 100000;

double Draw(SplitMix64 &rng, const Distribution &dist, const ParameterRange &range)
{
  switch (dist.kind)
  {
    case Distribution::Kind::PointMass:
      if (dist.a < range.lo || dist.a > range.hi)
      {
        throw DomainError("point mass for '" + range.name + "' lies outside the box");
      }
      return dist.a;
    case Distribution::Kind::Uniform:
    {
      const double lo = std::max(dist.a, range.lo);
      const double hi = std::min(dist.b, range.hi);
      if (!(lo <= hi))
      {
        throw DomainError("uniform law for '" + range.name + "' does not meet the box");
      }
      return rng.Uniform(lo, hi);
    }
    case Distribution::Kind::TruncatedGaussian:
    case Distribution::Kind::TruncatedLogNormal:
    {
      if (!(dist.b > 0.0))
      {
        throw DomainError("standard deviation for '" + range.name + "' must be positive");
      }
      for (int t = 0; t < kMaxRejections; t++)
      {
        double x = dist.a + dist.b * rng.Normal();
        if (dist.kind == Distribution::Kind::TruncatedLogNormal)
        {
          x = std::exp(x);
        }
        if (x >= range.lo && x <= range.hi)
        {
          return x;
        }
      }
      throw DomainError("truncation of the law for '" + range.name +
                        "' rejects almost every draw");
    }
  }
  return dist.a;
}

Histogram MakeHistogram(const std::vector<double> &values, std::size_t bins)
{
  Histogram h;
  h.counts.assign(bins, 0);
  if (values.empty())
  {
    return h;
  }
  const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
  h.lo = *mn;
  h.hi = *mx;
  const double width = h.hi - h.lo;
  for (double v : values)
  {
    std::size_t b = 0;
    if (width > 0.0)
    {
      b = static_cast<std::size_t>(std::floor((v - h.lo) / width * static_cast<double>(bins)));
      b = std::min(b, bins - 1);
    }
    h.counts[b]++;
  }
  return h;
}

}  // namespace

std::vector<ParameterPoint> DrawParameters(const ParameterDomain &domain,
                                           const std::vector<Distribution> &dists,
                                           std::size_t n_samples, std::uint64_t seed)
{
  if (dists.size() != domain.Dimension())
  {
    throw LengthMismatch("one distribution per parameter expected");
  }
  SplitMix64 rng(seed);
  std::vector<ParameterPoint> pts;
  pts.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; i++)
  {
    std::vector<double> c(dists.size());
    for (std::size_t k = 0; k < dists.size(); k++)
    {
      c[k] = Draw(rng, dists[k], domain.Range(k));
    }
    pts.push_back(domain.Point(std::move(c)));
  }
  return pts;
}

UqResult UqHistogram(const ReducedBasisModel &model, const std::vector<Distribution> &dists,
                     std::size_t n_samples, std::uint64_t seed, std::size_t bins)
{
  if (n_samples < 1 || bins < 1)
  {
    throw DomainError("UQ study needs at least one sample and one bin");
  }
  UqResult res;
  res.points = DrawParameters(model.Domain(), dists, n_samples, seed);
  res.samples = n_samples;
  std::vector<double> re, im;
  for (const auto &mu : res.points)
  {
    const Complex q = OnlineSolve(model, mu).qoi;
    res.qoi.push_back(q);
    re.push_back(q.real());
    im.push_back(q.imag());
  }
  for (std::size_t i = 0; i < n_samples; i++)
  {
    res.mean_real += re[i];
    res.mean_imag += im[i];
  }
  res.mean_real /= static_cast<double>(n_samples);
  res.mean_imag /= static_cast<double>(n_samples);
  res.real = MakeHistogram(re, bins);
  res.imag = MakeHistogram(im, bins);
  return res;
}

double ImpedancePenalty(double mu1, double mu2, double mu3)
{
  return (0.2 * std::pow(mu1, -0.5) + 0.3 * std::pow(mu2, -0.8) + 0.5 / mu3) / 6.0 - 8.0;
}

CostScanResult ImpedanceCostScan(const ReducedBasisModel &model, std::size_t wavenumber_index,
                                 const std::vector<double> &wavenumbers,
                                 const std::vector<double> &weights,
                                 const std::vector<std::size_t> &impedance_indices,
                                 const std::vector<std::vector<double>> &impedance_axes,
                                 const ParameterPoint &base)
{
  if (wavenumbers.size() != weights.size())
  {
    throw LengthMismatch("one weight per wavenumber expected");
  }
  if (impedance_indices.size() != 3 || impedance_axes.size() != 3)
  {
    throw LengthMismatch("the cost scan runs over three impedance coordinates");
  }
  for (auto k : impedance_indices)
  {
    if (k >= base.Size() || k == wavenumber_index)
    {
      throw DomainError("invalid impedance coordinate index");
    }
  }
  if (wavenumber_index >= base.Size())
  {
    throw DomainError("invalid wavenumber coordinate index");
  }
  CostScanResult res;
  double best = std::numeric_limits<double>::infinity();
  for (double z1 : impedance_axes[0])
  {
    for (double z2 : impedance_axes[1])
    {
      for (double z3 : impedance_axes[2])
      {
        CostScanCell cell;
        cell.impedances = {z1, z2, z3};
        try
        {
          ParameterPoint mu = base;
          mu.coords[impedance_indices[0]] = z1;
          mu.coords[impedance_indices[1]] = z2;
          mu.coords[impedance_indices[2]] = z3;
          std::vector<Complex> qoi;
          for (double w : wavenumbers)
          {
            mu.coords[wavenumber_index] = w;
            qoi.push_back(OnlineSolve(model, mu).qoi);
          }
          cell.cost = CostFunction(qoi, weights, ImpedancePenalty(z1, z2, z3));
          if (cell.cost < best)
          {
            best = cell.cost;
            res.argmin = res.cells.size();
          }
        }
        catch (const std::exception &e)
        {
          cell.error = e.what();
          cell.cost = std::numeric_limits<double>::quiet_NaN();
        }
        res.cells.push_back(std::move(cell));
      }
    }
  }
  return res;
}

}  // namespace nirb
