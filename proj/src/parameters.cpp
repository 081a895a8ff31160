// Copyright the nirb authors.
// SPDX-License-Identifier: Apache-2.0

#include "nirb/parameters.hpp"

#include <cmath>
#include <set>
#include "nirb/errors.hpp"

namespace nirb
{

double ParameterPoint::Get(const std::string &name) const
{
  for (std::size_t i = 0; i < names.size(); i++)
  {
    if (names[i] == name)
    {
      return coords[i];
    }
  }
  throw DomainError("unknown parameter '" + name + "'");
}

ParameterDomain::ParameterDomain(std::vector<ParameterRange> ranges) : ranges_(std::move(ranges))
{
  if (ranges_.empty())
  {
    throw ConfigError("parameter domain needs at least one coordinate");
  }
  std::set<std::string> seen;
  for (const auto &r : ranges_)
  {
    if (r.name.empty() || !seen.insert(r.name).second)
    {
      throw ConfigError("parameter names must be non-empty and unique ('" + r.name + "')");
    }
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi) || !(r.lo < r.hi))
    {
      throw ConfigError("parameter '" + r.name + "' needs finite lo < hi");
    }
    if (r.resolution < 1)
    {
      throw ConfigError("parameter '" + r.name + "' needs a positive resolution");
    }
  }
}

std::vector<std::string> ParameterDomain::Names() const
{
  std::vector<std::string> names;
  names.reserve(ranges_.size());
  for (const auto &r : ranges_)
  {
    names.push_back(r.name);
  }
  return names;
}

std::size_t ParameterDomain::IndexOf(const std::string &name) const
{
  for (std::size_t i = 0; i < ranges_.size(); i++)
  {
    if (ranges_[i].name == name)
    {
      return i;
    }
  }
  throw DomainError("unknown parameter '" + name + "'");
}

ParameterPoint ParameterDomain::Point(std::vector<double> coords) const
{
  if (coords.size() != ranges_.size())
  {
    throw LengthMismatch("parameter point has " + std::to_string(coords.size()) +
                         " coordinates, domain has " + std::to_string(ranges_.size()));
  }
  return ParameterPoint{std::move(coords), Names()};
}

ParameterPoint ParameterDomain::Center() const
{
  std::vector<double> c;
  for (const auto &r : ranges_)
  {
    c.push_back(0.5 * (r.lo + r.hi));
  }
  return Point(std::move(c));
}

bool ParameterDomain::Contains(const ParameterPoint &mu, double tol) const
{
  if (mu.Size() != ranges_.size())
  {
    return false;
  }
  for (std::size_t i = 0; i < ranges_.size(); i++)
  {
    const auto &r = ranges_[i];
    const double slack = tol * (r.hi - r.lo);
    if (!(mu[i] >= r.lo - slack && mu[i] <= r.hi + slack))
    {
      return false;
    }
  }
  return true;
}

std::vector<double> ParameterDomain::Axis(std::size_t i) const
{
  const auto &r = ranges_.at(i);
  if (r.resolution == 1)
  {
    return {0.5 * (r.lo + r.hi)};
  }
  std::vector<double> axis(r.resolution);
  const double h = (r.hi - r.lo) / (r.resolution - 1);
  for (int j = 0; j < r.resolution; j++)
  {
    axis[j] = r.lo + j * h;
  }
  axis.back() = r.hi;
  return axis;
}

std::size_t ParameterDomain::TrialSize() const
{
  std::size_t n = 1;
  for (const auto &r : ranges_)
  {
    n *= static_cast<std::size_t>(r.resolution);
  }
  return n;
}

std::vector<ParameterPoint> ParameterDomain::TrialGrid() const
{
  std::vector<std::vector<double>> axes;
  for (std::size_t i = 0; i < ranges_.size(); i++)
  {
    axes.push_back(Axis(i));
  }
  const auto names = Names();
  std::vector<ParameterPoint> grid;
  grid.reserve(TrialSize());
  std::vector<std::size_t> idx(axes.size(), 0);
  for (std::size_t count = 0; count < TrialSize(); count++)
  {
    ParameterPoint p{std::vector<double>(axes.size()), names};
    for (std::size_t i = 0; i < axes.size(); i++)
    {
      p.coords[i] = axes[i][idx[i]];
    }
    grid.push_back(std::move(p));
    for (std::size_t i = axes.size(); i-- > 0;)
    {
      if (++idx[i] < axes[i].size())
      {
        break;
      }
      idx[i] = 0;
    }
  }
  return grid;
}

}  // namespace nirb
