// Copyright the nirb authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef NIRB_PARAMETERS_HPP
#define NIRB_PARAMETERS_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace nirb
{

// A point of the parameter space: ordered real coordinates with matching names.
struct ParameterPoint
{
  std::vector<double> coords;
  std::vector<std::string> names;

  std::size_t Size() const { return coords.size(); }
  double operator[](std::size_t i) const { return coords[i]; }

  // Coordinate lookup by name; throws DomainError for unknown names.
  double Get(const std::string &name) const;

  bool operator==(const ParameterPoint &other) const = default;
};

// Closed interval for one coordinate plus its trial-grid resolution.
struct ParameterRange
{
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  int resolution = 2;
};

// Axis-aligned parameter box with a Cartesian trial grid (endpoints included).
class ParameterDomain
{
public:
  ParameterDomain() = default;
  explicit ParameterDomain(std::vector<ParameterRange> ranges);

  std::size_t Dimension() const { return ranges_.size(); }
  const std::vector<ParameterRange> &Ranges() const { return ranges_; }
  const ParameterRange &Range(std::size_t i) const { return ranges_[i]; }
  std::vector<std::string> Names() const;
  std::size_t IndexOf(const std::string &name) const;

  // Builds a point, checking arity. Coordinates may lie outside the box.
  ParameterPoint Point(std::vector<double> coords) const;

  ParameterPoint Center() const;

  // True when every coordinate lies in its interval, up to a relative slack of tol.
  bool Contains(const ParameterPoint &mu, double tol = 1e-12) const;

  // Grid points along coordinate i: lo + j (hi - lo) / (res - 1), endpoints exact.
  std::vector<double> Axis(std::size_t i) const;

  // Cartesian product of the axes; the first coordinate varies slowest.
  std::size_t TrialSize() const;
  std::vector<ParameterPoint> TrialGrid() const;

private:
  std::vector<ParameterRange> ranges_;
};

}  // namespace nirb

#endif  // NIRB_PARAMETERS_HPP
