// Copyright the nirb authors.
// SPDX-License-Identifier: Apache-2.0

#include "nirb/problems.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <numeric>
#include "nirb/errors.hpp"
#include "nirb/random.hpp"

namespace nirb
{

namespace
{

constexpr Complex kI(0.0, 1.0);

const ScalarFeature &ConstantFeature()
{
  static const ScalarFeature f{"constant", [](const ParameterPoint &) { return Complex(1.0); }};
  return f;
}

class AffineToyProvider : public ProblemProvider
{
public:
  AffineToyProvider(std::size_t n, ParameterDomain domain)
    : n_(n), domain_(std::move(domain)), a0_(ComplexMatrix::Zero(n, n))
  {
    if (n < 2)
    {
      throw ConfigError("affine toy problem needs n >= 2");
    }
    const double h = 1.0 / static_cast<double>(n + 1);
    for (std::size_t i = 0; i < n; i++)
    {
      a0_(i, i) = 2.0 / h;
      if (i + 1 < n)
      {
        a0_(i, i + 1) = -1.0 / h;
        a0_(i + 1, i) = -1.0 / h;
      }
    }
    for (std::size_t k = 0; k < domain_.Dimension(); k++)
    {
      Eigen::VectorXd diag(n);
      for (std::size_t i = 0; i < n; i++)
      {
        const double t = static_cast<double>(i) / static_cast<double>(n - 1);
        diag(i) = h * (1.0 + 0.5 * std::cos(std::numbers::pi * static_cast<double>(k + 1) * t));
      }
      mass_.push_back(std::move(diag));
      const std::string name = domain_.Range(k).name;
      features_.push_back({name, [k](const ParameterPoint &mu) { return Complex(mu[k]); }});
    }
    rhs_ = ComplexVector::Constant(n, Complex(h));
    ell_ = ComplexVector::Constant(n, Complex(1.0 / static_cast<double>(n)));
  }

  std::string Kind() const override { return "affine_toy"; }
  std::size_t Size() const override { return n_; }
  const ParameterDomain &Domain() const override { return domain_; }

  ComplexMatrix AssembleMatrix(const ParameterPoint &mu) const override
  {
    if (mu.Size() != domain_.Dimension())
    {
      throw LengthMismatch("parameter arity mismatch");
    }
    ComplexMatrix A = a0_;
    for (std::size_t k = 0; k < mass_.size(); k++)
    {
      for (std::size_t i = 0; i < n_; i++)
      {
        A(i, i) += mu[k] * mass_[k](i);
      }
    }
    RequireFinite(A, "affine toy matrix");
    return A;
  }

  ComplexVector AssembleRhs(const ParameterPoint &mu) const override
  {
    if (mu.Size() != domain_.Dimension())
    {
      throw LengthMismatch("parameter arity mismatch");
    }
    return rhs_;
  }

  const ComplexVector &OutputFunctional() const override { return ell_; }
  const std::vector<ScalarFeature> &ScalarFeatures() const override { return features_; }
  const std::vector<LocationKernel> &Kernels() const override { return kernels_; }

private:
  std::size_t n_;
  ParameterDomain domain_;
  ComplexMatrix a0_;
  std::vector<Eigen::VectorXd> mass_;
  ComplexVector rhs_;
  ComplexVector ell_;
  std::vector<ScalarFeature> features_;
  std::vector<LocationKernel> kernels_;
};

double Dot3(const std::array<double, 3> &a, const std::array<double, 3> &b)
{
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

std::array<double, 3> Normalized(std::array<double, 3> v, const char *what)
{
  const double len = std::sqrt(Dot3(v, v));
  if (!(len > 0.0) || !std::isfinite(len))
  {
    throw ConfigError(std::string(what) + " must be a non-zero finite vector");
  }
  return {v[0] / len, v[1] / len, v[2] / len};
}

std::vector<double> Linspace(double lo, double hi, std::size_t count)
{
  std::vector<double> v(count);
  if (count == 1)
  {
    v[0] = 0.5 * (lo + hi);
    return v;
  }
  for (std::size_t j = 0; j < count; j++)
  {
    v[j] = lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(count - 1);
  }
  v.back() = hi;
  return v;
}

class KernelProvider : public ProblemProvider
{
public:
  explicit KernelProvider(KernelProblemConfig cfg) : cfg_(std::move(cfg))
  {
    const auto &cloud = cfg_.cloud;
    const std::size_t n = cloud.Size();
    if (n < 3 || cloud.weights.size() != n || cloud.zones.size() != n)
    {
      throw ConfigError("kernel problem needs at least 3 points with weights and zones");
    }
    std::array<bool, 3> zone_used = {false, false, false};
    for (std::size_t i = 0; i < n; i++)
    {
      if (cloud.zones[i] < 1 || cloud.zones[i] > 3)
      {
        throw ConfigError("zone labels must be 1, 2 or 3");
      }
      zone_used[cloud.zones[i] - 1] = true;
      if (!(cloud.weights[i] > 0.0))
      {
        throw ConfigError("quadrature weights must be positive");
      }
    }
    if (!zone_used[0] || !zone_used[1] || !zone_used[2])
    {
      throw ConfigError("every zone must hold at least one point");
    }
    const std::size_t dim = cfg_.domain.Dimension();
    std::vector<std::size_t> used = {cfg_.wavenumber_index};
    used.insert(used.end(), cfg_.impedance_indices.begin(), cfg_.impedance_indices.end());
    for (std::size_t a = 0; a < used.size(); a++)
    {
      if (used[a] >= dim)
      {
        throw ConfigError("parameter index out of range");
      }
      for (std::size_t b = 0; b < a; b++)
      {
        if (used[a] == used[b])
        {
          throw ConfigError("wavenumber and impedance indices must be distinct");
        }
      }
      if (!(cfg_.domain.Range(used[a]).lo > 0.0))
      {
        throw ConfigError("wavenumber and impedances must be positive on the whole box");
      }
    }
    const auto d_in = Normalized(cfg_.incident_direction, "incident direction");
    const auto d_out = Normalized(cfg_.measure_direction, "measure direction");
    if (cfg_.location_samples < 2)
    {
      throw ConfigError("location_samples must be at least 2");
    }

    dist_ = Eigen::MatrixXd::Zero(n, n);
    coef_ = Eigen::MatrixXd::Zero(n, n);
    double r_min = std::numeric_limits<double>::infinity();
    double r_max = 0.0;
    for (std::size_t i = 0; i < n; i++)
    {
      for (std::size_t j = i + 1; j < n; j++)
      {
        const auto &p = cloud.points[i];
        const auto &q = cloud.points[j];
        const double dx = p[0] - q[0], dy = p[1] - q[1], dz = p[2] - q[2];
        const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
        if (!(r > 0.0))
        {
          throw ZeroDistance("points " + std::to_string(i) + " and " + std::to_string(j) +
                             " coincide");
        }
        dist_(i, j) = dist_(j, i) = r;
        coef_(i, j) = coef_(j, i) =
            cloud.weights[i] * cloud.weights[j] / (4.0 * std::numbers::pi * r);
        r_min = std::min(r_min, r);
        r_max = std::max(r_max, r);
      }
    }
    proj_in_.resize(n);
    double s_min = std::numeric_limits<double>::infinity();
    double s_max = -s_min;
    for (std::size_t i = 0; i < n; i++)
    {
      proj_in_(i) = Dot3(d_in, cloud.points[i]);
      s_min = std::min(s_min, proj_in_(i));
      s_max = std::max(s_max, proj_in_(i));
    }
    if (!(s_max > s_min))
    {
      s_max = s_min + 1.0;
    }

    const std::size_t k0 = cfg_.wavenumber_index;
    const double mu0_star = cfg_.domain.Center()[k0];
    ell_.resize(n);
    for (std::size_t i = 0; i < n; i++)
    {
      ell_(i) = cloud.weights[i] * std::exp(-kI * mu0_star * Dot3(d_out, cloud.points[i]));
    }

    kernels_.push_back({"helmholtz_phase",
                        [k0](const ParameterPoint &mu, double r)
                        { return std::exp(kI * mu[k0] * r); },
                        Linspace(r_min, r_max, cfg_.location_samples),
                        {k0}});
    kernels_.push_back({"plane_wave",
                        [k0](const ParameterPoint &mu, double s)
                        { return std::exp(kI * mu[k0] * s); },
                        Linspace(s_min, s_max, cfg_.location_samples),
                        {k0}});
    for (std::size_t k = 0; k < 3; k++)
    {
      const std::size_t kz = cfg_.impedance_indices[k];
      const std::string tag = "z" + std::to_string(k + 1);
      features_.push_back({"w_over_" + tag, [k0, kz](const ParameterPoint &mu)
                           { return Complex(mu[k0] / mu[kz]); }});
      features_.push_back({tag + "_over_w", [k0, kz](const ParameterPoint &mu)
                           { return Complex(mu[kz] / mu[k0]); }});
    }
  }

  std::string Kind() const override { return "kernel"; }
  std::size_t Size() const override { return cfg_.cloud.Size(); }
  const ParameterDomain &Domain() const override { return cfg_.domain; }

  ComplexMatrix AssembleMatrix(const ParameterPoint &mu) const override
  {
    CheckArity(mu);
    const std::size_t n = Size();
    const double mu0 = mu[cfg_.wavenumber_index];
    ComplexMatrix A(n, n);
    for (std::size_t i = 0; i < n; i++)
    {
      for (std::size_t j = i + 1; j < n; j++)
      {
        const Complex a = coef_(i, j) * std::exp(kI * mu0 * dist_(i, j));
        A(i, j) = a;
        A(j, i) = a;
      }
      const double z = mu[cfg_.impedance_indices[cfg_.cloud.zones[i] - 1]];
      A(i, i) = cfg_.cloud.weights[i] * (1.0 + kI * (mu0 / z) + kI * (z / mu0));
    }
    RequireFinite(A, "kernel matrix");
    return A;
  }

  ComplexVector AssembleRhs(const ParameterPoint &mu) const override
  {
    CheckArity(mu);
    const double mu0 = mu[cfg_.wavenumber_index];
    ComplexVector C(Size());
    for (std::size_t i = 0; i < Size(); i++)
    {
      C(i) = cfg_.cloud.weights[i] * std::exp(kI * mu0 * proj_in_(i));
    }
    RequireFinite(C, "kernel right-hand side");
    return C;
  }

  const ComplexVector &OutputFunctional() const override { return ell_; }
  const std::vector<ScalarFeature> &ScalarFeatures() const override { return features_; }
  const std::vector<LocationKernel> &Kernels() const override { return kernels_; }

private:
  void CheckArity(const ParameterPoint &mu) const
  {
    if (mu.Size() != cfg_.domain.Dimension())
    {
      throw LengthMismatch("parameter arity mismatch");
    }
  }

  KernelProblemConfig cfg_;
  Eigen::MatrixXd dist_;
  Eigen::MatrixXd coef_;
  Eigen::VectorXd proj_in_;
  ComplexVector ell_;
  std::vector<ScalarFeature> features_;
  std::vector<LocationKernel> kernels_;
};

}  // namespace

const ScalarFeature &ProblemProvider::Feature(const std::string &name) const
{
  if (name == "constant")
  {
    return ConstantFeature();
  }
  for (const auto &f : ScalarFeatures())
  {
    if (f.name == name)
    {
      return f;
    }
  }
  throw ConfigError("unknown scalar feature '" + name + "' for problem " + Kind());
}

const LocationKernel &ProblemProvider::Kernel(const std::string &name) const
{
  for (const auto &k : Kernels())
  {
    if (k.name == name)
    {
      return k;
    }
  }
  throw ConfigError("unknown kernel '" + name + "' for problem " + Kind());
}

std::shared_ptr<const ProblemProvider> MakeAffineToyProvider(std::size_t n,
                                                             ParameterDomain domain)
{
  return std::make_shared<AffineToyProvider>(n, std::move(domain));
}

std::shared_ptr<const ProblemProvider> MakeAffineToyProvider(std::size_t n, std::size_t mu_dim)
{
  std::vector<ParameterRange> ranges;
  for (std::size_t k = 0; k < mu_dim; k++)
  {
    ranges.push_back({"mu" + std::to_string(k), 0.0, 10.0, 101});
  }
  return MakeAffineToyProvider(n, ParameterDomain(std::move(ranges)));
}

PointCloud GenerateSpherePointCloud(std::size_t n, std::uint64_t seed)
{
  if (n < 3)
  {
    throw ConfigError("point cloud needs at least 3 points");
  }
  SplitMix64 rng(seed);
  PointCloud cloud;
  cloud.points.resize(n);
  for (auto &p : cloud.points)
  {
    const double z = rng.Uniform(-1.0, 1.0);
    const double phi = rng.Uniform(0.0, 2.0 * std::numbers::pi);
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    p = {s * std::cos(phi), s * std::sin(phi), z};
  }
  cloud.weights.assign(n, 4.0 * std::numbers::pi / static_cast<double>(n));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b)
                   { return cloud.points[a][2] > cloud.points[b][2]; });
  cloud.zones.resize(n);
  for (std::size_t rank = 0; rank < n; rank++)
  {
    cloud.zones[order[rank]] = 1 + static_cast<int>((3 * rank) / n);
  }
  return cloud;
}

ParameterDomain DefaultKernelDomain(int wavenumber_resolution, int impedance_resolution)
{
  return ParameterDomain({{"mu0", 5.0, 10.0, wavenumber_resolution},
                          {"mu1", 1.0, 5.0, impedance_resolution},
                          {"mu2", 1.0, 5.0, impedance_resolution},
                          {"mu3", 1.0, 5.0, impedance_resolution}});
}

std::shared_ptr<const ProblemProvider> MakeKernelProvider(KernelProblemConfig cfg)
{
  return std::make_shared<KernelProvider>(std::move(cfg));
}

ComplexVector TruthSolve(const ProblemProvider &provider, const ParameterPoint &mu)
{
  const ComplexMatrix A = provider.AssembleMatrix(mu);
  const ComplexVector C = provider.AssembleRhs(mu);
  return LuSolve(A, C);
}

double CostFunction(const std::vector<Complex> &qoi_values, const std::vector<double> &weights,
                    double penalty)
{
  if (qoi_values.size() != weights.size())
  {
    throw LengthMismatch("cost function: " + std::to_string(qoi_values.size()) +
                         " QoI values for " + std::to_string(weights.size()) + " weights");
  }
  double sum = penalty;
  for (std::size_t i = 0; i < weights.size(); i++)
  {
    sum += weights[i] * std::norm(qoi_values[i]);
  }
  if (!std::isfinite(sum))
  {
    throw NonFiniteValue("cost function is not finite");
  }
  return sum;
}

}  // namespace nirb
