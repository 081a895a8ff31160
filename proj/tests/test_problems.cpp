// Copyright the nirb authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <catch_amalgamated.hpp>
#include "nirb/errors.hpp"
#include "nirb/exploration.hpp"
#include "nirb/problems.hpp"
#include "test_support.hpp"

using namespace nirb;
using std::numbers::pi;

namespace
{

double RelFro(const ComplexMatrix &A, const ComplexMatrix &B)
{
  return (A - B).norm() / B.norm();
}

class IdentityProvider : public ProblemProvider
{
public:
  IdentityProvider() : domain_({{"mu", 0.0, 1.0, 2}}), ell_(ComplexVector::Ones(4)) {}
  std::string Kind() const override { return "identity"; }
  std::size_t Size() const override { return 4; }
  const ParameterDomain &Domain() const override { return domain_; }
  ComplexMatrix AssembleMatrix(const ParameterPoint &) const override
  {
    return ComplexMatrix::Identity(4, 4);
  }
  ComplexVector AssembleRhs(const ParameterPoint &) const override
  {
    ComplexVector e = ComplexVector::Zero(4);
    e(0) = 1.0;
    return e;
  }
  const ComplexVector &OutputFunctional() const override { return ell_; }
  const std::vector<ScalarFeature> &ScalarFeatures() const override { return features_; }
  const std::vector<LocationKernel> &Kernels() const override { return kernels_; }

private:
  ParameterDomain domain_;
  ComplexVector ell_;
  std::vector<ScalarFeature> features_;
  std::vector<LocationKernel> kernels_;
};

KernelProblemConfig ThreePointConfig()
{
  KernelProblemConfig cfg;
  cfg.cloud.points = {{0.0, 0.0, 1.0}, {0.0, 0.0, -1.0}, {1.0, 0.0, 0.0}};
  cfg.cloud.weights = {1.0, 1.0, 1.0};
  cfg.cloud.zones = {1, 3, 2};
  cfg.domain = ParameterDomain({{"k", 1.0, 4.0, 3},
                                {"z1", 1.0, 5.0, 2},
                                {"z2", 1.0, 5.0, 2},
                                {"z3", 1.0, 5.0, 2}});
  cfg.location_samples = 20;
  return cfg;
}

ComplexVector GaussOracle(ComplexMatrix A, ComplexVector b)
{
  const auto n = A.rows();
  for (Eigen::Index k = 0; k < n; k++)
  {
    Eigen::Index p = k;
    for (Eigen::Index i = k + 1; i < n; i++)
    {
      if (std::abs(A(i, k)) > std::abs(A(p, k)))
      {
        p = i;
      }
    }
    A.row(k).swap(A.row(p));
    std::swap(b(k), b(p));
    for (Eigen::Index i = k + 1; i < n; i++)
    {
      const Complex f = A(i, k) / A(k, k);
      A.row(i).tail(n - k) -= f * A.row(k).tail(n - k);
      b(i) -= f * b(k);
    }
  }
  ComplexVector x(n);
  for (Eigen::Index i = n - 1; i >= 0; i--)
  {
    Complex s = b(i);
    for (Eigen::Index j = i + 1; j < n; j++)
    {
      s -= A(i, j) * x(j);
    }
    x(i) = s / A(i, i);
  }
  return x;
}

}  // namespace

TEST_CASE("Affine toy operator at zero is the stiffness matrix", "[problems]")
{
  const std::size_t n = 12;
  auto p = MakeAffineToyProvider(n);
  ComplexMatrix A0 = ComplexMatrix::Zero(n, n);
  for (std::size_t i = 0; i < n; i++)
  {
    A0(i, i) = 2.0 * (n + 1);
    if (i + 1 < n)
    {
      A0(i, i + 1) = -1.0 * (n + 1);
      A0(i + 1, i) = -1.0 * (n + 1);
    }
  }
  CHECK(RelFro(p->AssembleMatrix(p->Domain().Point({0.0})), A0) <= 1e-15);
}

TEST_CASE("Affine toy satisfies the affine identities", "[problems]")
{
  auto p = MakeAffineToyProvider(30);
  const auto &D = p->Domain();
  auto A = [&](double mu) { return p->AssembleMatrix(D.Point({mu})); };
  CHECK((A(0.5) - 0.5 * (A(0.0) + A(1.0))).norm() <= 1e-13 * A(0.0).norm());
  CHECK((A(2.0) - 2.0 * A(1.0) + A(0.0)).norm() <= 1e-13 * A(0.0).norm());

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int t = 0; t < 20; t++)
  {
    const double m1 = u(rng), m2 = u(rng), m = u(rng);
    const ComplexMatrix rhs = ((m2 - m) / (m2 - m1)) * A(m1) + ((m - m1) / (m2 - m1)) * A(m2);
    CHECK(RelFro(rhs, A(m)) <= 1e-12);
  }
}

TEST_CASE("Affine toy with several coordinates", "[problems]")
{
  auto p = MakeAffineToyProvider(10, 2);
  const auto &D = p->Domain();
  REQUIRE(D.Dimension() == 2);
  const ComplexMatrix A00 = p->AssembleMatrix(D.Point({0.0, 0.0}));
  const ComplexMatrix A10 = p->AssembleMatrix(D.Point({1.0, 0.0}));
  const ComplexMatrix A01 = p->AssembleMatrix(D.Point({0.0, 1.0}));
  const ComplexMatrix A = p->AssembleMatrix(D.Point({3.0, 4.0}));
  CHECK(RelFro(A00 + 3.0 * (A10 - A00) + 4.0 * (A01 - A00), A) <= 1e-13);
  // Distinct mass profiles.
  CHECK((A10 - A01).norm() > 1e-3);
  CHECK(p->Feature("mu1").eval(D.Point({3.0, 4.0})) == Complex(4.0));
}

TEST_CASE("Kernel entry for antipodal points", "[problems]")
{
  auto p = MakeKernelProvider(ThreePointConfig());
  const auto mu = p->Domain().Point({pi, 2.0, 3.0, 4.0});
  const ComplexMatrix A = p->AssembleMatrix(mu);
  const Complex expected = 1.0 / (8.0 * pi);
  CHECK(std::abs(A(0, 1) - expected) <= 1e-15);
  CHECK(std::abs(expected - 0.039789) <= 1e-6);
  // Diagonal: w (1 + i mu0 / mu_z + i mu_z / mu0), zones 1, 3, 2.
  const double z[3] = {2.0, 4.0, 3.0};
  for (int i = 0; i < 3; i++)
  {
    const Complex d = 1.0 + Complex(0.0, 1.0) * (pi / z[i]) + Complex(0.0, 1.0) * (z[i] / pi);
    CHECK(std::abs(A(i, i) - d) <= 1e-14);
  }
  const double r02 = std::sqrt(2.0);
  const Complex e02 = std::exp(Complex(0.0, pi * r02)) / (4.0 * pi * r02);
  CHECK(std::abs(A(0, 2) - e02) <= 1e-15);
}

TEST_CASE("Kernel right-hand side and output functional", "[problems]")
{
  auto cfg = ThreePointConfig();
  auto p = MakeKernelProvider(cfg);
  const auto mu = p->Domain().Point({2.0, 1.0, 1.0, 1.0});
  const ComplexVector C = p->AssembleRhs(mu);
  // d = e_z: exp(i mu0 z_i).
  CHECK(std::abs(C(0) - std::exp(Complex(0.0, 2.0))) <= 1e-15);
  CHECK(std::abs(C(1) - std::exp(Complex(0.0, -2.0))) <= 1e-15);
  CHECK(std::abs(C(2) - 1.0) <= 1e-15);
  // l frozen at the central wavenumber 2.5 with d' = -e_z.
  const ComplexVector &l = p->OutputFunctional();
  CHECK(std::abs(l(0) - std::exp(Complex(0.0, 2.5))) <= 1e-15);
  CHECK(std::abs(l(1) - std::exp(Complex(0.0, -2.5))) <= 1e-15);
}

TEST_CASE("Kernel matrix structure", "[problems]")
{
  KernelProblemConfig cfg;
  cfg.cloud = GenerateSpherePointCloud(40, 17);
  cfg.domain = DefaultKernelDomain(3, 2);
  auto p = MakeKernelProvider(cfg);
  const auto mu = p->Domain().Point({7.0, 1.5, 2.5, 4.0});
  const ComplexMatrix A = p->AssembleMatrix(mu);
  SECTION("complex symmetric")
  {
    CHECK((A - A.transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
  SECTION("pure")
  {
    CHECK(A == p->AssembleMatrix(mu));
  }
  SECTION("impedances enter the diagonal only")
  {
    const ComplexMatrix B = p->AssembleMatrix(p->Domain().Point({7.0, 3.0, 1.0, 2.0}));
    ComplexMatrix diff = A - B;
    diff.diagonal().setZero();
    CHECK(diff.cwiseAbs().maxCoeff() == 0.0);
    CHECK((A.diagonal() - B.diagonal()).cwiseAbs().maxCoeff() > 0.0);
  }
  SECTION("features")
  {
    CHECK(p->Feature("w_over_z2").eval(mu) == Complex(7.0 / 2.5));
    CHECK(p->Feature("z3_over_w").eval(mu) == Complex(4.0 / 7.0));
    std::set<std::string> names;
    for (const auto &f : p->ScalarFeatures())
    {
      names.insert(f.name);
    }
    CHECK(names == std::set<std::string>{"w_over_z1", "w_over_z2", "w_over_z3", "z1_over_w",
                                         "z2_over_w", "z3_over_w"});
    CHECK_THROWS_AS(p->Feature("nope"), ConfigError);
  }
  SECTION("kernels reproduce the matrix off the diagonal")
  {
    const auto &g = p->Kernel("helmholtz_phase");
    const auto &x = cfg.cloud.points;
    const double r = std::sqrt(std::pow(x[3][0] - x[5][0], 2) + std::pow(x[3][1] - x[5][1], 2) +
                               std::pow(x[3][2] - x[5][2], 2));
    const Complex expected =
        cfg.cloud.weights[3] * cfg.cloud.weights[5] * g.eval(mu, r) / (4.0 * pi * r);
    CHECK(std::abs(A(3, 5) - expected) <= 1e-15 * std::abs(expected) + 1e-17);
  }
}

TEST_CASE("Kernel provider rejects invalid clouds", "[problems]")
{
  auto cfg = ThreePointConfig();
  SECTION("coincident points")
  {
    cfg.cloud.points[2] = cfg.cloud.points[0];
    CHECK_THROWS_AS(MakeKernelProvider(cfg), ZeroDistance);
  }
  SECTION("empty zone")
  {
    cfg.cloud.zones = {1, 1, 2};
    CHECK_THROWS_AS(MakeKernelProvider(cfg), ConfigError);
  }
  SECTION("non-positive weight")
  {
    cfg.cloud.weights[1] = 0.0;
    CHECK_THROWS_AS(MakeKernelProvider(cfg), ConfigError);
  }
  SECTION("repeated impedance index")
  {
    cfg.impedance_indices = {1, 1, 3};
    CHECK_THROWS_AS(MakeKernelProvider(cfg), ConfigError);
  }
}

TEST_CASE("Sphere point cloud", "[problems]")
{
  const auto c = GenerateSpherePointCloud(99, 5);
  REQUIRE(c.Size() == 99);
  int counts[4] = {0, 0, 0, 0};
  double zmin[4] = {2, 2, 2, 2}, zmax[4] = {-2, -2, -2, -2};
  for (std::size_t i = 0; i < c.Size(); i++)
  {
    const auto &x = c.points[i];
    CHECK(std::abs(x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - 1.0) <= 1e-14);
    CHECK(c.weights[i] == Catch::Approx(4.0 * pi / 99.0).epsilon(1e-15));
    counts[c.zones[i]]++;
    zmin[c.zones[i]] = std::min(zmin[c.zones[i]], x[2]);
    zmax[c.zones[i]] = std::max(zmax[c.zones[i]], x[2]);
  }
  CHECK(counts[1] == 33);
  CHECK(counts[2] == 33);
  CHECK(counts[3] == 33);
  CHECK(zmin[1] >= zmax[2]);
  CHECK(zmin[2] >= zmax[3]);

  const auto d = GenerateSpherePointCloud(99, 5);
  CHECK(d.points == c.points);
  CHECK(GenerateSpherePointCloud(99, 6).points != c.points);
}

TEST_CASE("Truth solve", "[problems]")
{
  SECTION("identity provider")
  {
    IdentityProvider p;
    const ComplexVector u = TruthSolve(p, p.Domain().Center());
    ComplexVector e1 = ComplexVector::Zero(4);
    e1(0) = 1.0;
    CHECK(u == e1);
  }
  SECTION("affine toy residual")
  {
    auto p = MakeAffineToyProvider(50);
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int t = 0; t < 100; t++)
    {
      const auto mu = p->Domain().Point({u(rng)});
      const ComplexVector x = TruthSolve(*p, mu);
      const ComplexVector C = p->AssembleRhs(mu);
      CHECK((p->AssembleMatrix(mu) * x - C).norm() <= 1e-10 * C.norm());
    }
  }
  SECTION("kernel problem against Gaussian elimination")
  {
    KernelProblemConfig cfg;
    cfg.cloud = GenerateSpherePointCloud(50, 3);
    cfg.domain = DefaultKernelDomain(3, 2);
    auto p = MakeKernelProvider(cfg);
    const auto mu = p->Domain().Point({8.3, 1.2, 4.4, 2.0});
    const ComplexVector x = TruthSolve(*p, mu);
    const ComplexVector y = GaussOracle(p->AssembleMatrix(mu), p->AssembleRhs(mu));
    CHECK((x - y).norm() <= 1e-8 * y.norm());
  }
}

TEST_CASE("Cost function", "[problems]")
{
  CHECK(CostFunction({0.0, 0.0, 0.0}, {1.0, 2.0, 3.0}, -8.0) == -8.0);
  CHECK(CostFunction({Complex(1.0, std::sqrt(2.0))}, {2.0}, 0.0) ==
        Catch::Approx(6.0).epsilon(1e-15));
  CHECK_THROWS_AS(CostFunction({1.0}, {1.0, 2.0}, 0.0), LengthMismatch);

  // Weights 2 for i <= 7, 1 for 8 <= i <= 13, 3 for i >= 14, twenty frequencies.
  std::vector<double> alpha;
  std::vector<Complex> J;
  for (int i = 1; i <= 20; i++)
  {
    alpha.push_back(i <= 7 ? 2.0 : (i <= 13 ? 1.0 : 3.0));
    J.push_back(Complex(0.1 * i, -0.05 * i * i));
  }
  double oracle = 0.0;
  for (int i = 0; i < 20; i++)
  {
    oracle += alpha[i] * (J[i].real() * J[i].real() + J[i].imag() * J[i].imag());
  }
  CHECK(CostFunction(J, alpha, 0.25) == Catch::Approx(oracle + 0.25).epsilon(1e-14));
}

TEST_CASE("Impedance penalty", "[problems]")
{
  // h = (0.2 mu1^-0.5 + 0.3 mu2^-0.8 + 0.5 mu3^-1) / 6 - 8.
  CHECK(ImpedancePenalty(1.0, 1.0, 1.0) == Catch::Approx(1.0 / 6.0 - 8.0).epsilon(1e-15));
  const double h = (0.2 / std::sqrt(2.8) + 0.3 * std::pow(1.0, -0.8) + 0.5 / 1.9) / 6.0 - 8.0;
  CHECK(ImpedancePenalty(2.8, 1.0, 1.9) == Catch::Approx(h).epsilon(1e-15));
}
