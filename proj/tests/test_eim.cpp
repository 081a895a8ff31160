// Copyright the nirb authors.
// SPDX-License-Identifier: Apache-2.0

#include <random>
#include <catch_amalgamated.hpp>
#include "nirb/eim.hpp"
#include "test_support.hpp"

using namespace nirb;

namespace
{

// g(mu, x) = 1 + mu x on mu, x in {0, 1, 2}.
SampleGrid WorkedGrid()
{
  Eigen::MatrixXcd G(3, 3);
  for (int i = 0; i < 3; i++)
  {
    for (int j = 0; j < 3; j++)
    {
      G(i, j) = 1.0 + i * j;
    }
  }
  return SampleGrid(G);
}

double MaxDiff(const Eigen::MatrixXcd &A, const Eigen::MatrixXcd &B)
{
  return (A - B).cwiseAbs().maxCoeff();
}

Eigen::MatrixXcd Real(std::initializer_list<std::initializer_list<double>> rows)
{
  Eigen::MatrixXcd M(rows.size(), rows.begin()->size());
  int i = 0;
  for (const auto &r : rows)
  {
    int j = 0;
    for (double v : r)
    {
      M(i, j++) = v;
    }
    i++;
  }
  return M;
}

// Skeleton oracle: G(:, X) G(M, X)^{-1} G(M, :), independent of the greedy internals.
Eigen::MatrixXcd SkeletonOracle(const Eigen::MatrixXcd &G, const std::vector<std::size_t> &mu,
                                const std::vector<std::size_t> &x)
{
  const auto d = static_cast<Eigen::Index>(mu.size());
  Eigen::MatrixXcd core(d, d), cols(G.rows(), d), rows(d, G.cols());
  for (Eigen::Index a = 0; a < d; a++)
  {
    cols.col(a) = G.col(x[a]);
    rows.row(a) = G.row(mu[a]);
    for (Eigen::Index b = 0; b < d; b++)
    {
      core(a, b) = G(mu[a], x[b]);
    }
  }
  return cols * core.fullPivLu().solve(rows);
}

}  // namespace

TEST_CASE("Worked example, parameter first", "[eim]")
{
  const auto grid = WorkedGrid();
  const EimModel m = BuildEimS1(grid, 2);
  CHECK(m.rank == 2);
  CHECK(m.MuIndices() == std::vector<std::size_t>{2, 0});
  CHECK(m.XIndices() == std::vector<std::size_t>{2, 0});
  CHECK(MaxDiff(m.q, Real({{0.2, 0.6, 1.0}, {1.0, 0.5, 0.0}})) <= 1e-14);
  CHECK(MaxDiff(m.B, Real({{1.0, 0.0}, {0.2, 1.0}})) <= 1e-14);
  CHECK(MaxDiff(m.Gamma, Real({{5.0, 0.0}, {1.0, 0.8}})) <= 1e-14);
  CHECK(MaxDiff(m.Delta, Real({{0.25, -0.25}, {-0.25, 1.25}})) <= 1e-14);
  // Exhaustive residual scan.
  CHECK(MaxDiff(InterpolateGrid(m, grid), grid.Values()) <= 1e-14);
  CHECK(m.final_residual <= 1e-14);
  CHECK(GammaRecursionCheck(m, grid) <= 1e-14);
}

TEST_CASE("Worked example, location first", "[eim]")
{
  const auto grid = WorkedGrid();
  const EimModel s1 = BuildEimS1(grid, 2);
  const EimModel s2 = BuildEimS2(grid, 2);
  CHECK(s2.MuIndices() == s1.MuIndices());
  CHECK(s2.XIndices() == s1.XIndices());
  CHECK(MaxDiff(s2.B, s1.B) <= 1e-14);
  CHECK(MaxDiff(s2.Gamma, s1.Gamma) <= 1e-14);
  CHECK(MaxDiff(InterpolateGrid(s2, grid), grid.Values()) <= 1e-14);
}

TEST_CASE("Worked example interpolation coefficients", "[eim]")
{
  const EimModel m = BuildEimS1(WorkedGrid(), 2);
  ComplexVector samples(2);
  samples << 3.0, 1.0;  // g(1, 2), g(1, 0)
  const ComplexVector lambda = m.ApplyLambda(samples);
  CHECK(std::abs(lambda(0) - 3.0) <= 1e-14);
  CHECK(std::abs(lambda(1) - 0.4) <= 1e-14);

  for (Eigen::Index k = 0; k < 2; k++)
  {
    const ComplexVector e = m.ApplyLambda(m.B.col(k));
    CHECK((e - ComplexVector::Unit(2, k)).norm() <= 1e-15);
  }

  // Reconstruction at mu = 1 over x = {0, 1, 2}: 0.25*9 - 0.25*3 - 0.25*3 + 1.25*1 = 2 at x=1.
  for (const ComplexVector &row :
       {m.Interpolate(samples), m.InterpolateSnapshotForm(samples), m.InterpolateDualForm(samples)})
  {
    CHECK(std::abs(row(0) - 1.0) <= 1e-14);
    CHECK(std::abs(row(1) - 2.0) <= 1e-14);
    CHECK(std::abs(row(2) - 3.0) <= 1e-14);
  }
  const ComplexVector w = m.OuterWeights(samples);
  CHECK(std::abs(w(0) - 0.5) <= 1e-14);
  CHECK(std::abs(w(1) - 0.5) <= 1e-14);
}

TEST_CASE("Rank one grids", "[eim]")
{
  std::mt19937_64 rng(4);
  const SampleGrid grid(test::RandomRankGrid(7, 9, 1, rng));
  for (Slice s : {Slice::S1, Slice::S2})
  {
    const EimModel m = BuildEim(grid, 1, s);
    CHECK(MaxDiff(InterpolateGrid(m, grid), grid.Values()) <= 1e-13 * grid.MaxAbs());
    CHECK(MaxDiff(m.B, Eigen::MatrixXcd::Identity(1, 1)) == 0.0);
    const Complex g11 = grid.Values()(m.MuIndices()[0], m.XIndices()[0]);
    CHECK(std::abs(m.Gamma(0, 0) - g11) <= 1e-15 * std::abs(g11));
    ComplexVector sample(1);
    sample << Complex(2.5, -1.0);
    CHECK(m.ApplyLambda(sample) == sample);
  }
}

TEST_CASE("Requested rank beyond the grid rank", "[eim]")
{
  const auto grid = WorkedGrid();
  for (Slice s : {Slice::S1, Slice::S2})
  {
    try
    {
      BuildEim(grid, 3, s);
      FAIL("expected RankDeficient");
    }
    catch (const RankDeficient &e)
    {
      CHECK(e.AchievedRank() == 2);
      REQUIRE(e.Truncated().has_value());
      const EimModel &m = *e.Truncated();
      CHECK(m.rank == 2);
      CHECK(MaxDiff(InterpolateGrid(m, grid), grid.Values()) <= 1e-13 * grid.MaxAbs());
    }
  }
}

TEST_CASE("Exact rank reproduction and rank detection", "[eim][property]")
{
  std::mt19937_64 rng(21);
  for (std::size_t k = 1; k <= 6; k++)
  {
    const SampleGrid grid(test::RandomRankGrid(25, 31, k, rng));
    for (Slice s : {Slice::S1, Slice::S2})
    {
      const EimModel m = BuildEim(grid, k, s);
      CHECK(MaxDiff(InterpolateGrid(m, grid), grid.Values()) <= 1e-11 * grid.MaxAbs());
      CHECK_THROWS_AS(BuildEim(grid, k + 1, s), RankDeficient);
    }
  }
}

TEST_CASE("Interpolation properties on random complex grids", "[eim][property]")
{
  std::mt19937_64 rng(1234);
  std::uniform_int_distribution<std::size_t> dd(1, 10), size(10, 40);
  for (int t = 0; t < 20; t++)
  {
    const std::size_t d = dd(rng);
    const std::size_t P = std::max(d, size(rng)), X = std::max(d, size(rng));
    const SampleGrid grid(test::RandomGrid(P, X, rng));
    const double gmax = grid.MaxAbs();
    const EimModel s1 = BuildEimS1(grid, d);
    const EimModel s2 = BuildEimS2(grid, d);
    const Eigen::MatrixXcd I1 = InterpolateGrid(s1, grid);
    const Eigen::MatrixXcd I2 = InterpolateGrid(s2, grid);
    const Eigen::MatrixXcd &G = grid.Values();

    for (std::size_t r : s1.MuIndices())
    {
      CHECK((I1.row(r) - G.row(r)).cwiseAbs().maxCoeff() <= 1e-11 * gmax);
    }
    for (std::size_t c : s1.XIndices())
    {
      CHECK((I1.col(c) - G.col(c)).cwiseAbs().maxCoeff() <= 1e-11 * gmax);
    }
    CHECK(s1.MuIndices() == s2.MuIndices());
    CHECK(s1.XIndices() == s2.XIndices());
    CHECK(MaxDiff(I1, I2) <= 1e-12 * gmax);
    CHECK(MaxDiff(I1, SkeletonOracle(G, s1.MuIndices(), s1.XIndices())) <= 1e-10 * gmax);
    CHECK(GammaRecursionCheck(s1, grid) <= 1e-12 * gmax);
    CHECK(GammaRecursionCheck(s2, grid) <= 1e-12 * gmax);

    // B is unit lower triangular, Delta is the inverse of Gamma B^T.
    CHECK(MaxDiff(s1.B.diagonal(), Eigen::VectorXcd::Ones(d)) == 0.0);
    CHECK(s1.B.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().cwiseAbs().maxCoeff() == 0.0);
    CHECK(MaxDiff(s1.Delta * (s1.Gamma * s1.B.transpose()), Eigen::MatrixXcd::Identity(d, d)) <=
          1e-9);
  }
}

TEST_CASE("Euclidean ranking norm", "[eim]")
{
  std::mt19937_64 rng(77);
  const SampleGrid grid(test::RandomRankGrid(12, 15, 4, rng));
  const EimModel m = BuildEimS1(grid, 4, NormChoice::EuclideanRms);
  CHECK(MaxDiff(InterpolateGrid(m, grid), grid.Values()) <= 1e-11 * grid.MaxAbs());
}

TEST_CASE("Ties resolve to the lowest index", "[eim]")
{
  const SampleGrid grid(Eigen::MatrixXcd::Ones(4, 5));
  const EimModel m = BuildEimS1(grid, 1);
  CHECK(m.MuIndices() == std::vector<std::size_t>{0});
  CHECK(m.XIndices() == std::vector<std::size_t>{0});
}

TEST_CASE("Weights for parameter sets", "[eim]")
{
  std::mt19937_64 rng(9);
  const SampleGrid grid(test::RandomRankGrid(20, 18, 5, rng));
  const Eigen::MatrixXcd &G = grid.Values();
  for (Slice s : {Slice::S1, Slice::S2})
  {
    const EimModel m = BuildEim(grid, 5, s);
    for (Eigen::Index i = 0; i < G.rows(); i++)
    {
      ComplexVector at_x(5);
      for (int l = 0; l < 5; l++)
      {
        at_x(l) = G(i, m.XIndices()[l]);
      }
      const ComplexVector w = m.MuWeights(at_x);
      ComplexVector row = ComplexVector::Zero(G.cols());
      for (int r = 0; r < 5; r++)
      {
        row += w(r) * G.row(m.MuIndices()[r]).transpose();
      }
      CHECK((row - G.row(i).transpose()).cwiseAbs().maxCoeff() <= 1e-11 * grid.MaxAbs());
    }
  }
}
