// Copyright the nirb authors.
// SPDX-License-Identifier: Apache-2.0

#include "nirb/rbm.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

namespace nirb
{

namespace
{

// Test-space application P(U) x.
Eigen::VectorXcd Project(const BasisMatrix &U, const Eigen::VectorXcd &x, Projection p)
{
  return p == Projection::Hermitian ? Eigen::VectorXcd(U.adjoint() * x)
                                    : Eigen::VectorXcd(U.transpose() * x);
}

Eigen::RowVectorXcd ProjectRow(const ComplexVector &v, const Eigen::MatrixXcd &AU, Projection p)
{
  return p == Projection::Hermitian ? Eigen::RowVectorXcd(v.adjoint() * AU)
                                    : Eigen::RowVectorXcd(v.transpose() * AU);
}

struct ReducedSolve
{
  ComplexVector gamma;
  double rho = 0.0;
  bool clamped = false;
};

constexpr std::size_t kRowBlock = 4;
constexpr std::size_t kChunk = 8;

std::size_t PaddedCols(std::size_t cols)
{
  return (cols + kChunk - 1) / kChunk * kChunk;
}

bool HasLayout(const ReducedBasisModel &m)
{
  const auto nb = static_cast<Eigen::Index>(m.BasisSize());
  return m.online.A_stack.rows() == nb * nb &&
         m.online.A_stack.cols() == static_cast<Eigen::Index>(m.A_hat.size()) &&
         m.online.C_stack.rows() == nb &&
         m.online.C_stack.cols() == static_cast<Eigen::Index>(m.C_hat.size());
}

bool HasPackedResidual(const ReducedBasisModel &m)
{
  return m.online.residual_rows == static_cast<std::size_t>(m.residual_factor.rows()) &&
         m.online.residual_cols == static_cast<std::size_t>(m.residual_factor.cols()) &&
         m.online.residual_cols == m.A_hat.size() * m.BasisSize() + m.C_hat.size() &&
         !m.online.residual_offsets.empty();
}

struct Workspace
{
  Eigen::VectorXcd a, c;
  std::vector<double> ar, ai, br, bi, cr, ci;
};

Workspace &ThreadWorkspace()
{
  thread_local Workspace ws;
  return ws;
}

ComplexVector SolveReduced(const ReducedBasisModel &m, const ComplexVector &beta,
                           const ComplexVector &beta_rhs)
{
  const std::size_t nb = m.BasisSize();
  if (!HasLayout(m))
  {
    ComplexMatrix A = ComplexMatrix::Zero(nb, nb);
    for (std::size_t r = 0; r < m.A_hat.size(); r++)
    {
      A += beta(r) * m.A_hat[r];
    }
    ComplexVector C = ComplexVector::Zero(nb);
    for (std::size_t r = 0; r < m.C_hat.size(); r++)
    {
      C += beta_rhs(r) * m.C_hat[r];
    }
    try
    {
      return LuSolve(A, C);
    }
    catch (const SingularMatrix &e)
    {
      throw SingularReducedSystem(std::string("reduced system: ") + e.what(), "online");
    }
  }
  Workspace &ws = ThreadWorkspace();
  ws.a.noalias() = m.online.A_stack * beta;
  ws.c.noalias() = m.online.C_stack * beta_rhs;
  ws.ar.resize(nb * nb);
  ws.ai.resize(nb * nb);
  ws.br.resize(nb);
  ws.bi.resize(nb);
  for (std::size_t i = 0; i < nb * nb; i++)
  {
    ws.ar[i] = ws.a(i).real();
    ws.ai[i] = ws.a(i).imag();
  }
  for (std::size_t i = 0; i < nb; i++)
  {
    ws.br[i] = ws.c(i).real();
    ws.bi[i] = ws.c(i).imag();
  }
  try
  {
    SmallLuSolveInPlace(static_cast<int>(nb), ws.ar.data(), ws.ai.data(), ws.br.data(),
                        ws.bi.data());
  }
  catch (const SingularMatrix &e)
  {
    throw SingularReducedSystem(std::string("reduced system: ") + e.what(), "online");
  }
  ComplexVector gamma(nb);
  for (std::size_t i = 0; i < nb; i++)
  {
    gamma(i) = Complex(ws.br[i], ws.bi[i]);
  }
  return gamma;
}

// |R c| over the packed layout: each row block accumulates kChunk-wide partial sums.
double PackedResidualNorm(const OnlineLayout &L, const double *cr, const double *ci)
{
  const std::size_t ncols = PaddedCols(L.residual_cols);
  const std::size_t nblocks = L.residual_offsets.size();
  double total = 0.0;
  for (std::size_t b = 0; b < nblocks; b++)
  {
    const std::size_t j0 = b * kRowBlock / kChunk * kChunk;
    const double *p = L.residual_packed.data() + L.residual_offsets[b];
    alignas(64) double sr[kRowBlock][kChunk] = {};
    alignas(64) double si[kRowBlock][kChunk] = {};
    for (std::size_t jc = j0; jc < ncols; jc += kChunk, p += 2 * kRowBlock * kChunk)
    {
      const double *x = cr + jc, *y = ci + jc;
      for (std::size_t r = 0; r < kRowBlock; r++)
      {
        const double *re = p + 2 * r * kChunk, *im = re + kChunk;
#pragma omp simd
        for (std::size_t l = 0; l < kChunk; l++)
        {
          sr[r][l] += re[l] * x[l] - im[l] * y[l];
          si[r][l] += re[l] * y[l] + im[l] * x[l];
        }
      }
    }
    for (std::size_t r = 0; r < kRowBlock; r++)
    {
      double a = 0.0, c = 0.0;
      for (std::size_t l = 0; l < kChunk; l++)
      {
        a += sr[r][l];
        c += si[r][l];
      }
      total += a * a + c * c;
    }
  }
  return std::sqrt(total);
}

double OrthogonalizedResidual(const ReducedBasisModel &m, const ComplexVector &beta,
                              const ComplexVector &beta_rhs, const ComplexVector &gamma)
{
  const std::size_t nb = m.BasisSize();
  const std::size_t dz = m.A_hat.size();
  const std::size_t dzr = m.C_hat.size();
  if (!HasPackedResidual(m))
  {
    ComplexVector c(dz * nb + dzr);
    for (std::size_t r = 0; r < dz; r++)
    {
      c.segment(r * nb, nb) = beta(r) * gamma;
    }
    c.tail(dzr) = -beta_rhs;
    return (m.residual_factor * c).norm();
  }
  Workspace &ws = ThreadWorkspace();
  const std::size_t cols = m.online.residual_cols;
  ws.cr.assign(PaddedCols(cols), 0.0);
  ws.ci.assign(PaddedCols(cols), 0.0);
  for (std::size_t r = 0; r < dz; r++)
  {
    for (std::size_t i = 0; i < nb; i++)
    {
      const Complex v = beta(r) * gamma(i);
      ws.cr[r * nb + i] = v.real();
      ws.ci[r * nb + i] = v.imag();
    }
  }
  for (std::size_t s = 0; s < dzr; s++)
  {
    ws.cr[dz * nb + s] = -beta_rhs(s).real();
    ws.ci[dz * nb + s] = -beta_rhs(s).imag();
  }
  return PackedResidualNorm(m.online, ws.cr.data(), ws.ci.data());
}

ReducedSolve Evaluate(const ReducedBasisModel &m, const ComplexVector &beta,
                      const ComplexVector &beta_rhs)
{
  ReducedSolve s;
  s.gamma = SolveReduced(m, beta, beta_rhs);
  if (m.residual_mode == ResidualMode::Orthogonalized)
  {
    s.rho = OrthogonalizedResidual(m, beta, beta_rhs, s.gamma);
  }
  else
  {
    const double rho2 = ExpandedResidualSquared(m, beta, beta_rhs, s.gamma);
    s.clamped = rho2 < 0.0;
    s.rho = std::sqrt(std::max(0.0, rho2));
  }
  return s;
}

// Triangular factor of a Householder QR, min(rows, cols) x cols.
Eigen::MatrixXcd TriangularFactor(const Eigen::MatrixXcd &W)
{
  const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(W);
  const Eigen::Index k = std::min(W.rows(), W.cols());
  return qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
}

bool SameParameter(const ParameterPoint &a, const ParameterPoint &b)
{
  return a.coords == b.coords;
}

}  // namespace

void PrepareOnline(ReducedBasisModel &model)
{
  OnlineLayout &L = model.online;
  const auto nb = static_cast<Eigen::Index>(model.BasisSize());
  L.A_stack.resize(nb * nb, static_cast<Eigen::Index>(model.A_hat.size()));
  for (std::size_t r = 0; r < model.A_hat.size(); r++)
  {
    L.A_stack.col(r) = model.A_hat[r].reshaped();
  }
  L.C_stack.resize(nb, static_cast<Eigen::Index>(model.C_hat.size()));
  for (std::size_t r = 0; r < model.C_hat.size(); r++)
  {
    L.C_stack.col(r) = model.C_hat[r];
  }

  const Eigen::MatrixXcd &R = model.residual_factor;
  const auto rows = static_cast<std::size_t>(R.rows());
  const auto cols = static_cast<std::size_t>(R.cols());
  L.residual_rows = rows;
  L.residual_cols = cols;
  L.residual_packed.clear();
  L.residual_offsets.clear();
  const std::size_t ncols = PaddedCols(cols);
  for (std::size_t b = 0; b * kRowBlock < rows; b++)
  {
    L.residual_offsets.push_back(L.residual_packed.size());
    for (std::size_t jc = b * kRowBlock / kChunk * kChunk; jc < ncols; jc += kChunk)
    {
      for (std::size_t r = 0; r < kRowBlock; r++)
      {
        const std::size_t i = b * kRowBlock + r;
        for (int part = 0; part < 2; part++)
        {
          for (std::size_t l = 0; l < kChunk; l++)
          {
            const std::size_t j = jc + l;
            double v = 0.0;
            if (i < rows && j < cols)
            {
              v = part == 0 ? R(i, j).real() : R(i, j).imag();
            }
            L.residual_packed.push_back(v);
          }
        }
      }
    }
  }
}

double ComputeInfSupLowerBound(const ComplexMatrix &A)
{
  const double fro = A.norm();
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(A);
  const auto &s = svd.singularValues();
  const double smin = s.size() ? s(s.size() - 1) : 0.0;
  if (!(smin >= 1e-14 * fro) || !(smin > 0.0))
  {
    throw SingularMatrix("smallest singular value below 1e-14 |A|_F");
  }
  return smin;
}

double ComputeInfSupLowerBound(const ProblemProvider &provider, const ParameterPoint &mu)
{
  return ComputeInfSupLowerBound(provider.AssembleMatrix(mu));
}

double ExpandedResidualSquared(const ReducedBasisModel &model, const ComplexVector &beta,
                               const ComplexVector &beta_rhs, const ComplexVector &gamma)
{
  const std::size_t dz = model.A_hat.size();
  const std::size_t dzr = model.C_hat.size();
  Complex aa = 0.0, ac = 0.0;
  for (std::size_t r = 0; r < dz; r++)
  {
    Complex row = 0.0;
    for (std::size_t s = 0; s < dz; s++)
    {
      row += beta(s) * gamma.dot(model.G[r * dz + s] * gamma);
    }
    aa += std::conj(beta(r)) * row;
    Complex hrow = 0.0;
    for (std::size_t s = 0; s < dzr; s++)
    {
      hrow += beta_rhs(s) * gamma.dot(model.H[r * dzr + s]);
    }
    ac += std::conj(beta(r)) * hrow;
  }
  const Complex cc = beta_rhs.dot(model.S * beta_rhs);
  return aa.real() - 2.0 * ac.real() + cc.real();
}

OnlineSolution OnlineSolve(const ReducedBasisModel &model, const ParameterPoint &mu)
{
  const auto t0 = std::chrono::steady_clock::now();
  OnlineSolution sol;
  auto bm = model.matrix_decomp.Beta(mu);
  auto br = model.rhs_decomp.Beta(mu);
  const ReducedSolve s = Evaluate(model, bm.beta, br.beta);
  sol.gamma_hat = s.gamma;
  sol.residual_norm = s.rho;
  sol.rho_clamped = s.clamped;
  sol.error_bound = s.rho / model.beta_lb;
  sol.qoi = model.ell_hat * s.gamma;
  sol.extrapolated = bm.extrapolated || br.extrapolated;
  sol.beta = std::move(bm.beta);
  sol.beta_rhs = std::move(br.beta);
  sol.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return sol;
}

GreedyResult GreedyOffline(const ProblemProvider &provider,
                           const NonintrusiveDecomposition &matrix_decomp,
                           const NonintrusiveDecomposition &rhs_decomp, const GreedyConfig &cfg)
{
  if (cfg.max_basis < 1)
  {
    throw ConfigError("max_basis must be at least 1");
  }
  if (!matrix_decomp.IsBound() || !rhs_decomp.IsBound())
  {
    throw Error("decompositions must be bound before the greedy", "greedy");
  }
  const std::size_t n = provider.Size();
  const std::size_t dz = matrix_decomp.Rank();
  const std::size_t dzr = rhs_decomp.Rank();

  GreedyResult res;
  ReducedBasisModel &m = res.model;
  m.full_size = n;
  m.matrix_decomp = matrix_decomp;
  m.rhs_decomp = rhs_decomp;
  m.projection = cfg.projection;
  m.residual_mode = cfg.residual;

  const auto a_snaps = AssembleMatrixSnapshots(provider, matrix_decomp);
  const auto c_snaps = AssembleRhsSnapshots(provider, rhs_decomp);
  const auto trial = cfg.trial.empty() ? matrix_decomp.domain.TrialGrid() : cfg.trial;
  if (trial.empty())
  {
    throw ConfigError("greedy trial set is empty");
  }

  std::vector<ComplexVector> beta(trial.size()), beta_rhs(trial.size());
  for (std::size_t i = 0; i < trial.size(); i++)
  {
    beta[i] = matrix_decomp.Beta(trial[i]).beta;
    beta_rhs[i] = rhs_decomp.Beta(trial[i]).beta;
  }

  m.beta_lb = ComputeInfSupLowerBound(provider, matrix_decomp.domain.Center());

  m.S.resize(dzr, dzr);
  for (std::size_t r = 0; r < dzr; r++)
  {
    for (std::size_t s = 0; s < dzr; s++)
    {
      m.S(r, s) = c_snaps[r].dot(c_snaps[s]);
    }
  }

  ParameterPoint next = matrix_decomp.domain.Center();
  if (cfg.first == FirstParameter::MaxRhsNorm)
  {
    double best = -1.0;
    for (std::size_t i = 0; i < trial.size(); i++)
    {
      const double v = beta_rhs[i].dot(m.S * beta_rhs[i]).real();
      if (v > best)
      {
        best = v;
        next = trial[i];
      }
    }
  }

  BasisMatrix U(n, 0);
  std::vector<Eigen::MatrixXcd> AU(dz, Eigen::MatrixXcd(n, 0));
  m.A_hat.assign(dz, Eigen::MatrixXcd(0, 0));
  m.C_hat.assign(dzr, Eigen::VectorXcd(0));
  m.G.assign(dz * dz, Eigen::MatrixXcd(0, 0));
  m.H.assign(dz * dzr, Eigen::VectorXcd(0));

  res.stop_reason = "max_basis";
  for (std::size_t step = 1; step <= cfg.max_basis; step++)
  {
    for (const auto &mr : matrix_decomp.selected_mu)
    {
      if (SameParameter(mr, next))
      {
        res.log.push_back("snapshot parameter coincides with a matrix decomposition parameter");
        break;
      }
    }
    ComplexVector v = TruthSolve(provider, next);
    const double unorm = v.norm();
    const double vnorm = OrthogonalizeTwice(U, v);
    if (!(vnorm > 1e-12 * unorm))
    {
      res.stop_reason = "snapshot_in_span";
      res.log.push_back("new snapshot lies in the span of the basis; greedy stopped");
      break;
    }
    v /= vnorm;
    const std::size_t k = U.cols();
    U.conservativeResize(Eigen::NoChange, k + 1);
    U.col(k) = v;
    m.snapshot_mu.push_back(next);

    const double orth = MaxAbs(U.adjoint() * U - Eigen::MatrixXcd::Identity(k + 1, k + 1));
    if (!(orth <= 1e-12))
    {
      throw Error("basis lost orthonormality (" + FormatDecimal(orth) + ")", "greedy");
    }

    for (std::size_t r = 0; r < dz; r++)
    {
      const ComplexVector av = a_snaps[r] * v;
      AU[r].conservativeResize(Eigen::NoChange, k + 1);
      AU[r].col(k) = av;
      Eigen::MatrixXcd &Ah = m.A_hat[r];
      Ah.conservativeResize(k + 1, k + 1);
      Ah.col(k) = Project(U, av, cfg.projection);
      Ah.row(k).head(k) = ProjectRow(v, AU[r].leftCols(k), cfg.projection);
    }
    for (std::size_t r = 0; r < dzr; r++)
    {
      Eigen::VectorXcd &Ch = m.C_hat[r];
      Ch.conservativeResize(k + 1);
      Ch(k) = cfg.projection == Projection::Hermitian ? v.dot(c_snaps[r])
                                                      : (v.transpose() * c_snaps[r])(0);
    }
    for (std::size_t r = 0; r < dz; r++)
    {
      for (std::size_t s = 0; s < dz; s++)
      {
        Eigen::MatrixXcd &G = m.G[r * dz + s];
        G.conservativeResize(k + 1, k + 1);
        G.col(k) = AU[r].adjoint() * AU[s].col(k);
        G.row(k).head(k) = AU[r].col(k).adjoint() * AU[s].leftCols(k);
      }
      for (std::size_t s = 0; s < dzr; s++)
      {
        Eigen::VectorXcd &H = m.H[r * dzr + s];
        H.conservativeResize(k + 1);
        H(k) = AU[r].col(k).dot(c_snaps[s]);
      }
    }

    Eigen::MatrixXcd W(n, dz * (k + 1) + dzr);
    for (std::size_t r = 0; r < dz; r++)
    {
      W.middleCols(r * (k + 1), k + 1) = AU[r];
    }
    for (std::size_t s = 0; s < dzr; s++)
    {
      W.col(dz * (k + 1) + s) = c_snaps[s];
    }
    m.residual_factor = TriangularFactor(W);
    PrepareOnline(m);

    double max_bound = -1.0;
    std::size_t arg = 0;
    for (std::size_t i = 0; i < trial.size(); i++)
    {
      try
      {
        const ReducedSolve s = Evaluate(m, beta[i], beta_rhs[i]);
        const double bound = s.rho / m.beta_lb;
        if (bound > max_bound)
        {
          max_bound = bound;
          arg = i;
        }
      }
      catch (const SingularReducedSystem &)
      {
        res.log.push_back("singular reduced system at trial point " + std::to_string(i) +
                          " (step " + std::to_string(step) + "), skipped");
      }
    }
    res.trace.push_back({step, m.snapshot_mu.back(), max_bound, k + 1});
    if (max_bound < 0.0)
    {
      throw Error("no trial point admits a reduced solve", "greedy");
    }
    if (max_bound <= cfg.tolerance)
    {
      res.stop_reason = "tolerance";
      break;
    }
    next = trial[arg];
  }

  m.ell_hat = provider.OutputFunctional().adjoint() * U;
  if (cfg.keep_basis)
  {
    m.basis = U;
  }
  return res;
}

BasisMatrix RebuildBasis(const ProblemProvider &provider, const ReducedBasisModel &model)
{
  BasisMatrix U(provider.Size(), 0);
  for (const auto &mu : model.snapshot_mu)
  {
    ComplexVector v = TruthSolve(provider, mu);
    const double vnorm = OrthogonalizeTwice(U, v);
    const auto k = U.cols();
    U.conservativeResize(Eigen::NoChange, k + 1);
    U.col(k) = v / vnorm;
  }
  return U;
}

void WriteGreedyTraceCsv(std::ostream &os, const std::vector<std::string> &names,
                         const std::vector<GreedyTraceRow> &trace)
{
  os << "step,";
  for (const auto &n : names)
  {
    os << n << ',';
  }
  os << "max_bound,basis_size\n";
  for (const auto &row : trace)
  {
    os << row.step << ',';
    for (double c : row.selected_mu.coords)
    {
      os << FormatDecimal(c) << ',';
    }
    os << FormatDecimal(row.max_bound) << ',' << row.basis_size << '\n';
  }
}

}  // namespace nirb
