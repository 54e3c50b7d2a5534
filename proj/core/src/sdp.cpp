#include "sos/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace sos {
namespace {

constexpr double kSqrt2 = 1.4142135623730951;

void check_problem(const SdpProblem& p) {
  for (int d : p.block_dims)
    if (d < 1) throw std::invalid_argument("sdp: zero-dimensional block");
  auto check_entry = [&](const SdpEntry& e) {
    if (e.block < 0 || e.block >= static_cast<int>(p.block_dims.size()))
      throw std::invalid_argument("sdp: entry block out of range");
    int d = p.block_dims[e.block];
    if (e.i < 0 || e.j < 0 || e.i >= d || e.j >= d)
      throw std::invalid_argument("sdp: entry index out of range");
  };
  for (auto& c : p.constraints)
    for (auto& e : c.entries) check_entry(e);
  for (auto& e : p.objective) check_entry(e);
}

// A . X with the symmetric-pair entry convention
double dot(const std::vector<SdpEntry>& entries,
           const std::vector<Eigen::MatrixXd>& X) {
  double out = 0.0;
  for (auto& e : entries) {
    double x = X[e.block](e.i, e.j);
    out += (e.i == e.j) ? e.value * x : 2.0 * e.value * x;
  }
  return out;
}

// tr(A M) for a general (not necessarily symmetric) M
double dot_general(const std::vector<SdpEntry>& entries,
                   const std::vector<Eigen::MatrixXd>& M) {
  double out = 0.0;
  for (auto& e : entries) {
    if (e.i == e.j)
      out += e.value * M[e.block](e.i, e.i);
    else
      out += e.value * (M[e.block](e.i, e.j) + M[e.block](e.j, e.i));
  }
  return out;
}

void add_scaled(std::vector<Eigen::MatrixXd>& M,
                const std::vector<SdpEntry>& entries, double s) {
  for (auto& e : entries) {
    M[e.block](e.i, e.j) += s * e.value;
    if (e.i != e.j) M[e.block](e.j, e.i) += s * e.value;
  }
}

std::vector<Eigen::MatrixXd> zeros(const std::vector<int>& dims) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(dims.size());
  for (int d : dims) out.push_back(Eigen::MatrixXd::Zero(d, d));
  return out;
}

std::vector<Eigen::MatrixXd> identity(const std::vector<int>& dims, double s) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(dims.size());
  for (int d : dims) out.push_back(Eigen::MatrixXd::Identity(d, d) * s);
  return out;
}

// svec index bookkeeping: constraints as sparse vectors in the scaled
// half-vectorization, so that A . X is a plain dot product
struct SvecLayout {
  std::vector<int> offset;
  int total = 0;

  explicit SvecLayout(const std::vector<int>& dims) {
    offset.resize(dims.size());
    for (size_t b = 0; b < dims.size(); ++b) {
      offset[b] = total;
      total += dims[b] * (dims[b] + 1) / 2;
    }
  }
  int index(const std::vector<int>& dims, int b, int i, int j) const {
    if (i > j) std::swap(i, j);
    int d = dims[b];
    // row-major upper triangle
    return offset[b] + i * d - i * (i - 1) / 2 + (j - i);
  }
};

using SparseVec = std::vector<std::pair<int, double>>;

SparseVec to_svec(const std::vector<SdpEntry>& entries,
                  const std::vector<int>& dims, const SvecLayout& layout) {
  SparseVec v;
  v.reserve(entries.size());
  for (auto& e : entries) {
    double val = (e.i == e.j) ? e.value : kSqrt2 * e.value;
    v.push_back({layout.index(dims, e.block, e.i, e.j), val});
  }
  std::sort(v.begin(), v.end());
  // merge duplicates
  SparseVec merged;
  for (auto& [k, val] : v) {
    if (!merged.empty() && merged.back().first == k)
      merged.back().second += val;
    else
      merged.push_back({k, val});
  }
  merged.erase(std::remove_if(merged.begin(), merged.end(),
                              [](auto& kv) { return kv.second == 0.0; }),
               merged.end());
  return merged;
}

struct Preprocessed {
  std::vector<int> independent;       // constraint indices kept for the ipm
  std::vector<Eigen::MatrixXd> x0;    // min-norm solution of the equalities
  double inconsistency = 0.0;         // residual of dependent/dropped rows
  bool consistent = true;
};

// Gram-matrix pivoted Cholesky: finds a maximal independent subset of the
// equality constraints and a particular solution of A x = b.
Preprocessed preprocess(const SdpProblem& p) {
  const int m = static_cast<int>(p.constraints.size());
  Preprocessed out;
  out.x0 = zeros(p.block_dims);
  if (m == 0) return out;

  SvecLayout layout(p.block_dims);
  std::vector<SparseVec> rows(m);
  for (int k = 0; k < m; ++k)
    rows[k] = to_svec(p.constraints[k].entries, p.block_dims, layout);

  // gram matrix via per-coordinate accumulation
  std::vector<std::vector<std::pair<int, double>>> by_coord(layout.total);
  for (int k = 0; k < m; ++k)
    for (auto& [c, v] : rows[k]) by_coord[c].push_back({k, v});
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(m, m);
  for (auto& col : by_coord)
    for (size_t a = 0; a < col.size(); ++a)
      for (size_t b = a; b < col.size(); ++b) {
        G(col[a].first, col[b].first) += col[a].second * col[b].second;
        if (a != b) G(col[b].first, col[a].first) += col[a].second * col[b].second;
      }

  // pivoted Cholesky on G; dres tracks the remaining diagonal residuals
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(m, m);
  std::vector<int> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  Eigen::VectorXd dres = G.diagonal();
  double dmax0 = std::max(dres.maxCoeff(), 1e-300);
  const double rank_tol = 1e-12 * dmax0;
  int rank = 0;
  for (int k = 0; k < m; ++k) {
    int piv = k;
    for (int r = k + 1; r < m; ++r)
      if (dres(r) > dres(piv)) piv = r;
    double best = dres(piv);
    if (best <= rank_tol) break;
    std::swap(perm[k], perm[piv]);
    std::swap(dres(k), dres(piv));
    Eigen::VectorXd tmp = L.row(k).head(k);
    L.row(k).head(k) = L.row(piv).head(k);
    L.row(piv).head(k) = tmp;
    double diag = std::sqrt(best);
    L(k, k) = diag;
    for (int r = k + 1; r < m; ++r) {
      double v = G(perm[r], perm[k]) - L.row(r).head(k).dot(L.row(k).head(k));
      L(r, k) = v / diag;
      dres(r) -= L(r, k) * L(r, k);
    }
    ++rank;
  }

  out.independent.resize(rank);
  for (int k = 0; k < rank; ++k) out.independent[k] = perm[k];
  std::sort(out.independent.begin(), out.independent.end());

  // solve G_pp u_p = b_p on the pivot set, then x0 = sum u_k row_k
  Eigen::VectorXd bp(rank);
  for (int k = 0; k < rank; ++k) bp(k) = p.constraints[perm[k]].rhs;
  Eigen::MatrixXd Lpp = L.topLeftCorner(rank, rank);
  Eigen::VectorXd u = Lpp.triangularView<Eigen::Lower>().solve(bp);
  u = Lpp.transpose().triangularView<Eigen::Upper>().solve(u);

  Eigen::VectorXd x0v = Eigen::VectorXd::Zero(layout.total);
  for (int k = 0; k < rank; ++k)
    for (auto& [c, v] : rows[perm[k]]) x0v(c) += u(k) * v;

  // residual over all rows flags linearly inconsistent systems
  double scale = 1.0;
  for (int k = 0; k < m; ++k)
    scale = std::max(scale, std::abs(p.constraints[k].rhs));
  for (int k = 0; k < m; ++k) {
    double lhs = 0.0;
    for (auto& [c, v] : rows[k]) lhs += v * x0v(c);
    out.inconsistency =
        std::max(out.inconsistency, std::abs(lhs - p.constraints[k].rhs));
  }
  if (out.inconsistency > 1e-7 * scale) out.consistent = false;

  // unpack x0 into block matrices
  for (size_t b = 0; b < p.block_dims.size(); ++b) {
    int dim = p.block_dims[b];
    int ofs = layout.offset[b];
    int idx = ofs;
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j, ++idx) {
        double val = x0v(idx);
        if (i != j) val /= kSqrt2;
        out.x0[b](i, j) = val;
        out.x0[b](j, i) = val;
      }
  }
  return out;
}

// largest alpha in (0, 1] with M + alpha dM psd, given the Cholesky factor of M
double max_step(const Eigen::MatrixXd& M, const Eigen::MatrixXd& dM) {
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) return 0.0;
  Eigen::MatrixXd L = llt.matrixL();
  Eigen::MatrixXd W = L.triangularView<Eigen::Lower>().solve(dM);
  W = L.triangularView<Eigen::Lower>().solve(W.transpose()).transpose();
  // W = L^-1 dM L^-T
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      0.5 * (W + W.transpose()), Eigen::EigenvaluesOnly);
  double lmin = es.eigenvalues().minCoeff();
  if (lmin >= 0.0) return 1.0;
  return std::min(1.0, -1.0 / lmin);
}

struct IpmInput {
  std::vector<int> dims;
  std::vector<const SdpProblem::Constraint*> cons;
  std::vector<Eigen::MatrixXd> C;
};

struct IpmResult {
  std::vector<Eigen::MatrixXd> X;
  Eigen::VectorXd y;
  double pobj = 0.0;
  double dobj = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  int iterations = 0;
  bool converged = false;
};

// infeasible-start primal-dual interior point, HKM direction with a Mehrotra
// predictor-corrector step
IpmResult run_ipm(const IpmInput& in, std::vector<Eigen::MatrixXd> X,
                  const SdpSettings& settings) {
  const int m = static_cast<int>(in.cons.size());
  const size_t nb = in.dims.size();
  int total_dim = 0;
  for (int d : in.dims) total_dim += d;

  double bnorm = 1.0, cnorm = 1.0;
  Eigen::VectorXd b(m);
  for (int k = 0; k < m; ++k) {
    b(k) = in.cons[k]->rhs;
    bnorm = std::max(bnorm, std::abs(b(k)));
  }
  for (auto& Cb : in.C) cnorm = std::max(cnorm, Cb.cwiseAbs().maxCoeff());

  std::vector<Eigen::MatrixXd> Z = identity(in.dims, std::max(10.0, cnorm));
  Eigen::VectorXd y = Eigen::VectorXd::Zero(m);

  IpmResult res;
  res.iterations = 0;

  auto a_dot_x = [&](const SdpProblem::Constraint& c,
                     const std::vector<Eigen::MatrixXd>& M) {
    return dot(c.entries, M);
  };

  std::vector<Eigen::MatrixXd> Zinv(nb), Rd(nb);
  double best_rp = std::numeric_limits<double>::infinity();
  int stalled = 0;
  for (int iter = 0; iter < settings.max_iters; ++iter) {
    res.iterations = iter + 1;

    // factor Z, form Z^-1
    bool ok = true;
    std::vector<Eigen::LLT<Eigen::MatrixXd>> lltZ;
    lltZ.reserve(nb);
    for (size_t bidx = 0; bidx < nb; ++bidx) {
      lltZ.emplace_back(Z[bidx]);
      if (lltZ.back().info() != Eigen::Success) ok = false;
    }
    if (!ok) break;
    for (size_t bidx = 0; bidx < nb; ++bidx)
      Zinv[bidx] = lltZ[bidx].solve(
          Eigen::MatrixXd::Identity(in.dims[bidx], in.dims[bidx]));

    // residuals and gap
    Eigen::VectorXd rp(m);
    for (int k = 0; k < m; ++k) rp(k) = b(k) - a_dot_x(*in.cons[k], X);
    for (size_t bidx = 0; bidx < nb; ++bidx) Rd[bidx] = in.C[bidx] - Z[bidx];
    for (int k = 0; k < m; ++k)
      if (y(k) != 0.0) add_scaled(Rd, in.cons[k]->entries, -y(k));

    double xz = 0.0;
    for (size_t bidx = 0; bidx < nb; ++bidx)
      xz += (X[bidx].array() * Z[bidx].array()).sum();
    double mu = xz / total_dim;

    double pobj = 0.0;
    for (size_t bidx = 0; bidx < nb; ++bidx)
      pobj += (in.C[bidx].array() * X[bidx].array()).sum();
    double dobj = b.dot(y);
    double rp_norm = m > 0 ? rp.cwiseAbs().maxCoeff() : 0.0;
    double rd_norm = 0.0;
    for (auto& R : Rd) rd_norm = std::max(rd_norm, R.cwiseAbs().maxCoeff());

    res.pobj = pobj;
    res.dobj = dobj;
    res.primal_residual = rp_norm;
    res.dual_residual = rd_norm;
    res.gap = xz;

    double relgap = xz / (1.0 + std::abs(pobj) + std::abs(dobj));
    if (relgap <= settings.tol && rp_norm <= settings.tol * bnorm &&
        rd_norm <= settings.tol * std::max(1.0, cnorm)) {
      res.converged = true;
      break;
    }
    if (!std::isfinite(mu) || mu > 1e30) break;

    // thin feasible sets: the gap converges but the primal residual can
    // plateau; stop once it has stopped improving instead of burning the
    // whole iteration budget
    if (relgap <= settings.tol &&
        rd_norm <= settings.tol * std::max(1.0, cnorm)) {
      if (rp_norm > 0.95 * best_rp) {
        if (++stalled >= 10) break;
      } else {
        stalled = 0;
      }
      best_rp = std::min(best_rp, rp_norm);
    }

    // Schur complement S_ij = tr(A_i Z^-1 A_j X)
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(m, m);
    std::vector<Eigen::MatrixXd> W(nb);
    for (int j = 0; j < m; ++j) {
      for (size_t bidx = 0; bidx < nb; ++bidx)
        W[bidx].setZero(in.dims[bidx], in.dims[bidx]);
      // W = Z^-1 A_j X, exploiting sparsity of A_j
      for (auto& e : in.cons[j]->entries) {
        W[e.block].noalias() +=
            e.value * (Zinv[e.block].col(e.i) * X[e.block].row(e.j));
        if (e.i != e.j)
          W[e.block].noalias() +=
              e.value * (Zinv[e.block].col(e.j) * X[e.block].row(e.i));
      }
      for (int i = 0; i < m; ++i) S(i, j) = dot_general(in.cons[i]->entries, W);
    }
    S = 0.5 * (S + S.transpose());

    Eigen::LLT<Eigen::MatrixXd> lltS;
    double jitter = 0.0;
    for (int attempt = 0; attempt < 8; ++attempt) {
      Eigen::MatrixXd Sj = S;
      if (jitter > 0.0) Sj.diagonal().array() += jitter;
      lltS.compute(Sj);
      if (lltS.info() == Eigen::Success) break;
      jitter = jitter == 0.0 ? 1e-12 * (1.0 + S.diagonal().maxCoeff())
                             : jitter * 100.0;
    }
    if (lltS.info() != Eigen::Success) break;

    // shared pieces of the rhs
    Eigen::VectorXd a(m), h(m);
    std::vector<Eigen::MatrixXd> Q(nb);
    for (size_t bidx = 0; bidx < nb; ++bidx)
      Q[bidx] = Zinv[bidx] * Rd[bidx] * X[bidx];
    for (int k = 0; k < m; ++k) {
      a(k) = dot_general(in.cons[k]->entries, Zinv);
      h(k) = dot_general(in.cons[k]->entries, Q);
    }

    auto solve_direction = [&](double sigma_mu,
                               const std::vector<Eigen::MatrixXd>* corr,
                               Eigen::VectorXd& dy,
                               std::vector<Eigen::MatrixXd>& dX,
                               std::vector<Eigen::MatrixXd>& dZ) {
      Eigen::VectorXd rhs = b - sigma_mu * a + h;
      if (corr) {
        for (int k = 0; k < m; ++k)
          rhs(k) += dot_general(in.cons[k]->entries, *corr);
      }
      dy = lltS.solve(rhs);
      dZ = Rd;
      for (int k = 0; k < m; ++k)
        if (dy(k) != 0.0) add_scaled(dZ, in.cons[k]->entries, -dy(k));
      dX.resize(nb);
      for (size_t bidx = 0; bidx < nb; ++bidx) {
        dX[bidx] = sigma_mu * Zinv[bidx] - X[bidx] -
                   Zinv[bidx] * dZ[bidx] * X[bidx];
        if (corr) dX[bidx] -= (*corr)[bidx];
        dX[bidx] = 0.5 * (dX[bidx] + dX[bidx].transpose()).eval();
      }
    };

    // predictor
    Eigen::VectorXd dy;
    std::vector<Eigen::MatrixXd> dX, dZ;
    solve_direction(0.0, nullptr, dy, dX, dZ);

    double ap = 1.0, ad = 1.0;
    for (size_t bidx = 0; bidx < nb; ++bidx) {
      ap = std::min(ap, max_step(X[bidx], dX[bidx]));
      ad = std::min(ad, max_step(Z[bidx], dZ[bidx]));
    }
    double gap_aff = 0.0;
    for (size_t bidx = 0; bidx < nb; ++bidx)
      gap_aff += ((X[bidx] + ap * dX[bidx]).array() *
                  (Z[bidx] + ad * dZ[bidx]).array())
                     .sum();
    double sigma = std::pow(std::max(gap_aff, 0.0) / xz, 3.0);
    sigma = std::clamp(sigma, 1e-8, 1.0);

    // corrector; the cross term Z^-1 dZ_aff dX_aff enters both sides
    std::vector<Eigen::MatrixXd> cross(nb);
    for (size_t bidx = 0; bidx < nb; ++bidx)
      cross[bidx] = Zinv[bidx] * dZ[bidx] * dX[bidx];
    solve_direction(sigma * mu, &cross, dy, dX, dZ);

    ap = 1.0;
    ad = 1.0;
    for (size_t bidx = 0; bidx < nb; ++bidx) {
      ap = std::min(ap, max_step(X[bidx], dX[bidx]));
      ad = std::min(ad, max_step(Z[bidx], dZ[bidx]));
    }
    double gamma = iter < 2 ? 0.9 : 0.98;
    ap = std::min(1.0, gamma * ap);
    ad = std::min(1.0, gamma * ad);
    if (ap <= 1e-12 && ad <= 1e-12) break;

    for (size_t bidx = 0; bidx < nb; ++bidx) {
      X[bidx] += ap * dX[bidx];
      Z[bidx] += ad * dZ[bidx];
    }
    y += ad * dy;
  }

  res.X = std::move(X);
  res.y = std::move(y);
  return res;
}

// phase-I: minimize lambda with blocks Y_b = X_b + lambda I psd. Always
// strictly feasible from the least-squares particular solution.
struct Phase1Result {
  double optimum = 0.0;
  std::vector<Eigen::MatrixXd> X;  // Y - lambda I, the recovered primal
  Eigen::VectorXd y;
  IpmResult raw;
};

Phase1Result run_phase1(const SdpProblem& p, const Preprocessed& pre,
                        const SdpSettings& settings) {
  const int lam_block = static_cast<int>(p.block_dims.size());
  std::vector<int> dims = p.block_dims;
  dims.push_back(1);

  std::vector<SdpProblem::Constraint> cons;
  cons.reserve(pre.independent.size());
  for (int k : pre.independent) {
    SdpProblem::Constraint c = p.constraints[k];
    double tr = 0.0;
    for (auto& e : c.entries)
      if (e.i == e.j) tr += e.value;
    if (tr != 0.0) c.entries.push_back({lam_block, 0, 0, -tr});
    c.rhs = p.constraints[k].rhs;
    cons.push_back(std::move(c));
  }

  IpmInput in;
  in.dims = dims;
  for (auto& c : cons) in.cons.push_back(&c);
  in.C = zeros(dims);
  in.C[lam_block](0, 0) = 1.0;

  // interior start: lift the particular solution until strictly pd
  double lam0 = 1.0;
  for (size_t b = 0; b < p.block_dims.size(); ++b) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pre.x0[b],
                                                      Eigen::EigenvaluesOnly);
    lam0 = std::max(lam0, -es.eigenvalues().minCoeff() + 1.0);
  }
  std::vector<Eigen::MatrixXd> X0 = pre.x0;
  for (size_t b = 0; b < p.block_dims.size(); ++b)
    X0[b].diagonal().array() += lam0;
  X0.push_back(Eigen::MatrixXd::Constant(1, 1, lam0));

  SdpSettings s1 = settings;
  s1.tol = std::min(settings.tol, 1e-9);
  IpmResult r = run_ipm(in, std::move(X0), s1);

  Phase1Result out;
  out.optimum = r.X.back()(0, 0);
  out.X.assign(r.X.begin(), r.X.end() - 1);
  for (auto& Xb : out.X) Xb.diagonal().array() -= out.optimum;
  out.y = r.y;
  out.raw = std::move(r);
  return out;
}

// feasibility refinement: once phase-I certifies a solution exists, maximize
// the interior margin lambda subject to X - lambda I psd and lambda <= cap.
// Unlike the phase-I optimum (which sits on the boundary lambda = 0), the
// max-margin point is strictly complementary, so the ipm converges cleanly
// and returns a well-centered feasible point.
Phase1Result run_max_margin(const SdpProblem& p, const Preprocessed& pre,
                            const SdpSettings& settings, double cap) {
  const int lam_block = static_cast<int>(p.block_dims.size());
  std::vector<int> dims = p.block_dims;
  dims.push_back(1);  // lambda
  dims.push_back(1);  // cap - lambda

  std::vector<SdpProblem::Constraint> cons;
  cons.reserve(pre.independent.size() + 1);
  for (int k : pre.independent) {
    SdpProblem::Constraint c = p.constraints[k];
    double tr = 0.0;
    for (auto& e : c.entries)
      if (e.i == e.j) tr += e.value;
    if (tr != 0.0) c.entries.push_back({lam_block, 0, 0, tr});
    cons.push_back(std::move(c));
  }
  cons.push_back({{{lam_block, 0, 0, 1.0}, {lam_block + 1, 0, 0, 1.0}}, cap});

  IpmInput in;
  in.dims = dims;
  for (auto& c : cons) in.cons.push_back(&c);
  in.C = zeros(dims);
  in.C[lam_block](0, 0) = -1.0;

  double lam0 = 1.0;
  for (size_t b = 0; b < p.block_dims.size(); ++b) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(pre.x0[b],
                                                      Eigen::EigenvaluesOnly);
    lam0 = std::max(lam0, -es.eigenvalues().minCoeff() + 1.0);
  }
  std::vector<Eigen::MatrixXd> X0 = pre.x0;
  for (size_t b = 0; b < p.block_dims.size(); ++b)
    X0[b].diagonal().array() += lam0;
  X0.push_back(Eigen::MatrixXd::Constant(1, 1, cap / 2.0));
  X0.push_back(Eigen::MatrixXd::Constant(1, 1, cap / 2.0));

  IpmResult r = run_ipm(in, std::move(X0), settings);

  Phase1Result out;
  out.optimum = r.X[lam_block](0, 0);
  out.X.assign(r.X.begin(), r.X.end() - 2);
  for (auto& Xb : out.X) Xb.diagonal().array() += out.optimum;
  out.y = r.y.head(pre.independent.size());
  out.raw = std::move(r);
  return out;
}

Eigen::VectorXd expand_dual(const Eigen::VectorXd& y,
                            const std::vector<int>& kept, int m) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(m);
  for (size_t k = 0; k < kept.size(); ++k) out(kept[k]) = y(k);
  return out;
}

}  // namespace

void SdpProblem::add_constraint(std::vector<SdpEntry> entries, double rhs) {
  constraints.push_back({std::move(entries), rhs});
}

SdpSolution solve(const SdpProblem& problem_in, const SdpSettings& settings) {
  check_problem(problem_in);
  const int m = static_cast<int>(problem_in.constraints.size());
  SdpSolution sol;

  // normalize every constraint row to unit Frobenius norm; mixed coefficient
  // scales otherwise destroy the Schur-complement conditioning
  SdpProblem problem = problem_in;
  Eigen::VectorXd row_norm = Eigen::VectorXd::Ones(m);
  for (int k = 0; k < m; ++k) {
    auto& c = problem.constraints[k];
    double sq = 0.0;
    for (auto& e : c.entries)
      sq += (e.i == e.j ? 1.0 : 2.0) * e.value * e.value;
    double nrm = std::sqrt(sq);
    if (nrm <= 0.0) continue;
    row_norm(k) = nrm;
    for (auto& e : c.entries) e.value /= nrm;
    c.rhs /= nrm;
  }

  if (m == 0) {
    // unconstrained: the identity is an interior feasible point
    sol.status = SdpStatus::kOptimal;
    sol.primal = identity(problem.block_dims, 1.0);
    sol.dual = Eigen::VectorXd::Zero(0);
    sol.objective = dot(problem.objective, sol.primal);
    return sol;
  }

  Preprocessed pre = preprocess(problem);
  if (!pre.consistent) {
    sol.status = SdpStatus::kInfeasible;
    sol.primal = zeros(problem.block_dims);
    sol.dual = Eigen::VectorXd::Zero(m);
    sol.primal_residual = pre.inconsistency;
    sol.phase1_optimum = std::numeric_limits<double>::infinity();
    return sol;
  }

  Phase1Result p1 = run_phase1(problem, pre, settings);
  sol.phase1_optimum = p1.optimum;
  sol.iterations = p1.raw.iterations;
  if (p1.optimum > settings.infeasibility_certificate_threshold) {
    // the phase-I dual is a Farkas-type improving ray for the original system
    sol.status = SdpStatus::kInfeasible;
    sol.primal = std::move(p1.X);
    sol.dual = expand_dual(p1.y, pre.independent, m);
    sol.dual.array() /= row_norm.array();
    sol.primal_residual = p1.raw.primal_residual;
    sol.dual_residual = p1.raw.dual_residual;
    sol.gap = p1.raw.gap;
    return sol;
  }

  if (problem.mode == SdpProblem::Mode::kFeasibility) {
    Phase1Result mm = run_max_margin(problem, pre, settings, 1.0);
    const Phase1Result& best =
        (mm.raw.converged || mm.raw.primal_residual < p1.raw.primal_residual)
            ? mm
            : p1;
    double bscale = 1.0;
    for (auto& c : problem.constraints)
      bscale = std::max(bscale, std::abs(c.rhs));
    bool residual_ok =
        best.raw.primal_residual <= settings.feasibility_residual_tol * bscale;
    sol.status = (p1.raw.converged || best.raw.converged || residual_ok)
                     ? SdpStatus::kOptimal
                     : SdpStatus::kMaxIters;
    sol.primal = best.X;
    sol.dual = expand_dual(best.y, pre.independent, m);
    sol.dual.array() /= row_norm.array();
    sol.objective = 0.0;
    sol.primal_residual = best.raw.primal_residual;
    sol.dual_residual = best.raw.dual_residual;
    sol.gap = best.raw.gap;
    sol.iterations += mm.raw.iterations;
    return sol;
  }

  // phase-II: minimize the true objective from a cold interior start
  IpmInput in;
  in.dims = problem.block_dims;
  std::vector<SdpProblem::Constraint> kept;
  kept.reserve(pre.independent.size());
  for (int k : pre.independent) kept.push_back(problem.constraints[k]);
  for (auto& c : kept) in.cons.push_back(&c);
  in.C = zeros(problem.block_dims);
  add_scaled(in.C, problem.objective, 1.0);

  double scale = 10.0;
  for (auto& Xb : p1.X)
    scale = std::max(scale, Xb.diagonal().cwiseAbs().maxCoeff() * 2.0);
  IpmResult r2 = run_ipm(in, identity(problem.block_dims, scale), settings);

  // same thin-feasible-set escape as feasibility mode: when the gap and the
  // dual residual are converged but the primal residual has plateaued, accept
  // the point if the residual is within the configured tolerance
  double bscale = 1.0, cscale = 1.0;
  for (auto& c : problem.constraints) bscale = std::max(bscale, std::abs(c.rhs));
  for (auto& e : problem.objective) cscale = std::max(cscale, std::abs(e.value));
  double relgap = r2.gap / (1.0 + std::abs(r2.pobj) + std::abs(r2.dobj));
  bool stalled_ok =
      relgap <= settings.tol && r2.dual_residual <= settings.tol * cscale &&
      r2.primal_residual <= settings.feasibility_residual_tol * bscale;
  sol.status = (r2.converged || stalled_ok) ? SdpStatus::kOptimal
                                            : SdpStatus::kMaxIters;
  sol.primal = std::move(r2.X);
  sol.dual = expand_dual(r2.y, pre.independent, m);
  sol.dual.array() /= row_norm.array();
  sol.objective = r2.pobj;
  sol.primal_residual = r2.primal_residual;
  sol.dual_residual = r2.dual_residual;
  sol.gap = r2.gap;
  sol.iterations += r2.iterations;
  return sol;
}

SdpSolution solve_min_frobenius(const SdpProblem& problem, int target_block,
                                const SdpSettings& settings) {
  check_problem(problem);
  if (target_block < 0 ||
      target_block >= static_cast<int>(problem.block_dims.size()))
    throw std::invalid_argument("solve_min_frobenius: bad target block");

  const int n = problem.block_dims[target_block];

  // epigraph block G = [[T, X], [X^T, I]] psd forces T >= X X^T, so
  // minimizing tr(T) minimizes the squared Frobenius norm of the target
  SdpProblem aug = problem;
  aug.mode = SdpProblem::Mode::kMinimize;
  const int ep = static_cast<int>(aug.block_dims.size());
  aug.block_dims.push_back(2 * n);

  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      // bottom-right corner pinned to the identity
      aug.add_constraint({{ep, n + i, n + j, 1.0}}, i == j ? 1.0 : 0.0);
      // off-diagonal corner tied to the target block entries
      aug.add_constraint(
          {{ep, i, n + j, 0.5}, {target_block, i, j, i == j ? -1.0 : -0.5}},
          0.0);
      if (i != j)
        aug.add_constraint(
            {{ep, j, n + i, 0.5}, {target_block, i, j, -0.5}}, 0.0);
    }
  aug.objective.clear();
  for (int i = 0; i < n; ++i) aug.objective.push_back({ep, i, i, 1.0});

  SdpSolution sol = solve(aug, settings);
  if (!sol.primal.empty()) {
    double tr = sol.primal.back().topLeftCorner(n, n).trace();
    sol.objective = std::sqrt(std::max(0.0, tr));
    sol.primal.pop_back();
  }
  return sol;
}

}  // namespace sos
