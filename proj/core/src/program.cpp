#include "sos/program.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>

#include <json.hpp>

namespace sos {
namespace {

bool is_power_of_two(int t) { return t > 0 && (t & (t - 1)) == 0; }

// ordered index tuples in [d]^len, lexicographic
std::vector<std::vector<int>> tensor_tuples(int d, int len) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(len, 0);
  while (true) {
    out.push_back(cur);
    int p = len - 1;
    while (p >= 0 && cur[p] == d - 1) cur[p--] = 0;
    if (p < 0) break;
    ++cur[p];
  }
  if (len == 0) out = {{}};
  return out;
}

// E[x_{i_1} ... x_{i_k}] for x ~ N(0, Id): count pairings of equal indices
double wick(std::vector<int> idx) {
  if (idx.empty()) return 1.0;
  if (idx.size() % 2 != 0) return 0.0;
  int first = idx[0];
  double total = 0.0;
  for (size_t j = 1; j < idx.size(); ++j) {
    if (idx[j] != first) continue;
    std::vector<int> rest;
    for (size_t k = 1; k < idx.size(); ++k)
      if (k != j) rest.push_back(idx[k]);
    total += wick(std::move(rest));
  }
  return total;
}

double factorial(int n) {
  double out = 1.0;
  for (int i = 2; i <= n; ++i) out *= i;
  return out;
}

// multiset multiplicity: number of ordered tuples with the given sorted form
double tuple_multiplicity(const std::vector<int>& sorted_tuple, int d) {
  std::vector<int> counts(d, 0);
  for (int v : sorted_tuple) ++counts[v];
  double out = factorial(static_cast<int>(sorted_tuple.size()));
  for (int c : counts) out /= factorial(c);
  return out;
}

double multinomial_coeff(int s, const std::vector<int>& theta) {
  double out = factorial(s);
  for (int t : theta) out /= factorial(t);
  return out;
}

std::vector<std::vector<int>> compositions(int d, int s) {
  std::vector<std::vector<int>> out;
  std::vector<int> theta(d, 0);
  std::function<void(int, int)> rec = [&](int idx, int left) {
    if (idx == d - 1) {
      theta[idx] = left;
      out.push_back(theta);
      return;
    }
    for (int e = 0; e <= left; ++e) {
      theta[idx] = e;
      rec(idx + 1, left - e);
    }
  };
  rec(0, s);
  return out;
}

}  // namespace

int StructuredSubsetProgram::max_constraint_degree() const {
  int deg = 0;
  for (auto& p : equalities) deg = std::max(deg, p.degree());
  for (auto& p : scalar_inequalities) deg = std::max(deg, p.degree());
  for (auto& M : matrix_inequalities) deg = std::max(deg, M.degree());
  return deg;
}

std::vector<std::vector<int>> symmetric_index_basis(int d, int len) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(len, 0);
  std::function<void(int, int)> rec = [&](int pos, int lo) {
    if (pos == len) {
      out.push_back(cur);
      return;
    }
    for (int v = lo; v < d; ++v) {
      cur[pos] = v;
      rec(pos + 1, v);
    }
  };
  rec(0, 0);
  return out;
}

double index_orbit_size(const std::vector<int>& sorted_tuple, int d) {
  return tuple_multiplicity(sorted_tuple, d);
}

Eigen::MatrixXd gaussian_moment_rhs(int d, int t) {
  if (t % 2 != 0) throw std::invalid_argument("t must be even");
  auto tuples = tensor_tuples(d, t / 2);
  int D = static_cast<int>(tuples.size());
  Eigen::MatrixXd out(D, D);
  for (int a = 0; a < D; ++a)
    for (int b = a; b < D; ++b) {
      std::vector<int> idx = tuples[a];
      idx.insert(idx.end(), tuples[b].begin(), tuples[b].end());
      double v = wick(std::move(idx));
      out(a, b) = v;
      out(b, a) = v;
    }
  return out;
}

StructuredSubsetProgram build_program(const Eigen::MatrixXd& samples,
                                      double alpha, int t, double tau,
                                      StructuredSubsetProgram::Variant variant) {
  const int n = static_cast<int>(samples.rows());
  const int d = static_cast<int>(samples.cols());
  if (n == 0) throw std::invalid_argument("build_program: no samples");
  if (t < 4 || !is_power_of_two(t))
    throw std::invalid_argument("build_program: t must be an even power of 2");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("build_program: alpha out of (0, 1]");
  if (!(tau >= 0.0 && tau < 0.1))
    throw std::invalid_argument("build_program: tau out of [0, 0.1)");

  StructuredSubsetProgram prog;
  prog.samples = samples;
  prog.alpha = alpha;
  prog.t = t;
  prog.tau = tau;
  prog.variant = variant;

  auto tuples = symmetric_index_basis(d, t / 2);
  const int D = static_cast<int>(tuples.size());
  std::vector<double> weight(D);
  for (int a = 0; a < D; ++a) weight[a] = std::sqrt(index_orbit_size(tuples[a], d));

  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back("w" + std::to_string(i));
  for (int a = 0; a < d; ++a) names.push_back("mu" + std::to_string(a));
  if (variant == StructuredSubsetProgram::Variant::kGeneralExplicit) {
    // one variable per unordered pair of sorted index tuples
    for (int a = 0; a < D; ++a)
      for (int b = a; b < D; ++b)
        prog.aux_index.push_back({tuples[a], tuples[b]});
    for (size_t k = 0; k < prog.aux_index.size(); ++k)
      names.push_back("aux" + std::to_string(k));
  }
  prog.space = make_space(std::move(names));
  prog.boolean_mask.assign(prog.space->count(), 0);
  for (int i = 0; i < n; ++i) prog.boolean_mask[i] = 1;

  auto w = [&](int i) { return Poly::var(prog.w_var(i), prog.space); };
  auto mu = [&](int a) { return Poly::var(prog.mu_var(a), prog.space); };

  // booleanness
  for (int i = 0; i < n; ++i)
    prog.equalities.push_back(w(i) * w(i) - w(i));

  // size window around alpha n
  Poly wsum(0.0, prog.space);
  for (int i = 0; i < n; ++i) wsum = wsum + w(i);
  prog.scalar_inequalities.push_back(wsum -
                                     Poly((1.0 - tau) * alpha * n, prog.space));
  prog.scalar_inequalities.push_back(Poly((1.0 + tau) * alpha * n, prog.space) -
                                     wsum);

  // empirical mean consistency, componentwise
  for (int a = 0; a < d; ++a) {
    Poly lhs = mu(a) * wsum;
    Poly rhs(0.0, prog.space);
    for (int i = 0; i < n; ++i) rhs = rhs + w(i) * samples(i, a);
    prog.equalities.push_back(lhs - rhs);
  }

  // centered sample factors (X_i - mu) as linear polynomials
  auto factor = [&](int i, int a) {
    return Poly(samples(i, a), prog.space) - mu(a);
  };

  if (variant == StructuredSubsetProgram::Variant::kGaussianWarmup) {
    PolyMatrix slack(D);
    for (int a = 0; a < D; ++a)
      for (int b = a; b < D; ++b) {
        std::vector<int> idx = tuples[a];
        idx.insert(idx.end(), tuples[b].begin(), tuples[b].end());
        double rhs2 = 2.0 * wick(std::move(idx));
        Poly emp(0.0, prog.space);
        for (int i = 0; i < n; ++i) {
          Poly term = w(i);
          for (int v : tuples[a]) term = term * factor(i, v);
          for (int v : tuples[b]) term = term * factor(i, v);
          emp = emp + term;
        }
        Poly entry = Poly(rhs2, prog.space) - emp * (1.0 / (alpha * n));
        slack.set(a, b, entry * (weight[a] * weight[b]));
      }
    prog.matrix_inequalities.push_back(std::move(slack));
  } else {
    // matrix of auxiliary variables, psd on the reduced basis
    PolyMatrix M(D);
    for (int a = 0; a < D; ++a)
      for (int b = a; b < D; ++b) {
        int k = -1;
        for (size_t q = 0; q < prog.aux_index.size(); ++q)
          if (prog.aux_index[q].first == tuples[a] &&
              prog.aux_index[q].second == tuples[b]) {
            k = static_cast<int>(q);
            break;
          }
        if (k < 0) throw std::logic_error("aux index lookup failed");
        Poly entry = Poly::var(prog.aux_var(k), prog.space);
        M.set(a, b, entry * (weight[a] * weight[b]));
      }
    prog.matrix_inequalities.push_back(std::move(M));

    // linear equations: <u^{t/2}, M u^{t/2}> equals
    // 2 t^{t/2} ||u||^t - (1/alpha n) sum_i w_i <X_i - mu, u>^t, as a
    // polynomial identity in u; one equation per coefficient theta
    for (auto& theta : compositions(d, t)) {
      Poly eq(0.0, prog.space);
      for (size_t k = 0; k < prog.aux_index.size(); ++k) {
        auto& [ga, gb] = prog.aux_index[k];
        std::vector<int> sum_counts(d, 0);
        for (int v : ga) ++sum_counts[v];
        for (int v : gb) ++sum_counts[v];
        if (sum_counts != theta) continue;
        double mult = tuple_multiplicity(ga, d) * tuple_multiplicity(gb, d) *
                      (ga == gb ? 1.0 : 2.0);
        eq = eq + Poly::var(prog.aux_var(static_cast<int>(k)), prog.space) * mult;
      }
      // 2 t^{t/2} ||u||^t contributes only to even theta
      bool even = true;
      std::vector<int> beta(d, 0);
      for (int a = 0; a < d; ++a) {
        if (theta[a] % 2 != 0) even = false;
        beta[a] = theta[a] / 2;
      }
      if (even)
        eq = eq - Poly(2.0 * std::pow(t, t / 2.0) *
                           multinomial_coeff(t / 2, beta),
                       prog.space);
      // + (1/alpha n) C(t, theta) sum_i w_i prod (X_ia - mu_a)^{theta_a}
      double ct = multinomial_coeff(t, theta);
      Poly emp(0.0, prog.space);
      for (int i = 0; i < n; ++i) {
        Poly term = w(i);
        for (int a = 0; a < d; ++a)
          for (int e = 0; e < theta[a]; ++e) term = term * factor(i, a);
        emp = emp + term;
      }
      eq = eq + emp * (ct / (alpha * n));
      prog.equalities.push_back(eq);
    }
  }
  return prog;
}

int default_pe_degree(const StructuredSubsetProgram& program) {
  return std::max(2 * program.t,
                  ((program.max_constraint_degree() + 2) + 1) / 2 * 2);
}

namespace {

// affine form over canonical monomials
struct Affine {
  std::map<Monomial, double> lin;
  double constant = 0.0;

  bool is_zero() const { return lin.empty() && constant == 0.0; }
  bool is_single_monomial() const {
    return constant == 0.0 && lin.size() == 1 && lin.begin()->second == 1.0;
  }
};

Affine to_affine(const Poly& p, const std::vector<char>& boolean_mask) {
  Affine out;
  PseudoExpectation reducer;
  reducer.boolean_mask = boolean_mask;
  for (auto& [m, c] : p.terms()) {
    Monomial cm = reducer.canonical(m);
    if (cm.is_one()) {
      out.constant += c;
    } else {
      out.lin[cm] += c;
      if (out.lin[cm] == 0.0) out.lin.erase(cm);
    }
  }
  return out;
}

// shared description of the truncated lowering profile
struct Profile {
  std::vector<Monomial> mm_basis;   // {1, w_i, mu^gamma <= t/2}
  std::vector<Monomial> mu_basis;   // {1, mu^gamma <= t/2}
  std::vector<Poly> mu_multipliers;  // mu^gamma, 1 <= |gamma| <= t/2
};

Profile make_profile(const StructuredSubsetProgram& prog) {
  Profile p;
  const int n = prog.n(), d = prog.d();
  std::vector<int> mu_vars(d);
  for (int a = 0; a < d; ++a) mu_vars[a] = prog.mu_var(a);
  std::vector<Monomial> mu_mons = monomials_up_to(mu_vars, prog.t / 2);
  p.mu_basis = mu_mons;  // already includes 1, graded order
  p.mm_basis.push_back(Monomial{});
  for (int i = 0; i < n; ++i) p.mm_basis.push_back(Monomial::var(prog.w_var(i)));
  for (auto& m : mu_mons)
    if (!m.is_one()) {
      p.mm_basis.push_back(m);
      p.mu_multipliers.push_back(Poly(m, 1.0, prog.space));
    }
  return p;
}

}  // namespace

SdpLowering build_sdp(const StructuredSubsetProgram& prog, int pe_degree,
                      const LoweringOptions& options) {
  if (pe_degree < prog.max_constraint_degree() + 2)
    throw std::invalid_argument("build_sdp: pe_degree too small");
  const int n = prog.n();
  Profile prof = make_profile(prog);

  SdpLowering low;
  low.pe_degree = pe_degree;
  low.space = prog.space;
  low.boolean_mask = prog.boolean_mask;

  auto w_poly = [&](int i) { return Poly::var(prog.w_var(i), prog.space); };

  // block construction: each block is a matrix of affine forms
  struct Block {
    std::vector<std::vector<Affine>> entries;  // upper triangle, [i][j-i]
    int dim = 0;
  };
  std::vector<Block> blocks;

  auto add_gram_block = [&](const std::vector<Monomial>& basis,
                            const Poly* locpoly) {
    Block b;
    b.dim = static_cast<int>(basis.size());
    b.entries.resize(b.dim);
    for (int i = 0; i < b.dim; ++i)
      for (int j = i; j < b.dim; ++j) {
        Poly prod(basis[i] * basis[j], 1.0, prog.space);
        if (locpoly) prod = prod * *locpoly;
        b.entries[i].push_back(to_affine(prod, prog.boolean_mask));
      }
    blocks.push_back(std::move(b));
    return static_cast<int>(blocks.size()) - 1;
  };

  auto add_poly_matrix_block = [&](const PolyMatrix& M) {
    Block b;
    b.dim = M.dim();
    b.entries.resize(b.dim);
    for (int i = 0; i < b.dim; ++i)
      for (int j = i; j < b.dim; ++j)
        b.entries[i].push_back(to_affine(M.at(i, j), prog.boolean_mask));
    blocks.push_back(std::move(b));
    return static_cast<int>(blocks.size()) - 1;
  };

  // 1. moment matrix over {1, w, mu^gamma}
  add_gram_block(prof.mm_basis, nullptr);

  // 2. optional pE[w w^T] block for Frobenius-objective rounding
  if (options.wwT_block) {
    std::vector<Monomial> wbasis;
    for (int i = 0; i < n; ++i) wbasis.push_back(Monomial::var(prog.w_var(i)));
    low.wwT_block = add_gram_block(wbasis, nullptr);
  }

  // 3. localizers w_i >= 0 (and optionally 1 - w_i >= 0) over the mu basis;
  // these cover the w_i mu^gamma moments the matrix inequality needs
  for (int i = 0; i < n; ++i) {
    Poly wi = w_poly(i);
    add_gram_block(prof.mu_basis, &wi);
  }
  if (options.upper_indicator_blocks) {
    for (int i = 0; i < n; ++i) {
      Poly ubar = Poly(1.0, prog.space) - w_poly(i);
      add_gram_block(prof.mu_basis, &ubar);
    }
  }

  // 4. localizers for the scalar inequality axioms over the mu basis, their
  // pairwise product, and their products with each w_j (axiom pairs)
  for (auto& s : prog.scalar_inequalities) add_gram_block(prof.mu_basis, &s);
  if (prog.scalar_inequalities.size() >= 2) {
    Poly prod = prog.scalar_inequalities[0] * prog.scalar_inequalities[1];
    add_gram_block({Monomial{}}, &prod);
  }
  for (int j = 0; j < n; ++j)
    for (auto& s : prog.scalar_inequalities) {
      Poly pj = w_poly(j) * s;
      add_gram_block({Monomial{}}, &pj);
    }

  // 5. matrix inequalities at half-degree 0
  for (auto& M : prog.matrix_inequalities) add_poly_matrix_block(M);

  // representative pass: first entry holding a bare monomial wins
  for (size_t b = 0; b < blocks.size(); ++b)
    for (int i = 0; i < blocks[b].dim; ++i)
      for (int j = i; j < blocks[b].dim; ++j) {
        const Affine& a = blocks[b].entries[i][j - i];
        if (!a.is_single_monomial()) continue;
        const Monomial& m = a.lin.begin()->first;
        if (low.where.find(m) == low.where.end())
          low.where[m] = {static_cast<int>(b), i, j};
      }
  // the constant monomial needs a home: moment matrix corner (1,1)
  if (low.where.find(Monomial{}) == low.where.end())
    low.where[Monomial{}] = {0, 0, 0};

  SdpProblem& sdp = low.problem;
  sdp.mode = SdpProblem::Mode::kFeasibility;
  for (auto& b : blocks) sdp.block_dims.push_back(b.dim);

  auto push_coeff = [&](std::vector<SdpEntry>& es, const std::array<int, 3>& at,
                        double c) {
    es.push_back({at[0], at[1], at[2], at[1] == at[2] ? c : c / 2.0});
  };
  auto rep_of = [&](const Monomial& m) -> const std::array<int, 3>& {
    auto it = low.where.find(m);
    if (it == low.where.end())
      throw std::logic_error("lowering: uncovered moment " + m.to_string());
    return it->second;
  };

  // tie every entry to the representative moments it is made of
  for (size_t b = 0; b < blocks.size(); ++b)
    for (int i = 0; i < blocks[b].dim; ++i)
      for (int j = i; j < blocks[b].dim; ++j) {
        const Affine& a = blocks[b].entries[i][j - i];
        std::array<int, 3> self = {static_cast<int>(b), i, j};
        if (a.is_single_monomial() && rep_of(a.lin.begin()->first) == self)
          continue;
        std::vector<SdpEntry> es;
        push_coeff(es, self, 1.0);
        for (auto& [m, c] : a.lin) push_coeff(es, rep_of(m), -c);
        sdp.add_constraint(std::move(es), a.constant);
      }

  // normalization pE[1] = 1
  {
    std::vector<SdpEntry> es;
    push_coeff(es, rep_of(Monomial{}), 1.0);
    sdp.add_constraint(std::move(es), 1.0);
  }

  // equality axioms times the tracked multipliers; combinations whose
  // monomials the profile does not cover are skipped
  std::vector<Poly> multipliers;
  multipliers.push_back(Poly(1.0, prog.space));
  for (auto& m : prof.mu_multipliers) multipliers.push_back(m);
  for (auto& eq : prog.equalities)
    for (auto& mult : multipliers) {
      Affine a = to_affine(eq * mult, prog.boolean_mask);
      if (a.is_zero()) continue;
      bool covered = true;
      for (auto& [m, c] : a.lin)
        if (low.where.find(m) == low.where.end()) {
          covered = false;
          break;
        }
      if (!covered) continue;
      std::vector<SdpEntry> es;
      for (auto& [m, c] : a.lin) push_coeff(es, rep_of(m), c);
      if (es.empty()) continue;
      sdp.add_constraint(std::move(es), -a.constant);
    }

  return low;
}

PseudoExpectation extract_pe(const SdpLowering& lowering,
                             const SdpSolution& solution) {
  PseudoExpectation pe;
  pe.space = lowering.space;
  pe.degree = lowering.pe_degree;
  pe.boolean_mask = lowering.boolean_mask;
  for (auto& [m, at] : lowering.where)
    pe.moments[m] = solution.primal[at[0]](at[1], at[2]);
  return pe;
}

IndicatorReport verify_indicator_satisfiability(const Eigen::MatrixXd& samples,
                                                const std::vector<int>& subset,
                                                int t, double tau) {
  if (subset.empty())
    throw std::invalid_argument("verify_indicator_satisfiability: empty subset");
  const int n = static_cast<int>(samples.rows());
  const int d = static_cast<int>(samples.cols());
  const double alpha_n = static_cast<double>(subset.size());
  const double alpha = alpha_n / n;

  Eigen::VectorXd mu = Eigen::VectorXd::Zero(d);
  for (int i : subset) mu += samples.row(i).transpose();
  mu /= alpha_n;

  IndicatorReport rep;
  // booleanness is exact for an indicator; the mean equation residual is the
  // floating-point defect of mu * |S| - sum X_i
  Eigen::VectorXd mean_resid = mu * alpha_n;
  for (int i : subset) mean_resid -= samples.row(i).transpose();
  rep.max_equality_residual = mean_resid.cwiseAbs().maxCoeff();

  rep.size_lower_margin = alpha_n - (1.0 - tau) * alpha * n;
  rep.size_upper_margin = (1.0 + tau) * alpha * n - alpha_n;

  auto tuples = symmetric_index_basis(d, t / 2);
  const int D = static_cast<int>(tuples.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(D, D);
  for (int i : subset) {
    Eigen::VectorXd v(D);
    for (int a = 0; a < D; ++a) {
      double prod = std::sqrt(index_orbit_size(tuples[a], d));
      for (int c : tuples[a]) prod *= samples(i, c) - mu(c);
      v(a) = prod;
    }
    M += v * v.transpose();
  }
  M /= alpha_n;
  Eigen::MatrixXd rhs(D, D);
  for (int a = 0; a < D; ++a)
    for (int b = a; b < D; ++b) {
      std::vector<int> idx = tuples[a];
      idx.insert(idx.end(), tuples[b].begin(), tuples[b].end());
      double wgt = std::sqrt(index_orbit_size(tuples[a], d) *
                             index_orbit_size(tuples[b], d));
      rhs(a, b) = rhs(b, a) = wgt * wick(std::move(idx));
    }
  Eigen::MatrixXd slack = 2.0 * rhs - M;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(slack,
                                                    Eigen::EigenvaluesOnly);
  rep.matrix_slack_min_eig = es.eigenvalues().minCoeff();
  return rep;
}

SatisfactionReport check_satisfies(const PseudoExpectation& pe,
                                   const StructuredSubsetProgram& prog,
                                   double tol) {
  Profile prof = make_profile(prog);
  SatisfactionReport rep;

  auto m1 = pe.moment(Monomial{});
  rep.normalization_residual = m1 ? std::abs(*m1 - 1.0) : 1.0;
  rep.normalized = rep.normalization_residual <= tol;

  PseudoExpectation reducer;
  reducer.boolean_mask = prog.boolean_mask;
  auto try_eval = [&](const Poly& p, double& out) {
    double acc = 0.0;
    for (auto& [m, c] : p.terms()) {
      auto v = pe.moment(m);
      if (!v) return false;
      acc += c * *v;
    }
    out = acc;
    return true;
  };

  for (auto& eq : prog.equalities) {
    double v;
    if (try_eval(eq, v))
      rep.max_equality_residual = std::max(rep.max_equality_residual,
                                           std::abs(v));
  }

  // min eigenvalues are reported for matrices normalized to unit entry
  // scale, so the tolerance is relative to the block's magnitude
  auto scaled_min_eig = [](const Eigen::MatrixXd& B) {
    double scale = std::max(1.0, B.cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B,
                                                      Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() / scale;
  };

  rep.min_moment_eig = scaled_min_eig(moment_matrix(pe, prof.mm_basis).entries);

  rep.min_localizing_eig = 0.0;
  bool first = true;
  auto track_loc = [&](double v) {
    rep.min_localizing_eig = first ? v : std::min(rep.min_localizing_eig, v);
    first = false;
  };
  for (auto& s : prog.scalar_inequalities)
    track_loc(scaled_min_eig(localizing_matrix(pe, s, prof.mu_basis).entries));
  if (prog.scalar_inequalities.size() >= 2) {
    Poly prod = prog.scalar_inequalities[0] * prog.scalar_inequalities[1];
    double v;
    if (try_eval(prod, v)) track_loc(v / std::max(1.0, std::abs(v)));
  }
  for (int i = 0; i < prog.n(); ++i) {
    Poly wi = Poly::var(prog.w_var(i), prog.space);
    track_loc(
        scaled_min_eig(localizing_matrix(pe, wi, prof.mu_basis).entries));
  }

  rep.min_matrix_eig = 0.0;
  for (size_t k = 0; k < prog.matrix_inequalities.size(); ++k) {
    Eigen::MatrixXd B = matrix_localizing(pe, prog.matrix_inequalities[k],
                                          std::vector<Monomial>{Monomial{}});
    double v = scaled_min_eig(B);
    rep.min_matrix_eig = k == 0 ? v : std::min(rep.min_matrix_eig, v);
  }
  return rep;
}

std::string program_summary_json(const StructuredSubsetProgram& prog) {
  nlohmann::json j;
  j["n"] = prog.n();
  j["d"] = prog.d();
  j["alpha"] = prog.alpha;
  j["t"] = prog.t;
  j["tau"] = prog.tau;
  j["variant"] =
      prog.variant == StructuredSubsetProgram::Variant::kGaussianWarmup
          ? "gaussian_warmup"
          : "general_explicit";
  j["variables"] = prog.space->count();
  j["equalities"] = prog.equalities.size();
  j["scalar_inequalities"] = prog.scalar_inequalities.size();
  j["matrix_inequalities"] = prog.matrix_inequalities.size();
  j["max_constraint_degree"] = prog.max_constraint_degree();
  return j.dump();
}

}  // namespace sos
