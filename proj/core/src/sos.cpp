#include "sos/sos.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace sos {

Monomial PseudoExpectation::canonical(const Monomial& m) const {
  if (boolean_mask.empty()) return m;
  Monomial out;
  for (auto& [v, e] : m.terms()) {
    bool boolean = v < static_cast<int>(boolean_mask.size()) && boolean_mask[v];
    out = out * Monomial::var(v, boolean ? 1 : e);
  }
  return out;
}

std::optional<double> PseudoExpectation::moment(const Monomial& m) const {
  Monomial c = canonical(m);
  if (c.degree() > degree) return std::nullopt;
  if (atom) return c.eval(*atom);
  auto it = moments.find(c);
  if (it == moments.end()) return std::nullopt;
  return it->second;
}

PseudoExpectation PseudoExpectation::point_mass(VariableSpacePtr space,
                                                std::vector<double> point,
                                                int degree,
                                                std::vector<char> boolean_mask) {
  PseudoExpectation pe;
  pe.space = std::move(space);
  pe.degree = degree;
  pe.boolean_mask = std::move(boolean_mask);
  pe.atom = std::move(point);
  return pe;
}

double pe_eval(const PseudoExpectation& pe, const Poly& p) {
  double out = 0.0;
  for (auto& [m, c] : p.terms()) {
    auto v = pe.moment(m);
    if (!v)
      throw std::out_of_range("pe_eval: moment unavailable for " +
                              m.to_string());
    out += c * *v;
  }
  return out;
}

double MomentMatrix::min_eigenvalue() const {
  if (entries.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(entries,
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

std::vector<Monomial> monomials_up_to(const std::vector<int>& vars, int degree,
                                      const std::vector<char>& boolean_mask) {
  std::vector<Monomial> out;
  Monomial cur;
  std::function<void(size_t, int, Monomial)> rec = [&](size_t idx, int left,
                                                       Monomial m) {
    if (idx == vars.size()) {
      out.push_back(m);
      return;
    }
    int v = vars[idx];
    bool boolean =
        v < static_cast<int>(boolean_mask.size()) && boolean_mask[v];
    int cap = boolean ? std::min(1, left) : left;
    for (int e = 0; e <= cap; ++e)
      rec(idx + 1, left - e, e == 0 ? m : m * Monomial::var(v, e));
  };
  rec(0, degree, cur);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Monomial> monomials_up_to(int nvars, int degree,
                                      const std::vector<char>& boolean_mask) {
  std::vector<int> vars(nvars);
  for (int i = 0; i < nvars; ++i) vars[i] = i;
  return monomials_up_to(vars, degree, boolean_mask);
}

namespace {

std::vector<Monomial> default_basis(const PseudoExpectation& pe,
                                    int half_degree) {
  if (!pe.space) throw std::invalid_argument("pseudoexpectation has no space");
  return monomials_up_to(pe.space->count(), half_degree, pe.boolean_mask);
}

}  // namespace

MomentMatrix moment_matrix(const PseudoExpectation& pe,
                           const std::vector<Monomial>& basis) {
  MomentMatrix out;
  out.row_monomials = basis;
  int n = static_cast<int>(basis.size());
  out.entries.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      auto v = pe.moment(basis[i] * basis[j]);
      if (!v)
        throw std::out_of_range("moment matrix: degree overflow at " +
                                (basis[i] * basis[j]).to_string());
      out.entries(i, j) = *v;
      out.entries(j, i) = *v;
    }
  return out;
}

MomentMatrix moment_matrix(const PseudoExpectation& pe, int half_degree) {
  if (2 * half_degree > pe.degree)
    throw std::out_of_range("moment matrix: degree overflow");
  return moment_matrix(pe, default_basis(pe, half_degree));
}

MomentMatrix localizing_matrix(const PseudoExpectation& pe, const Poly& g,
                               const std::vector<Monomial>& basis) {
  MomentMatrix out;
  out.row_monomials = basis;
  int n = static_cast<int>(basis.size());
  out.entries.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      double acc = 0.0;
      for (auto& [m, c] : g.terms()) {
        auto v = pe.moment(basis[i] * basis[j] * m);
        if (!v)
          throw std::out_of_range("localizing matrix: degree overflow");
        acc += c * *v;
      }
      out.entries(i, j) = acc;
      out.entries(j, i) = acc;
    }
  return out;
}

MomentMatrix localizing_matrix(const PseudoExpectation& pe, const Poly& g,
                               int half_degree) {
  if (2 * half_degree + std::max(g.degree(), 0) > pe.degree)
    throw std::out_of_range("localizing matrix: degree overflow");
  return localizing_matrix(pe, g, default_basis(pe, half_degree));
}

Eigen::MatrixXd matrix_localizing(const PseudoExpectation& pe,
                                  const PolyMatrix& M,
                                  const std::vector<Monomial>& basis) {
  int nb = static_cast<int>(basis.size());
  int md = M.dim();
  Eigen::MatrixXd out(nb * md, nb * md);
  for (int a = 0; a < nb; ++a)
    for (int b = a; b < nb; ++b) {
      Monomial prod = basis[a] * basis[b];
      for (int i = 0; i < md; ++i)
        for (int j = 0; j < md; ++j) {
          double acc = 0.0;
          for (auto& [m, c] : M.at(i, j).terms()) {
            auto v = pe.moment(prod * m);
            if (!v)
              throw std::out_of_range("matrix localizing: degree overflow");
            acc += c * *v;
          }
          out(a * md + i, b * md + j) = acc;
          out(b * md + j, a * md + i) = acc;
        }
    }
  return out;
}

Eigen::MatrixXd matrix_localizing(const PseudoExpectation& pe,
                                  const PolyMatrix& M, int half_degree) {
  if (2 * half_degree + std::max(M.degree(), 0) > pe.degree)
    throw std::out_of_range("matrix localizing: degree overflow");
  return matrix_localizing(pe, M, default_basis(pe, half_degree));
}

namespace {

std::vector<int> variables_of(const Poly& p) {
  std::vector<int> vars;
  for (auto& [m, c] : p.terms())
    for (auto& [v, e] : m.terms())
      if (std::find(vars.begin(), vars.end(), v) == vars.end())
        vars.push_back(v);
  std::sort(vars.begin(), vars.end());
  return vars;
}

bool is_homogeneous(const Poly& p, int deg) {
  for (auto& [m, c] : p.terms())
    if (m.degree() != deg) return false;
  return true;
}

std::vector<Monomial> homogeneous_monomials(const std::vector<int>& vars,
                                            int degree) {
  std::vector<Monomial> all = monomials_up_to(vars, degree);
  std::vector<Monomial> out;
  for (auto& m : all)
    if (m.degree() == degree) out.push_back(m);
  return out;
}

}  // namespace

std::optional<SosCertificate> sos_certify(const Poly& p, int degree,
                                          const SdpSettings& settings) {
  if (degree % 2 != 0) throw std::invalid_argument("sos_certify: odd degree");
  if (p.degree() > degree)
    throw std::invalid_argument("sos_certify: degree too small for p");

  std::vector<int> vars = variables_of(p);
  std::vector<Monomial> basis;
  if (!p.is_zero() && is_homogeneous(p, degree))
    basis = homogeneous_monomials(vars, degree / 2);
  else
    basis = monomials_up_to(vars, degree / 2);
  int n = static_cast<int>(basis.size());

  // coefficient matching: for every product monomial, the sum of the matching
  // gram entries equals the coefficient in p
  std::map<Monomial, std::vector<SdpEntry>> by_monomial;
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b)
      by_monomial[basis[a] * basis[b]].push_back({0, a, b, 1.0});
  for (auto& [m, c] : p.terms())
    if (by_monomial.find(m) == by_monomial.end())
      return std::nullopt;  // monomial not expressible as a product of basis

  SdpProblem prob;
  prob.block_dims = {n};
  prob.mode = SdpProblem::Mode::kFeasibility;
  for (auto& [m, entries] : by_monomial)
    prob.add_constraint(entries, p.coeff(m));

  SdpSolution sol = solve(prob, settings);
  if (sol.status == SdpStatus::kInfeasible) return std::nullopt;
  if (sol.status != SdpStatus::kOptimal)
    throw std::runtime_error("sos_certify: sdp did not converge");

  SosCertificate cert;
  cert.basis = basis;
  cert.gram = sol.primal[0];
  cert.residual = 0.0;
  for (auto& [m, entries] : by_monomial) {
    double got = 0.0;
    for (auto& e : entries)
      got += (e.i == e.j) ? cert.gram(e.i, e.i) : 2.0 * cert.gram(e.i, e.j);
    cert.residual = std::max(cert.residual, std::abs(got - p.coeff(m)));
  }
  return cert;
}

namespace {

double multinomial(int s, const std::vector<int>& theta) {
  double out = 1.0;
  int used = 0;
  for (int t : theta) {
    for (int r = 1; r <= t; ++r) out *= static_cast<double>(used + r) / r;
    used += t;
  }
  (void)s;
  return out;
}

void enumerate_compositions(int d, int s,
                            const std::function<void(const std::vector<int>&)>& f) {
  std::vector<int> theta(d, 0);
  std::function<void(int, int)> rec = [&](int idx, int left) {
    if (idx == d - 1) {
      theta[idx] = left;
      f(theta);
      return;
    }
    for (int e = 0; e <= left; ++e) {
      theta[idx] = e;
      rec(idx + 1, left - e);
    }
  };
  if (d == 0) return;
  rec(0, s);
}

}  // namespace

BoundednessReport certify_explicit_boundedness(const MomentOracle& oracle,
                                               int d, int t, double sigma,
                                               const SdpSettings& settings) {
  if (t % 2 != 0) throw std::invalid_argument("t must be even");
  BoundednessReport rep;
  for (int s = 2; s <= t; s += 2) {
    // (sigma s)^{s/2} ||u||^s
    Poly norm2;
    for (int i = 0; i < d; ++i) norm2 = norm2 + Poly::var(i) * Poly::var(i);
    Poly ps(1.0);
    for (int r = 0; r < s / 2; ++r) ps = ps * norm2;
    ps = ps * std::pow(sigma * s, s / 2.0);
    // minus E<Y - mu, u>^s expanded by multinomials
    enumerate_compositions(d, s, [&](const std::vector<int>& theta) {
      double mom = oracle(theta);
      if (mom == 0.0) return;
      Monomial u_theta;
      for (int i = 0; i < d; ++i)
        if (theta[i] > 0) u_theta = u_theta * Monomial::var(i, theta[i]);
      ps = ps - Poly(u_theta, multinomial(s, theta) * mom);
    });

    auto cert = sos_certify(ps, s, settings);
    rep.per_s.push_back({s, cert.has_value(), cert ? cert->residual : 0.0});
    if (!cert) rep.all_sos = false;
  }
  return rep;
}

std::string pe_to_json(const PseudoExpectation& pe) {
  nlohmann::json j = nlohmann::json::object();
  if (pe.atom) throw std::invalid_argument("pe_to_json: materialize the atom first");
  for (auto& [m, v] : pe.moments) j[m.to_string()] = v;
  return j.dump();
}

PseudoExpectation pe_from_json(const std::string& text, VariableSpacePtr space,
                               int degree, std::vector<char> boolean_mask) {
  PseudoExpectation pe;
  pe.space = std::move(space);
  pe.degree = degree;
  pe.boolean_mask = std::move(boolean_mask);
  nlohmann::json j = nlohmann::json::parse(text);
  for (auto& [key, val] : j.items()) {
    Poly p = Poly::parse(key == "1" ? key : "1 * " + key);
    if (p.terms().size() != 1)
      throw std::invalid_argument("bad monomial key: " + key);
    pe.moments[p.terms().begin()->first] = val.get<double>();
  }
  return pe;
}

}  // namespace sos
