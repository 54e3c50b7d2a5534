#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sos/poly.hpp"
#include "sos/sdp.hpp"

namespace sos {

// Linear functional on monomials up to an even degree D, normalized so that
// the moment of 1 is 1. Variables flagged in boolean_mask satisfy x^2 = x, and
// their exponents are reduced to <= 1 before any moment lookup.
struct PseudoExpectation {
  VariableSpacePtr space;
  int degree = 2;
  std::map<Monomial, double> moments;
  std::vector<char> boolean_mask;           // empty means no boolean variables
  std::optional<std::vector<double>> atom;  // set for point masses

  Monomial canonical(const Monomial& m) const;
  // nullopt when the moment is not tracked (truncated relaxations)
  std::optional<double> moment(const Monomial& m) const;

  static PseudoExpectation point_mass(VariableSpacePtr space,
                                      std::vector<double> point, int degree,
                                      std::vector<char> boolean_mask = {});
};

double pe_eval(const PseudoExpectation& pe, const Poly& p);

struct MomentMatrix {
  std::vector<Monomial> row_monomials;
  Eigen::MatrixXd entries;

  double min_eigenvalue() const;
};

// all monomials of degree <= degree over the given variables, graded order;
// boolean variables contribute exponents at most 1
std::vector<Monomial> monomials_up_to(const std::vector<int>& vars, int degree,
                                      const std::vector<char>& boolean_mask = {});
std::vector<Monomial> monomials_up_to(int nvars, int degree,
                                      const std::vector<char>& boolean_mask = {});

MomentMatrix moment_matrix(const PseudoExpectation& pe, int half_degree);
MomentMatrix moment_matrix(const PseudoExpectation& pe,
                           const std::vector<Monomial>& basis);
MomentMatrix localizing_matrix(const PseudoExpectation& pe, const Poly& g,
                               int half_degree);
MomentMatrix localizing_matrix(const PseudoExpectation& pe, const Poly& g,
                               const std::vector<Monomial>& basis);
// block matrix [pe[m_a m_b M_ij]] indexed by (monomial, matrix-row) pairs
Eigen::MatrixXd matrix_localizing(const PseudoExpectation& pe,
                                  const PolyMatrix& M, int half_degree);
Eigen::MatrixXd matrix_localizing(const PseudoExpectation& pe,
                                  const PolyMatrix& M,
                                  const std::vector<Monomial>& basis);

struct SosCertificate {
  std::vector<Monomial> basis;
  Eigen::MatrixXd gram;
  double residual;  // max coefficient mismatch of p - z^T Q z
};

// Gram-matrix search for p = z^T Q z with Q psd; nullopt when the underlying
// SDP is infeasible (p is not a sum of squares at this degree)
std::optional<SosCertificate> sos_certify(const Poly& p, int degree,
                                          const SdpSettings& settings = {});

// E[(Y - mu)^theta] for a multi-index theta over d coordinates
using MomentOracle = std::function<double(const std::vector<int>&)>;

struct BoundednessReport {
  struct PerS {
    int s;
    bool is_sos;
    double residual;
  };
  std::vector<PerS> per_s;
  bool all_sos = true;
};

// for each even s <= t, certifies (sigma s)^{s/2} ||u||^s - E<Y-mu, u>^s
BoundednessReport certify_explicit_boundedness(const MomentOracle& oracle,
                                               int d, int t, double sigma = 1.0,
                                               const SdpSettings& settings = {});

// moment map as JSON-ish text fixture {monomial-string: value}
std::string pe_to_json(const PseudoExpectation& pe);
PseudoExpectation pe_from_json(const std::string& text, VariableSpacePtr space,
                               int degree, std::vector<char> boolean_mask = {});

}  // namespace sos
