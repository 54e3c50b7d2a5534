#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace sos {

// Ordered set of indeterminates. Indices into `names` are the variable ids
// used everywhere else; they stay stable for the lifetime of a program.
struct VariableSpace {
  std::vector<std::string> names;

  int count() const { return static_cast<int>(names.size()); }

  bool operator==(const VariableSpace& o) const { return names == o.names; }
};

using VariableSpacePtr = std::shared_ptr<const VariableSpace>;

VariableSpacePtr make_space(std::vector<std::string> names);
// Convenience: variables named v0..v{n-1}.
VariableSpacePtr make_space(int n);

// Sparse exponent vector. Entries are (variable index, exponent>0), sorted by
// variable index.
class Monomial {
 public:
  Monomial() = default;  // the monomial 1
  static Monomial var(int index, int exp = 1);

  int degree() const;
  bool is_one() const { return exps_.empty(); }
  int exponent(int index) const;
  const std::vector<std::pair<int, int>>& terms() const { return exps_; }

  Monomial operator*(const Monomial& o) const;
  double eval(const std::vector<double>& point) const;

  // graded lexicographic: degree first, then exponent sequence
  bool operator<(const Monomial& o) const;
  bool operator==(const Monomial& o) const { return exps_ == o.exps_; }

  std::string to_string() const;

 private:
  std::vector<std::pair<int, int>> exps_;
};

// Sparse polynomial with double coefficients; zero coefficients are never
// stored. Immutable in practice: all operations return new values.
class Poly {
 public:
  Poly() = default;
  explicit Poly(double c, VariableSpacePtr space = nullptr);
  Poly(const Monomial& m, double c, VariableSpacePtr space = nullptr);
  static Poly var(int index, VariableSpacePtr space = nullptr);

  const std::map<Monomial, double>& terms() const { return terms_; }
  const VariableSpacePtr& space() const { return space_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const;  // -1 for the zero polynomial
  double coeff(const Monomial& m) const;
  double constant() const { return coeff(Monomial{}); }

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator-() const;
  Poly operator*(const Poly& o) const;
  Poly operator*(double s) const;

  double eval(const std::vector<double>& point) const;

  std::string to_string() const;
  static Poly parse(const std::string& text, VariableSpacePtr space = nullptr);

 private:
  void add_term(const Monomial& m, double c);
  void check_space(const Poly& o) const;

  std::map<Monomial, double> terms_;
  VariableSpacePtr space_;
};

inline Poly operator*(double s, const Poly& p) { return p * s; }

using PolyVector = std::vector<Poly>;

// (<a,b>)^t expanded in the monomial basis
Poly inner_power(const PolyVector& a, const PolyVector& b, int t);

// Symmetric matrix of polynomials, M[i][j] == M[j][i].
class PolyMatrix {
 public:
  PolyMatrix() = default;
  explicit PolyMatrix(int dim) : dim_(dim), entries_(dim * dim) {}

  int dim() const { return dim_; }
  const Poly& at(int i, int j) const { return entries_[i * dim_ + j]; }
  void set(int i, int j, const Poly& p);
  int degree() const;

 private:
  int dim_ = 0;
  std::vector<Poly> entries_;
};

}  // namespace sos
