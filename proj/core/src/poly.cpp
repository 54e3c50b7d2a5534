#include "sos/poly.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace sos {

VariableSpacePtr make_space(std::vector<std::string> names) {
  for (size_t i = 0; i < names.size(); ++i)
    for (size_t j = i + 1; j < names.size(); ++j)
      if (names[i] == names[j])
        throw std::invalid_argument("duplicate variable name: " + names[i]);
  auto sp = std::make_shared<VariableSpace>();
  sp->names = std::move(names);
  return sp;
}

VariableSpacePtr make_space(int n) {
  std::vector<std::string> names;
  names.reserve(n);
  for (int i = 0; i < n; ++i) names.push_back("v" + std::to_string(i));
  return make_space(std::move(names));
}

Monomial Monomial::var(int index, int exp) {
  Monomial m;
  if (exp < 0) throw std::invalid_argument("negative exponent");
  if (exp > 0) m.exps_.push_back({index, exp});
  return m;
}

int Monomial::degree() const {
  int d = 0;
  for (auto& [v, e] : exps_) d += e;
  return d;
}

int Monomial::exponent(int index) const {
  for (auto& [v, e] : exps_)
    if (v == index) return e;
  return 0;
}

Monomial Monomial::operator*(const Monomial& o) const {
  Monomial out;
  out.exps_.reserve(exps_.size() + o.exps_.size());
  size_t i = 0, j = 0;
  while (i < exps_.size() && j < o.exps_.size()) {
    if (exps_[i].first < o.exps_[j].first) {
      out.exps_.push_back(exps_[i++]);
    } else if (exps_[i].first > o.exps_[j].first) {
      out.exps_.push_back(o.exps_[j++]);
    } else {
      out.exps_.push_back({exps_[i].first, exps_[i].second + o.exps_[j].second});
      ++i;
      ++j;
    }
  }
  while (i < exps_.size()) out.exps_.push_back(exps_[i++]);
  while (j < o.exps_.size()) out.exps_.push_back(o.exps_[j++]);
  return out;
}

double Monomial::eval(const std::vector<double>& point) const {
  double out = 1.0;
  for (auto& [v, e] : exps_) {
    if (v >= static_cast<int>(point.size()))
      throw std::invalid_argument("point too short for monomial");
    out *= std::pow(point[v], e);
  }
  return out;
}

bool Monomial::operator<(const Monomial& o) const {
  int da = degree(), db = o.degree();
  if (da != db) return da < db;
  // lexicographic on the sparse exponent sequences: earlier variable with a
  // higher exponent ranks first within a degree class
  size_t i = 0, j = 0;
  while (i < exps_.size() && j < o.exps_.size()) {
    if (exps_[i].first != o.exps_[j].first)
      return exps_[i].first > o.exps_[j].first;
    if (exps_[i].second != o.exps_[j].second)
      return exps_[i].second < o.exps_[j].second;
    ++i;
    ++j;
  }
  return exps_.size() < o.exps_.size() ? false : i < exps_.size() ? true : false;
}

std::string Monomial::to_string() const {
  if (exps_.empty()) return "1";
  std::ostringstream out;
  bool first = true;
  for (auto& [v, e] : exps_) {
    if (!first) out << " * ";
    first = false;
    out << "v" << v;
    if (e > 1) out << "^" << e;
  }
  return out.str();
}

Poly::Poly(double c, VariableSpacePtr space) : space_(std::move(space)) {
  if (c != 0.0) terms_[Monomial{}] = c;
}

Poly::Poly(const Monomial& m, double c, VariableSpacePtr space)
    : space_(std::move(space)) {
  if (c != 0.0) terms_[m] = c;
}

Poly Poly::var(int index, VariableSpacePtr space) {
  return Poly(Monomial::var(index), 1.0, std::move(space));
}

int Poly::degree() const {
  int d = -1;
  for (auto& [m, c] : terms_) d = std::max(d, m.degree());
  return d;
}

double Poly::coeff(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

void Poly::add_term(const Monomial& m, double c) {
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

void Poly::check_space(const Poly& o) const {
  if (space_ && o.space_ && !(*space_ == *o.space_))
    throw std::invalid_argument("polynomials from different variable spaces");
}

Poly Poly::operator+(const Poly& o) const {
  check_space(o);
  Poly out = *this;
  if (!out.space_) out.space_ = o.space_;
  for (auto& [m, c] : o.terms_) out.add_term(m, c);
  return out;
}

Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

Poly Poly::operator-() const {
  Poly out = *this;
  for (auto& [m, c] : out.terms_) c = -c;
  return out;
}

Poly Poly::operator*(const Poly& o) const {
  check_space(o);
  Poly out;
  out.space_ = space_ ? space_ : o.space_;
  for (auto& [ma, ca] : terms_)
    for (auto& [mb, cb] : o.terms_) out.add_term(ma * mb, ca * cb);
  return out;
}

Poly Poly::operator*(double s) const {
  Poly out;
  out.space_ = space_;
  if (s == 0.0) return out;
  for (auto& [m, c] : terms_) out.terms_[m] = c * s;
  return out;
}

double Poly::eval(const std::vector<double>& point) const {
  if (space_ && static_cast<int>(point.size()) != space_->count())
    throw std::invalid_argument("point length does not match variable count");
  double out = 0.0;
  for (auto& [m, c] : terms_) out += c * m.eval(point);
  return out;
}

std::string Poly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream out;
  out.precision(17);
  bool first = true;
  for (auto& [m, c] : terms_) {
    if (!first) out << " + ";
    first = false;
    out << c;
    if (!m.is_one()) out << " * " << m.to_string();
  }
  return out.str();
}

Poly Poly::parse(const std::string& text, VariableSpacePtr space) {
  Poly out;
  out.space_ = std::move(space);
  if (text == "0") return out;
  std::istringstream in(text);
  std::string term;
  // terms are separated by " + "; factors inside a term by " * "
  std::string token;
  std::vector<std::string> tokens;
  while (in >> token) tokens.push_back(token);
  size_t i = 0;
  while (i < tokens.size()) {
    double c = std::strtod(tokens[i].c_str(), nullptr);
    ++i;
    Monomial m;
    while (i + 1 < tokens.size() && tokens[i] == "*") {
      const std::string& f = tokens[i + 1];
      if (f.empty() || f[0] != 'v')
        throw std::invalid_argument("bad factor: " + f);
      auto caret = f.find('^');
      int v = std::stoi(f.substr(1, caret - 1));
      int e = caret == std::string::npos ? 1 : std::stoi(f.substr(caret + 1));
      m = m * Monomial::var(v, e);
      i += 2;
    }
    out.add_term(m, c);
    if (i < tokens.size()) {
      if (tokens[i] != "+") throw std::invalid_argument("expected +");
      ++i;
    }
  }
  return out;
}

Poly inner_power(const PolyVector& a, const PolyVector& b, int t) {
  if (a.size() != b.size())
    throw std::invalid_argument("inner_power: length mismatch");
  if (t < 1) throw std::invalid_argument("inner_power: t must be >= 1");
  Poly ip;
  for (size_t i = 0; i < a.size(); ++i) ip = ip + a[i] * b[i];
  Poly out(1.0);
  for (int s = 0; s < t; ++s) out = out * ip;
  return out;
}

void PolyMatrix::set(int i, int j, const Poly& p) {
  entries_[i * dim_ + j] = p;
  entries_[j * dim_ + i] = p;
}

int PolyMatrix::degree() const {
  int d = -1;
  for (auto& p : entries_) d = std::max(d, p.degree());
  return d;
}

}  // namespace sos
