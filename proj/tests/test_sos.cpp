#include <doctest.h>

#include <cmath>
#include <random>

#include "sos/poly.hpp"
#include "sos/sos.hpp"

using namespace sos;

namespace {

double dbl_factorial(int n) {  // (n-1)!! for even n, i.e. E g^n, g ~ N(0,1)
  if (n % 2 != 0) return 0.0;
  double out = 1.0;
  for (int k = n - 1; k > 1; k -= 2) out *= k;
  return out;
}

Eigen::MatrixXd to_dense(const MomentMatrix& M) { return M.entries; }

}  // namespace

TEST_CASE("moment matrix of a point mass is the rank-one outer product") {
  auto sp = make_space(1);
  auto pe = PseudoExpectation::point_mass(sp, {2.0}, 2);
  auto M = moment_matrix(pe, 1);
  REQUIRE(M.row_monomials.size() == 2);
  CHECK(M.entries(0, 0) == doctest::Approx(1.0));
  CHECK(M.entries(0, 1) == doctest::Approx(2.0));
  CHECK(M.entries(1, 0) == doctest::Approx(2.0));
  CHECK(M.entries(1, 1) == doctest::Approx(4.0));
}

TEST_CASE("moment matrices of simple empirical distributions") {
  auto sp = make_space(1);
  PseudoExpectation rademacher;
  rademacher.space = sp;
  rademacher.degree = 2;
  rademacher.moments[Monomial{}] = 1.0;
  rademacher.moments[Monomial::var(0)] = 0.0;
  rademacher.moments[Monomial::var(0, 2)] = 1.0;
  Eigen::MatrixXd M = to_dense(moment_matrix(rademacher, 1));
  CHECK(M.isApprox((Eigen::MatrixXd(2, 2) << 1, 0, 0, 1).finished(), 1e-12));

  PseudoExpectation coin;
  coin.space = sp;
  coin.degree = 2;
  coin.moments[Monomial{}] = 1.0;
  coin.moments[Monomial::var(0)] = 0.5;
  coin.moments[Monomial::var(0, 2)] = 0.5;
  Eigen::MatrixXd C = to_dense(moment_matrix(coin, 1));
  CHECK(C.isApprox((Eigen::MatrixXd(2, 2) << 1, 0.5, 0.5, 0.5).finished(),
                   1e-12));
}

TEST_CASE("localizing matrices") {
  auto sp = make_space(1);
  Poly g = Poly::var(0, sp) - Poly(1.0, sp);

  SUBCASE("multiplier 1 reproduces the moment matrix") {
    auto pe = PseudoExpectation::point_mass(sp, {1.5}, 4);
    Eigen::MatrixXd A = to_dense(moment_matrix(pe, 1));
    Eigen::MatrixXd B = to_dense(localizing_matrix(pe, Poly(1.0, sp), 1));
    CHECK(A.isApprox(B, 1e-12));
  }
  SUBCASE("point mass at 3 satisfies x - 1 >= 0") {
    auto pe = PseudoExpectation::point_mass(sp, {3.0}, 2);
    auto L = localizing_matrix(pe, g, 0);
    REQUIRE(L.entries.rows() == 1);
    CHECK(L.entries(0, 0) == doctest::Approx(2.0));
  }
  SUBCASE("point mass at 0 violates x - 1 >= 0") {
    auto pe = PseudoExpectation::point_mass(sp, {0.0}, 2);
    auto L = localizing_matrix(pe, g, 0);
    CHECK(L.entries(0, 0) == doctest::Approx(-1.0));
    CHECK(L.min_eigenvalue() < 0.0);
  }
}

TEST_CASE("matrix-valued localizing blocks") {
  auto sp = make_space(2);
  SUBCASE("1x1 identity reproduces the moment matrix") {
    auto pe = PseudoExpectation::point_mass(sp, {0.3, -1.2}, 4);
    PolyMatrix M(1);
    M.set(0, 0, Poly(1.0, sp));
    Eigen::MatrixXd A = to_dense(moment_matrix(pe, 1));
    Eigen::MatrixXd B = matrix_localizing(pe, M, 1);
    CHECK(A.isApprox(B, 1e-12));
  }
  SUBCASE("diagonal matrix gives a block-diagonal of localizers") {
    auto pe = PseudoExpectation::point_mass(sp, {0.7, 0.4}, 4);
    Poly g1 = Poly::var(0, sp);
    Poly g2 = Poly::var(1, sp) - Poly(2.0, sp);
    PolyMatrix M(2);
    M.set(0, 0, g1);
    M.set(1, 1, g2);
    M.set(0, 1, Poly(0.0, sp));
    Eigen::MatrixXd B = matrix_localizing(pe, M, 1);
    Eigen::MatrixXd L1 = to_dense(localizing_matrix(pe, g1, 1));
    Eigen::MatrixXd L2 = to_dense(localizing_matrix(pe, g2, 1));
    int k = static_cast<int>(L1.rows());
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) {
        CHECK(B(2 * a, 2 * b) == doctest::Approx(L1(a, b)));
        CHECK(B(2 * a + 1, 2 * b + 1) == doctest::Approx(L2(a, b)));
        CHECK(B(2 * a, 2 * b + 1) == doctest::Approx(0.0));
      }
  }
  SUBCASE("point mass gives the Kronecker product with M at the point") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-2.0, 2.0);
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> xhat = {U(rng), U(rng)};
      PolyMatrix M(2);
      for (int i = 0; i < 2; ++i)
        for (int j = i; j < 2; ++j) {
          Poly p(U(rng), sp);
          p = p + Poly::var(0, sp) * U(rng) + Poly::var(1, sp) * U(rng);
          M.set(i, j, p);
        }
      auto pe = PseudoExpectation::point_mass(sp, xhat, 4);
      Eigen::MatrixXd B = matrix_localizing(pe, M, 1);

      auto basis = monomials_up_to(2, 1);
      Eigen::VectorXd z(basis.size());
      for (size_t a = 0; a < basis.size(); ++a) z(a) = basis[a].eval(xhat);
      Eigen::MatrixXd Mx(2, 2);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) Mx(i, j) = M.at(i, j).eval(xhat);
      Eigen::MatrixXd kron(2 * z.size(), 2 * z.size());
      for (int a = 0; a < z.size(); ++a)
        for (int b = 0; b < z.size(); ++b)
          kron.block(2 * a, 2 * b, 2, 2) = z(a) * z(b) * Mx;
      REQUIRE(B.rows() == kron.rows());
      CHECK(B.isApprox(kron, 1e-10));

      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esB(B);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esM(Mx);
      bool b_psd = esB.eigenvalues().minCoeff() >= -1e-9;
      bool m_psd = esM.eigenvalues().minCoeff() >= -1e-9;
      CHECK(b_psd == m_psd);
    }
  }
}

TEST_CASE("pseudoexpectation evaluation") {
  auto sp = make_space(2);
  auto pe = PseudoExpectation::point_mass(sp, {1.5, -0.5}, 6);
  CHECK(pe_eval(pe, Poly(1.0, sp)) == doctest::Approx(1.0));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  auto random_poly = [&]() {
    Poly p(U(rng), sp);
    auto mons = monomials_up_to(2, 3);
    for (auto& m : mons) p = p + Poly(m, U(rng), sp);
    return p;
  };
  for (int rep = 0; rep < 30; ++rep) {
    Poly p = random_poly(), q = random_poly();
    CHECK(pe_eval(pe, p) == doctest::Approx(p.eval({1.5, -0.5})));
    CHECK(pe_eval(pe, p + q) ==
          doctest::Approx(pe_eval(pe, p) + pe_eval(pe, q)));
  }
}

TEST_CASE("sum-of-squares certification of the squared norm") {
  auto sp = make_space(3);
  Poly p(0.0, sp);
  for (int i = 0; i < 3; ++i)
    p = p + Poly::var(i, sp) * Poly::var(i, sp);
  auto cert = sos_certify(p, 2);
  REQUIRE(cert.has_value());
  CHECK(cert->residual <= 1e-7);
  // coefficient matching pins the Gram matrix to the identity here
  REQUIRE(cert->gram.rows() == 3);
  CHECK(cert->gram.isApprox(Eigen::MatrixXd::Identity(3, 3), 1e-6));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> U(-3.0, 3.0);
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<double> x = {U(rng), U(rng), U(rng)};
    double znorm2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    CHECK(p.eval(x) >= -1e-8 * (1.0 + znorm2));
  }
}

TEST_CASE("indefinite and nonnegative-but-not-sos polynomials are rejected") {
  auto sp = make_space(2);
  Poly u1 = Poly::var(0, sp), u2 = Poly::var(1, sp);
  CHECK_FALSE(sos_certify(u1 * u2, 2).has_value());

  Poly motzkin = u1 * u1 * u1 * u1 * u2 * u2 + u1 * u1 * u2 * u2 * u2 * u2 -
                 3.0 * u1 * u1 * u2 * u2 + Poly(1.0, sp);
  CHECK_FALSE(sos_certify(motzkin, 6).has_value());
}

TEST_CASE("random Gram-generated polynomials certify as sums of squares") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  auto sp = make_space(2);
  auto basis = monomials_up_to(2, 2);
  int k = static_cast<int>(basis.size());
  for (int rep = 0; rep < 5; ++rep) {
    Eigen::MatrixXd R(k, k);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) R(i, j) = U(rng);
    Eigen::MatrixXd Q = R * R.transpose();
    Poly p(0.0, sp);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j)
        p = p + Poly(basis[i] * basis[j], Q(i, j), sp);
    auto cert = sos_certify(p, 4);
    REQUIRE(cert.has_value());
    CHECK(cert->residual <= 1e-6);
  }
}

TEST_CASE("explicit moment boundedness certificates") {
  SUBCASE("standard Gaussian in two dimensions") {
    MomentOracle gauss = [](const std::vector<int>& theta) {
      double out = 1.0;
      for (int e : theta) out *= dbl_factorial(e);
      return out;
    };
    auto rep = certify_explicit_boundedness(gauss, 2, 4, 1.0);
    REQUIRE(rep.per_s.size() == 2);
    CHECK(rep.per_s[0].s == 2);
    CHECK(rep.per_s[0].is_sos);
    CHECK(rep.per_s[1].s == 4);
    CHECK(rep.per_s[1].is_sos);
    CHECK(rep.all_sos);
  }
  SUBCASE("product of Rademacher coordinates") {
    // enumerate {-1,+1}^2: moments are 1 when every exponent is even
    MomentOracle rad = [](const std::vector<int>& theta) {
      double acc = 0.0;
      for (int s0 : {-1, 1})
        for (int s1 : {-1, 1})
          acc += std::pow(s0, theta[0]) * std::pow(s1, theta[1]);
      return acc / 4.0;
    };
    auto rep = certify_explicit_boundedness(rad, 2, 4, 1.0);
    CHECK(rep.all_sos);
  }
}

TEST_CASE("convex combinations of pseudoexpectations stay valid") {
  auto sp = make_space(2);
  auto p1 = PseudoExpectation::point_mass(sp, {1.0, 2.0}, 4);
  auto p2 = PseudoExpectation::point_mass(sp, {-0.5, 0.3}, 4);
  PseudoExpectation mix;
  mix.space = sp;
  mix.degree = 4;
  for (auto& m : monomials_up_to(2, 4))
    mix.moments[m] = 0.3 * *p1.moment(m) + 0.7 * *p2.moment(m);
  CHECK(*mix.moment(Monomial{}) == doctest::Approx(1.0));
  CHECK(moment_matrix(mix, 2).min_eigenvalue() >= -1e-10);
}

TEST_CASE("pseudoexpectation Cauchy-Schwarz on a mixed pseudoexpectation") {
  auto sp = make_space(2);
  auto p1 = PseudoExpectation::point_mass(sp, {0.8, -0.6}, 8);
  auto p2 = PseudoExpectation::point_mass(sp, {-1.1, 0.4}, 8);
  PseudoExpectation mix;
  mix.space = sp;
  mix.degree = 8;
  for (auto& m : monomials_up_to(2, 8))
    mix.moments[m] = 0.5 * (*p1.moment(m) + *p2.moment(m));

  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    Poly p(U(rng), sp), q(U(rng), sp);
    for (auto& m : monomials_up_to(2, 2)) {
      p = p + Poly(m, U(rng), sp);
      q = q + Poly(m, U(rng), sp);
    }
    double pq = pe_eval(mix, p * q);
    double pp = pe_eval(mix, p * p);
    double qq = pe_eval(mix, q * q);
    CHECK(pq * pq <= pp * qq + 1e-9);
  }
}

TEST_CASE("moment maps survive a JSON round trip") {
  auto sp = make_space(3);
  auto pe = PseudoExpectation::point_mass(sp, {0.25, -3.0, 1.0 / 3.0}, 4);
  PseudoExpectation dense;
  dense.space = sp;
  dense.degree = 4;
  for (auto& m : monomials_up_to(3, 4)) dense.moments[m] = *pe.moment(m);

  std::string text = pe_to_json(dense);
  PseudoExpectation back = pe_from_json(text, sp, 4);
  REQUIRE(back.moments.size() == dense.moments.size());
  for (auto& [m, v] : dense.moments) {
    auto got = back.moment(m);
    REQUIRE(got.has_value());
    CHECK(*got == doctest::Approx(v).epsilon(1e-14));
  }
}
