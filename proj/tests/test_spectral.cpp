#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "sbal/matrix_io.hpp"
#include "sbal/random.hpp"
#include "sbal/spectral.hpp"

using Catch::Approx;
using sbal::FriendlinessMatrix;
using sbal::Matrix;

namespace {

double residual_max(const Matrix& a, const sbal::Spectrum& s) {
  double worst = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const auto w = s.eigenvector(k);
    auto aw = a * w;
    for (std::size_t i = 0; i < w.size(); ++i) aw[i] -= s.values[k] * w[i];
    worst = std::max(worst, sbal::norm2(aw));
  }
  return worst;
}

double orthonormality_error(const sbal::Spectrum& s) {
  const Matrix wtw = sbal::transpose(s.vectors) * s.vectors;
  return sbal::max_abs_diff(wtw, Matrix::identity(s.size()));
}

}  // namespace

TEST_CASE("FriendlinessMatrix validates its invariants", "[spectral]") {
  CHECK_NOTHROW(FriendlinessMatrix(Matrix{{0, 1}, {1, 0}}));
  CHECK_THROWS_AS(FriendlinessMatrix(Matrix{{0, 1}, {2, 0}}), sbal::InputError);
  CHECK_THROWS_AS(FriendlinessMatrix(Matrix{{NAN, 0}, {0, 0}}), sbal::InputError);
  CHECK_THROWS_AS(FriendlinessMatrix(Matrix{{0, 1}, {1, 0}}, {"a", "a"}), sbal::InputError);
  CHECK_THROWS_AS(FriendlinessMatrix(Matrix{{0, 1}, {1, 0}}, {"a"}), sbal::InputError);

  const auto x = FriendlinessMatrix::symmetrized(Matrix{{0, 1.0}, {1.0 + 1e-10, 0}}, {"a", "b"}, 1e-9);
  CHECK(x(0, 1) == x(1, 0));
  CHECK_THROWS_AS(FriendlinessMatrix::symmetrized(Matrix{{0, 1.0}, {1.1, 0}}, {"a", "b"}, 1e-9), sbal::InputError);
}

TEST_CASE("SignPattern accepts only +1 and -1", "[spectral]") {
  CHECK_THROWS_AS(sbal::SignPattern({1, 0, -1}), sbal::InputError);
  const auto p = sbal::SignPattern::parse("+--+");
  CHECK(p.signs() == std::vector<int>{1, -1, -1, 1});
  CHECK(p.to_string() == "+--+");
  CHECK(p.negated().to_string() == "-++-");
  CHECK_THROWS_AS(sbal::SignPattern::parse("+0-"), sbal::InputError);
}

TEST_CASE("symmetric_eigen on small closed-form cases", "[spectral][eigen]") {
  SECTION("2x2 exchange matrix") {
    const auto s = sbal::symmetric_eigen(FriendlinessMatrix(Matrix{{0, 1}, {1, 0}}));
    CHECK(s.values[0] == Approx(1.0).margin(1e-14));
    CHECK(s.values[1] == Approx(-1.0).margin(1e-14));
    CHECK(s.vectors(0, 0) == Approx(1 / std::sqrt(2.0)).margin(1e-14));
    CHECK(s.vectors(1, 0) == Approx(1 / std::sqrt(2.0)).margin(1e-14));
  }
  SECTION("all-ones 3x3") {
    const auto s = sbal::symmetric_eigen(FriendlinessMatrix(Matrix(3, 3, 1.0)));
    CHECK(s.values[0] == Approx(3.0).margin(1e-13));
    CHECK(s.values[1] == Approx(0.0).margin(1e-13));
    CHECK(s.values[2] == Approx(0.0).margin(1e-13));
    for (std::size_t i = 0; i < 3; ++i) CHECK(s.vectors(i, 0) == Approx(1 / std::sqrt(3.0)).margin(1e-13));
  }
  SECTION("non-finite input is rejected") {
    Matrix m{{1, 0}, {0, INFINITY}};
    CHECK_THROWS_AS(sbal::symmetric_eigen(m), sbal::InputError);
  }
}

TEST_CASE("symmetric_eigen matches characteristic polynomial roots", "[spectral][eigen][oracle]") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = sbal::random_symmetric(4, rng);
    const auto s = sbal::symmetric_eigen(a);
    const auto roots = oracle::eigenvalues_via_polynomial(a.entries());
    REQUIRE(roots.size() == 4);
    for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(s.values[k] - roots[k]) <= 1e-8);
  }
}

TEST_CASE("Spectrum invariants hold up to n = 200", "[spectral][eigen][property]") {
  for (std::size_t n : {1u, 2u, 5u, 17u, 60u, 200u}) {
    const auto a = sbal::random_symmetric(n, 100 + n);
    const auto s = sbal::symmetric_eigen(a);
    INFO("n = " << n);
    CHECK(residual_max(a.entries(), s) <= 1e-10 * std::max(1.0, sbal::frobenius_norm(a.entries())));
    CHECK(orthonormality_error(s) <= 1e-10);
    CHECK(std::is_sorted(s.values.rbegin(), s.values.rend()));
    for (std::size_t k = 0; k < n; ++k) {
      const auto w = s.eigenvector(k);
      const auto it = std::max_element(w.begin(), w.end(), [](double p, double q) { return std::abs(p) < std::abs(q); });
      CHECK(*it >= 0.0);
    }
  }
}

TEST_CASE("symmetric_eigen is deterministic", "[spectral][eigen]") {
  const auto a = sbal::random_symmetric(30, 5);
  const auto s1 = sbal::symmetric_eigen(a);
  const auto s2 = sbal::symmetric_eigen(a);
  CHECK(s1.values == s2.values);
  CHECK(s1.vectors == s2.vectors);
}

TEST_CASE("dominant_eigenpair", "[spectral]") {
  SECTION("exchange matrix") {
    const auto [l, w] = sbal::dominant_eigenpair(FriendlinessMatrix(Matrix{{0, 1}, {1, 0}}));
    CHECK(l == Approx(1.0));
    CHECK(w[0] == Approx(1 / std::sqrt(2.0)));
    CHECK(w[1] == Approx(1 / std::sqrt(2.0)));
  }
  SECTION("rank one v v^T with v = (1,-1,1)") {
    const sbal::Vector v{1, -1, 1};
    const auto [l, w] = sbal::dominant_eigenpair(FriendlinessMatrix(Matrix::outer(v, v)));
    CHECK(l == Approx(3.0));
    CHECK(w[0] == Approx(1 / std::sqrt(3.0)));
    CHECK(w[1] == Approx(-1 / std::sqrt(3.0)));
    CHECK(w[2] == Approx(1 / std::sqrt(3.0)));
  }
  SECTION("agrees with the full spectrum on a random 6x6") {
    const auto a = sbal::random_symmetric(6, 77);
    const auto s = sbal::symmetric_eigen(a);
    const auto [l, w] = sbal::dominant_eigenpair(a);
    CHECK(std::abs(l - s.values[0]) <= 1e-10);
    for (std::size_t i = 0; i < 6; ++i) CHECK(std::abs(w[i] - s.vectors(i, 0)) <= 1e-10);
  }
  SECTION("positive scaling scales lambda1 and keeps w1") {
    const auto a = sbal::random_symmetric(12, 8);
    const auto [l, w] = sbal::dominant_eigenpair(a);
    for (double c : {0.01, 3.0, 250.0}) {
      const auto [lc, wc] = sbal::dominant_eigenpair(a.scaled(c));
      CHECK(std::abs(lc - c * l) <= 1e-10 * std::max(1.0, c * std::abs(l)));
      for (std::size_t i = 0; i < w.size(); ++i) CHECK(std::abs(wc[i] - w[i]) <= 1e-10);
    }
  }
}

TEST_CASE("genericity_check", "[spectral]") {
  SECTION("all-ones is generic") {
    const auto r = sbal::genericity_check(FriendlinessMatrix(Matrix(3, 3, 1.0)), 1e-9, 1e-8);
    CHECK(r.lambda1_positive);
    CHECK(r.spectral_gap == Approx(3.0));
    CHECK(r.gap_ok);
    CHECK(r.components_nonzero);
    CHECK(r.overall_generic);
  }
  SECTION("negative identity has no positive eigenvalue") {
    Matrix m = Matrix::identity(3) * -1.0;
    const auto r = sbal::genericity_check(FriendlinessMatrix(m), 1e-9, 1e-8);
    CHECK_FALSE(r.lambda1_positive);
    CHECK_FALSE(r.overall_generic);
  }
  SECTION("repeated top eigenvalue fails the gap test") {
    const Matrix m{{0, 1, 0}, {1, 0, 0}, {0, 0, 1}};
    const auto s = sbal::symmetric_eigen(m);
    REQUIRE(s.values[0] == Approx(1.0));
    REQUIRE(s.values[1] == Approx(1.0));
    const auto r = sbal::genericity_check(FriendlinessMatrix(m), 1e-9, 1e-8);
    CHECK_FALSE(r.gap_ok);
    CHECK_FALSE(r.overall_generic);
  }
  SECTION("tolerances must be positive") {
    CHECK_THROWS_AS(sbal::genericity_check(FriendlinessMatrix(Matrix(2, 2, 1.0)), 0.0, 1e-8), sbal::InputError);
  }
  SECTION("random uniform[-1,1] matrices with n = 50 are generic") {
    std::mt19937_64 rng(31337);
    int generic = 0;
    for (int trial = 0; trial < 100; ++trial) generic += sbal::genericity_check(sbal::random_symmetric(50, rng)).overall_generic;
    CHECK(generic == 100);
  }
}

TEST_CASE("sign_pattern_of", "[spectral]") {
  SECTION("plain signs") {
    const sbal::Vector v{0.3, -0.2, 0.9};
    const auto r = sbal::sign_pattern_of(v, 1e-8);
    CHECK(r.pattern.signs() == std::vector<int>{1, -1, 1});
    CHECK(r.ambiguous.empty());
  }
  SECTION("near-zero entries go to +1 and are flagged") {
    const sbal::Vector v{1, 0, -1};
    const auto r = sbal::sign_pattern_of(v, 1e-8);
    CHECK(r.pattern.signs() == std::vector<int>{1, 1, -1});
    CHECK(r.ambiguous == std::vector<std::size_t>{1});
  }
  SECTION("zero vector is an input error") {
    const sbal::Vector v{0, 0};
    CHECK_THROWS_AS(sbal::sign_pattern_of(v, 1e-8), sbal::InputError);
  }
  SECTION("dominant eigenvector of a generic 8x8 has no ambiguous entries") {
    const auto [l, w] = sbal::dominant_eigenpair(sbal::random_symmetric(8, 3));
    CHECK(sbal::sign_pattern_of(w).ambiguous.empty());
  }
  SECTION("negating the vector flips the pattern and keeps the bipartition") {
    const auto [l, w] = sbal::dominant_eigenpair(sbal::random_symmetric(20, 4));
    sbal::Vector neg(w);
    for (double& x : neg) x = -x;
    const auto a = sbal::sign_pattern_of(w).pattern;
    const auto b = sbal::sign_pattern_of(neg).pattern;
    CHECK(b == a.negated());
  }
}

TEST_CASE("frobenius_normalize", "[spectral]") {
  const auto y = sbal::frobenius_normalize(FriendlinessMatrix(Matrix{{0, 3}, {3, 0}}));
  CHECK(y(0, 1) == Approx(3 / std::sqrt(18.0)));
  CHECK(y(0, 0) == 0.0);
  CHECK_THROWS_AS(sbal::frobenius_normalize(FriendlinessMatrix(Matrix(2, 2))), sbal::InputError);

  const auto a = sbal::random_symmetric(5, 9);
  const auto b = sbal::frobenius_normalize(a);
  CHECK(std::abs(sbal::frobenius_norm(b.entries()) - 1.0) <= 1e-12);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j) CHECK(std::signbit(a(i, j)) == std::signbit(b(i, j)));
}

TEST_CASE("matrix CSV round trip and validation", "[spectral][io]") {
  const auto a = sbal::random_symmetric(4, 1);
  std::stringstream ss;
  sbal::write_matrix_csv(ss, a);
  const auto b = sbal::read_matrix_csv(ss);
  CHECK(b.labels() == a.labels());
  CHECK(b.entries() == a.entries());

  std::istringstream asym("a,b\n0,1\n1.5,0\n");
  CHECK_THROWS_AS(sbal::read_matrix_csv(asym), sbal::InputError);
  std::istringstream ragged("a,b\n0,1\n1\n");
  CHECK_THROWS_AS(sbal::read_matrix_csv(ragged), sbal::ParseError);
  std::istringstream nearly("a,b\n0,1\n1.0000000001,0\n");
  const auto c = sbal::read_matrix_csv(nearly);
  CHECK(c(0, 1) == c(1, 0));
  CHECK(c(0, 1) == Approx(1.00000000005));
}
