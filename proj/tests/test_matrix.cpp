#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "relsheaf/matrix.hpp"

using namespace relsheaf;

namespace {

// Independent row-reduction oracle for ranks: counts nonzero rows after a
// plain forward elimination, no reuse of the library's rref.
int rank_oracle(Matrix m) {
  int r = 0;
  for (int c = 0; c < m.cols() && r < m.rows(); ++c) {
    int p = -1;
    for (int i = r; i < m.rows(); ++i)
      if (m(i, c) != 0) { p = i; break; }
    if (p < 0) continue;
    for (int j = 0; j < m.cols(); ++j) std::swap(m(p, j), m(r, j));
    for (int i = r + 1; i < m.rows(); ++i) {
      if (m(i, c) == 0) continue;
      Rational f = m(i, c) / m(r, c);
      for (int j = c; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
    }
    ++r;
  }
  return r;
}

Matrix random_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::uniform_int_distribution<int> num(-3, 3);
  std::uniform_int_distribution<int> den(1, 2);
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = Rational(num(rng), den(rng));
  return m;
}

}  // namespace

TEST_CASE("rational literals", "[matrix]") {
  CHECK(rational_from_string("3/6") == Rational(1, 2));
  CHECK(rational_from_string("-4") == Rational(-4));
  CHECK(to_string(Rational(-1, 3)) == "-1/3");
  CHECK(to_string(Rational(5)) == "5");
  CHECK_THROWS_AS(rational_from_string("1.5"), Error);
  CHECK_THROWS_AS(rational_from_string("1/0"), Error);
}

TEST_CASE("kernel and image on pinned examples", "[matrix]") {
  Matrix z = Matrix::zero(2, 2);
  CHECK(kernel(z).dim() == 2);
  CHECK(image(z).dim() == 0);

  Matrix id1 = Matrix::identity(1);
  CHECK(kernel(id1).dim() == 0);
  CHECK(image(Matrix::identity(4)).dim() == 4);

  Matrix m{{1, 2}, {2, 4}};
  REQUIRE(rank_oracle(m) == 1);
  CHECK(kernel(m).dim() == 2 - rank_oracle(m));
  CHECK(image(m).dim() == rank_oracle(m));
}

TEST_CASE("rank-nullity and canonical bases", "[matrix]") {
  std::mt19937_64 rng(12345);
  for (int it = 0; it < 40; ++it) {
    int rows = 1 + int(rng() % 5), cols = 1 + int(rng() % 5);
    Matrix m = random_matrix(rng, rows, cols);
    Subspace ker = kernel(m), im = image(m);
    CHECK(ker.dim() + im.dim() == cols);
    CHECK(im.dim() == rank_oracle(m));
    // Canonical form: recanonicalizing is the identity, and kernel vectors die.
    CHECK(span(ker.basis) == ker);
    CHECK((m * ker.basis).is_zero());
    // Scaling the generators leaves the canonical basis unchanged.
    CHECK(span(m * Rational(7, 3)) == im);
  }
}

TEST_CASE("quotient dimensions and projector", "[matrix]") {
  SECTION("full over zero") {
    auto q = quotient(Subspace::full(2), Subspace::zero(2));
    CHECK(q.dim == 2);
  }
  SECTION("space over itself") {
    auto q = quotient(Subspace::full(1), Subspace::full(1));
    CHECK(q.dim == 0);
  }
  SECTION("line inside the plane") {
    Matrix diag{{1, 0}, {1, 1}};
    Subspace num = span(Matrix::identity(2));
    Subspace den = span(Matrix{{1}, {1}});
    auto q = quotient(num, den);
    CHECK(q.dim == 2 - 1);
    CHECK((q.projector * den.basis).is_zero());
    CHECK(q.projector * q.reps == Matrix::identity(1));
  }
  SECTION("containment violation") {
    Subspace num = span(Matrix{{1}, {0}});
    Subspace den = span(Matrix{{0}, {1}});
    CHECK_THROWS_AS(quotient(num, den), Error);
  }
  SECTION("projector vanishes exactly on den within num") {
    std::mt19937_64 rng(988);
    for (int it = 0; it < 20; ++it) {
      Matrix gen = random_matrix(rng, 4, 3);
      Subspace num = span(gen);
      Subspace den = span(gen.block(0, 0, 4, 1));
      auto q = quotient(num, den);
      CHECK(q.dim == num.dim() - den.dim());
      CHECK((q.projector * den.basis).is_zero());
      // Kernel of projector restricted to num is exactly den.
      Matrix on_num = q.projector * num.basis;
      Subspace ker_in_num = kernel(on_num);
      Matrix back = num.basis * ker_in_num.basis;
      CHECK(span(back) == den);
    }
  }
}

TEST_CASE("solve", "[matrix]") {
  Matrix id = Matrix::identity(3);
  std::vector<Rational> b{1, Rational(2, 3), -5};
  auto x = solve(id, b);
  REQUIRE(x.has_value());
  CHECK(*x == b);

  CHECK_FALSE(solve(Matrix::zero(2, 2), {1, 0}).has_value());

  Matrix m{{1, 2}, {2, 4}};
  auto y = solve(m, {1, 2});
  REQUIRE(y.has_value());
  CHECK((*y)[0] + 2 * (*y)[1] == 1);  // verified by substitution
  CHECK_FALSE(solve(m, {1, 3}).has_value());
}

TEST_CASE("left inverse and inverse", "[matrix]") {
  Matrix e{{1, 0}, {2, 1}, {0, 3}};
  Matrix l = left_inverse(e);
  CHECK(l * e == Matrix::identity(2));
  Matrix m{{2, 1}, {1, 1}};
  CHECK(m * inverse(m) == Matrix::identity(2));
  CHECK_THROWS_AS(inverse(Matrix{{1, 2}, {2, 4}}), Error);
}
