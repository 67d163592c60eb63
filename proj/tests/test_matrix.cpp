#include <doctest.h>

#include <sstream>

#include "helpers.hpp"

using namespace matlog;
using namespace matlog::testing;

namespace {

BitMatrix reference_or_and(const BitMatrix& a, const BitMatrix& b) {
  BitMatrix c(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < a.size(); ++j)
      for (std::size_t k = 0; k < a.size(); ++k)
        if (a.get(i, k) && b.get(k, j)) c.set(i, j);
  return c;
}

RealMatrix diagonally_dominant(std::size_t n, std::uint64_t seed) {
  RealMatrix a = random_real(n, seed);
  for (std::size_t i = 0; i < n; ++i) a(i, i) += static_cast<double>(n);
  return a;
}

}  // namespace

TEST_CASE("matmul with identity and small chains") {
  const RealMatrix a = random_real(5, 1);
  CHECK(matmul(a, RealMatrix::identity(5)) == a);

  const BitMatrix chain = BitMatrix::from_rows({{0, 1, 0}, {0, 0, 1}, {0, 0, 0}});
  const RealMatrix sq = matmul(chain, chain);
  CHECK(sq == RealMatrix::from_rows({{0, 0, 1}, {0, 0, 0}, {0, 0, 0}}));

  const RealMatrix r1sq = matmul(cycle_r1(), cycle_r1());
  CHECK(r1sq == RealMatrix::from_rows({{0, 0, 1, 0}, {1, 0, 0, 0}, {0, 1, 0, 0}, {0, 1, 0, 0}}));

  CHECK_THROWS_AS(matmul(RealMatrix(2), RealMatrix(3)), DimensionError);
}

TEST_CASE("count product clipped by min1 equals the boolean product") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const BitMatrix a = random_bits(20, 0.15, seed);
    const BitMatrix b = random_bits(20, 0.15, seed + 100);
    const BitMatrix expect = reference_or_and(a, b);
    CHECK(bool_product(a, b) == expect);
    CHECK(threshold_positive(min1(matmul(a, b)), 0.0) == expect);
    CHECK(min1(matmul(a, b)) == expect.to_real());
  }
  // words_per_row > 1
  const BitMatrix a = random_bits(130, 0.05, 7);
  const BitMatrix b = random_bits(130, 0.05, 8);
  CHECK(bool_product(a, b) == reference_or_and(a, b));
}

TEST_CASE("min1") {
  const RealMatrix a = RealMatrix::from_rows({{0, 0.4}, {3, 1}});
  const RealMatrix m = min1(a);
  CHECK(m(0, 0) == 0.0);
  CHECK(m(0, 1) == 0.4);
  CHECK(m(1, 0) == 1.0);
  CHECK(m(1, 1) == 1.0);
  const RealMatrix r = random_real(6, 3, 0.0, 3.0);
  CHECK(min1(min1(r)) == min1(r));
  RealMatrix bigger = r;
  bigger += random_real(6, 4, 0.0, 1.0);
  const RealMatrix lo = min1(r), hi = min1(bigger);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) CHECK(lo(i, j) <= hi(i, j));
}

TEST_CASE("norms") {
  const RealMatrix r1 = cycle_r1().to_real();
  CHECK(inf_norm(r1) == 1.0);
  CHECK(one_norm(r1) == 2.0);
  CHECK(max_entry(r1) == 1.0);
  const RealMatrix z(4);
  CHECK(inf_norm(z) == 0.0);
  CHECK(one_norm(z) == 0.0);
  CHECK(max_entry(z) == 0.0);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const RealMatrix a = random_real(7, seed);
    CHECK(one_norm(a.transposed()) == inf_norm(a));
  }
}

TEST_CASE("transpose identities") {
  const RealMatrix a = random_real(6, 11), b = random_real(6, 12);
  CHECK(a.transposed().transposed() == a);
  CHECK(max_abs_diff(matmul(a, b).transposed(), matmul(b.transposed(), a.transposed())) < 1e-12);
  const BitMatrix bits = random_bits(70, 0.1, 5);
  CHECK(bits.transposed().transposed() == bits);
  CHECK(bits.transposed().get(3, 4) == bits.get(4, 3));
}

TEST_CASE("threshold_positive") {
  CHECK(threshold_positive(RealMatrix(3), 1e-12).count() == 0);
  RealMatrix tiny(3);
  tiny(1, 2) = 5e-13;
  CHECK(threshold_positive(tiny, 1e-12).count() == 0);
  CHECK(threshold_positive(tiny, 0.0).count() == 1);
  CHECK_THROWS(threshold_positive(tiny, -1.0));
}

TEST_CASE("inversion and linear solves") {
  CHECK(invert(RealMatrix::identity(4)) == RealMatrix::identity(4));
  const RealMatrix half = invert(2.0 * RealMatrix::identity(3));
  CHECK(max_abs_diff(half, 0.5 * RealMatrix::identity(3)) == 0.0);

  const RealVector b = RealVector::LinSpaced(4, 1.0, 4.0);
  CHECK((solve_linear(RealMatrix::identity(4), b) - b).norm() == 0.0);
  CHECK((solve_linear(2.0 * RealMatrix::identity(4), b) - b / 2).norm() == 0.0);

  for (std::size_t n : {5, 20, 60}) {
    const RealMatrix a = diagonally_dominant(n, n);
    const RealMatrix prod = matmul(a, invert(a));
    CHECK(max_abs_diff(prod, RealMatrix::identity(n)) < 1e-9 * static_cast<double>(n));
    const RealMatrix rhs = random_real(n, 99);
    CHECK(max_abs_diff(matmul(a, solve_linear(a, rhs)), rhs) < 1e-9 * static_cast<double>(n));
  }
}

TEST_CASE("the cycle example through (I - R1/2)^-1 R1/2") {
  const RealMatrix r1 = cycle_r1().to_real();
  RealMatrix a = RealMatrix::identity(4);
  a += -0.5 * r1;
  const RealMatrix x = solve_linear(a, 0.5 * r1);
  const RealMatrix expect = RealMatrix::from_rows({{1.0 / 7, 4.0 / 7, 2.0 / 7, 0},
                                                   {2.0 / 7, 1.0 / 7, 4.0 / 7, 0},
                                                   {4.0 / 7, 2.0 / 7, 1.0 / 7, 0},
                                                   {4.0 / 7, 2.0 / 7, 1.0 / 7, 0}});
  CHECK(max_abs_diff(x, expect) < 1e-12);
  CHECK(x(0, 0) == doctest::Approx(0.1428).epsilon(1e-3));
  CHECK(max_abs_diff(matmul(invert(a), 0.5 * r1), expect) < 1e-12);
}

TEST_CASE("singular matrices report the failing pivot") {
  const RealMatrix s = RealMatrix::from_rows({{1, 2}, {2, 4}});
  try {
    invert(s);
    FAIL("expected SingularMatrixError");
  } catch (const SingularMatrixError& e) {
    CHECK(e.pivot() == 1);
  }
  CHECK_THROWS_AS(MMatrixLu(RealMatrix::from_rows({{1, -1}, {-1, 1}})), SingularMatrixError);
}

TEST_CASE("M-matrix LU: exact zero pattern and agreement with pivoted LU") {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const std::size_t n = 150 + 40 * seed;  // spans several elimination blocks
    const BitMatrix r = random_bits(n, 0.02, seed);
    const double eps = 1.0 / (1.0 + inf_norm(r.to_real()));
    RealMatrix a = RealMatrix::identity(n);
    a += -eps * r.to_real();
    const RealMatrix rhs = eps * r.to_real();
    const RealMatrix x = MMatrixLu(a).solve(rhs);
    CHECK(max_abs_diff(x, solve_linear(a, rhs)) < 1e-12);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) REQUIRE(x(i, j) >= 0.0);
  }
}

TEST_CASE("kron, vec and unvec") {
  const RealMatrix a = random_real(3, 21), x = random_real(3, 22), b = random_real(3, 23);
  const RealVector lhs = vec(matmul(matmul(a, x), b));
  const RealVector rhs = kron(b.transposed(), a).storage() * vec(x);
  CHECK((lhs - rhs).lpNorm<Eigen::Infinity>() < 1e-12);

  const RealMatrix k = kron(RealMatrix::identity(2), a);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) {
      const bool same_block = i / 3 == j / 3;
      CHECK(k(i, j) == (same_block ? a(i % 3, j % 3) : 0.0));
    }

  const RealMatrix m = RealMatrix::from_rows({{1, 3}, {2, 4}});
  const RealVector v = vec(m);
  CHECK(v(0) == 1.0);
  CHECK(v(1) == 2.0);
  CHECK(v(2) == 3.0);
  CHECK(v(3) == 4.0);
  CHECK(unvec(vec(x), 3) == x);
  CHECK_THROWS_AS(unvec(v, 3), DimensionError);
}

TEST_CASE("matrix dumps round trip") {
  const BitMatrix bits = random_bits(9, 0.3, 2);
  const RealMatrix real = random_real(5, 3);
  std::stringstream bs, rs;
  write_matrix_dump(bs, bits);
  write_matrix_dump(rs, real);
  CHECK(std::get<BitMatrix>(read_matrix_dump(bs)) == bits);
  CHECK(std::get<RealMatrix>(read_matrix_dump(rs)) == real);
  std::stringstream bad("XXXX");
  CHECK_THROWS(read_matrix_dump(bad));
}
