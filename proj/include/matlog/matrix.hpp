#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace matlog {

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when LU factorization meets a pivot below the singularity cutoff.
class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(std::size_t pivot, double magnitude);
  std::size_t pivot() const noexcept { return pivot_; }
  double magnitude() const noexcept { return magnitude_; }

 private:
  std::size_t pivot_;
  double magnitude_;
};

using DenseStorage = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RealVector = Eigen::VectorXd;

/// Square, dense, row-major matrix of doubles.
class RealMatrix {
 public:
  RealMatrix() = default;
  explicit RealMatrix(std::size_t n, double fill = 0.0);
  explicit RealMatrix(DenseStorage data);

  static RealMatrix identity(std::size_t n);
  static RealMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t size() const noexcept { return static_cast<std::size_t>(data_.rows()); }

  double operator()(std::size_t i, std::size_t j) const { return data_(i, j); }
  double& operator()(std::size_t i, std::size_t j) { return data_(i, j); }

  const DenseStorage& storage() const noexcept { return data_; }
  DenseStorage& storage() noexcept { return data_; }

  RealMatrix transposed() const;

  RealMatrix& operator+=(const RealMatrix& other);
  RealMatrix& operator*=(double s);
  friend RealMatrix operator+(RealMatrix a, const RealMatrix& b) { return a += b; }
  friend RealMatrix operator*(double s, RealMatrix a) { return a *= s; }

  friend bool operator==(const RealMatrix& a, const RealMatrix& b);

 private:
  DenseStorage data_;
};

/// Square 0/1 matrix, rows packed into 64-bit words.
class BitMatrix {
 public:
  BitMatrix() = default;
  explicit BitMatrix(std::size_t n);

  static BitMatrix identity(std::size_t n);
  static BitMatrix from_rows(std::initializer_list<std::initializer_list<int>> rows);

  std::size_t size() const noexcept { return n_; }
  std::size_t words_per_row() const noexcept { return words_; }

  bool get(std::size_t i, std::size_t j) const {
    return (bits_[i * words_ + (j >> 6)] >> (j & 63)) & 1u;
  }
  void set(std::size_t i, std::size_t j, bool value = true) {
    auto& w = bits_[i * words_ + (j >> 6)];
    const std::uint64_t mask = std::uint64_t{1} << (j & 63);
    w = value ? (w | mask) : (w & ~mask);
  }

  std::span<const std::uint64_t> row(std::size_t i) const {
    return {bits_.data() + i * words_, words_};
  }
  std::span<std::uint64_t> row(std::size_t i) { return {bits_.data() + i * words_, words_}; }

  /// Number of 1 entries.
  std::size_t count() const;
  BitMatrix transposed() const;
  RealMatrix to_real() const;
  BitMatrix& operator|=(const BitMatrix& other);

  friend bool operator==(const BitMatrix& a, const BitMatrix& b) = default;

 private:
  std::size_t n_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> bits_;
};

RealMatrix matmul(const RealMatrix& a, const RealMatrix& b);
/// Integer-count product of two 0/1 matrices (path counts), before min1.
RealMatrix matmul(const BitMatrix& a, const BitMatrix& b);
/// Boolean OR-AND product.
BitMatrix bool_product(const BitMatrix& a, const BitMatrix& b);

RealMatrix transpose(const RealMatrix& a);
RealMatrix min1(const RealMatrix& a);
void min1_inplace(RealMatrix& a);

double inf_norm(const RealMatrix& a);
double one_norm(const RealMatrix& a);
double max_entry(const RealMatrix& a);
/// Largest |a_ij - b_ij|.
double max_abs_diff(const RealMatrix& a, const RealMatrix& b);

/// Entry is 1 iff a_ij > tau.
BitMatrix threshold_positive(const RealMatrix& a, double tau);

RealMatrix kron(const RealMatrix& a, const RealMatrix& b);
/// Column-stacking vectorization.
RealVector vec(const RealMatrix& a);
RealMatrix unvec(const RealVector& v, std::size_t n);

/// LU factorization with partial pivoting.
class LuFactorization {
 public:
  /// Pivots with magnitude <= pivot_tolerance * ||a||_inf are rejected.
  explicit LuFactorization(const RealMatrix& a, double pivot_tolerance = 1e-12);

  std::size_t size() const noexcept { return n_; }
  RealMatrix solve(const RealMatrix& rhs) const;
  RealVector solve(const RealVector& rhs) const;
  RealMatrix inverse() const;

 private:
  std::size_t n_;
  Eigen::PartialPivLU<DenseStorage> lu_;
};

/// LU without pivoting for nonsingular M-matrices (positive diagonal, nonpositive off-diagonal,
/// diagonally dominant by rows). Every update then adds terms of one sign, so solving with a
/// nonnegative right-hand side never cancels: an entry of the solution is exactly 0 iff it is
/// structurally 0, and positive entries stay positive however small.
class MMatrixLu {
 public:
  /// Throws SingularMatrixError when a pivot is not above pivot_tolerance * ||a||_inf.
  explicit MMatrixLu(const RealMatrix& a, double pivot_tolerance = 1e-12);

  std::size_t size() const noexcept { return static_cast<std::size_t>(lu_.rows()); }
  /// rhs may have any number of columns.
  void solve_in_place(DenseStorage& rhs) const;
  RealMatrix solve(const RealMatrix& rhs) const;

 private:
  DenseStorage lu_;
};

RealMatrix invert(const RealMatrix& a);
RealMatrix solve_linear(const RealMatrix& a, const RealMatrix& rhs);
RealVector solve_linear(const RealMatrix& a, const RealVector& rhs);

// Binary matrix dump: "MLGM" magic, u32 element kind, u64 n, row-major payload.
// Bit matrices store one byte (0/1) per entry; real matrices store little-endian f64.
enum class DumpKind : std::uint32_t { bits = 1, real = 2 };

void write_matrix_dump(std::ostream& out, const BitMatrix& m);
void write_matrix_dump(std::ostream& out, const RealMatrix& m);
std::variant<BitMatrix, RealMatrix> read_matrix_dump(std::istream& in);

}  // namespace matlog
