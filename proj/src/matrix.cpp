#include "matlog/matrix.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>

namespace matlog {

SingularMatrixError::SingularMatrixError(std::size_t pivot, double magnitude)
    : std::runtime_error([&] {
        std::ostringstream os;
        os << "singular matrix: pivot " << pivot << " has magnitude " << magnitude;
        return os.str();
      }()),
      pivot_(pivot),
      magnitude_(magnitude) {}

namespace {

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a << " vs " << b << ")";
    throw DimensionError(os.str());
  }
}

}  // namespace

// ---------------------------------------------------------------- RealMatrix

RealMatrix::RealMatrix(std::size_t n, double fill)
    : data_(DenseStorage::Constant(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n), fill)) {}

RealMatrix::RealMatrix(DenseStorage data) : data_(std::move(data)) {
  if (data_.rows() != data_.cols()) {
    throw DimensionError("RealMatrix must be square");
  }
}

RealMatrix RealMatrix::identity(std::size_t n) {
  return RealMatrix(DenseStorage::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)));
}

RealMatrix RealMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  RealMatrix m(rows.size());
  std::size_t i = 0;
  for (const auto& r : rows) {
    require_same_size(r.size(), rows.size(), "RealMatrix::from_rows");
    std::size_t j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

RealMatrix RealMatrix::transposed() const { return RealMatrix(DenseStorage(data_.transpose())); }

RealMatrix& RealMatrix::operator+=(const RealMatrix& other) {
  require_same_size(size(), other.size(), "RealMatrix::operator+=");
  data_ += other.data_;
  return *this;
}

RealMatrix& RealMatrix::operator*=(double s) {
  data_ *= s;
  return *this;
}

bool operator==(const RealMatrix& a, const RealMatrix& b) {
  return a.size() == b.size() && a.data_ == b.data_;
}

// ----------------------------------------------------------------- BitMatrix

BitMatrix::BitMatrix(std::size_t n) : n_(n), words_((n + 63) / 64), bits_(n * ((n + 63) / 64), 0) {}

BitMatrix BitMatrix::identity(std::size_t n) {
  BitMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m.set(i, i);
  return m;
}

BitMatrix BitMatrix::from_rows(std::initializer_list<std::initializer_list<int>> rows) {
  BitMatrix m(rows.size());
  std::size_t i = 0;
  for (const auto& r : rows) {
    require_same_size(r.size(), rows.size(), "BitMatrix::from_rows");
    std::size_t j = 0;
    for (int v : r) {
      if (v != 0 && v != 1) throw std::invalid_argument("BitMatrix entries must be 0 or 1");
      m.set(i, j++, v == 1);
    }
    ++i;
  }
  return m;
}

std::size_t BitMatrix::count() const {
  std::size_t c = 0;
  for (auto w : bits_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

BitMatrix BitMatrix::transposed() const {
  BitMatrix t(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    const auto r = row(i);
    for (std::size_t w = 0; w < words_; ++w) {
      std::uint64_t word = r[w];
      while (word) {
        const auto bit = static_cast<std::size_t>(std::countr_zero(word));
        t.set(w * 64 + bit, i);
        word &= word - 1;
      }
    }
  }
  return t;
}

RealMatrix BitMatrix::to_real() const {
  RealMatrix m(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    const auto r = row(i);
    for (std::size_t w = 0; w < words_; ++w) {
      std::uint64_t word = r[w];
      while (word) {
        const auto bit = static_cast<std::size_t>(std::countr_zero(word));
        m(i, w * 64 + bit) = 1.0;
        word &= word - 1;
      }
    }
  }
  return m;
}

BitMatrix& BitMatrix::operator|=(const BitMatrix& other) {
  require_same_size(n_, other.n_, "BitMatrix::operator|=");
  for (std::size_t k = 0; k < bits_.size(); ++k) bits_[k] |= other.bits_[k];
  return *this;
}

// ---------------------------------------------------------------- operations

RealMatrix matmul(const RealMatrix& a, const RealMatrix& b) {
  require_same_size(a.size(), b.size(), "matmul");
  DenseStorage out(a.storage().rows(), b.storage().cols());
  out.noalias() = a.storage() * b.storage();
  return RealMatrix(std::move(out));
}

RealMatrix matmul(const BitMatrix& a, const BitMatrix& b) {
  require_same_size(a.size(), b.size(), "matmul");
  return matmul(a.to_real(), b.to_real());
}

BitMatrix bool_product(const BitMatrix& a, const BitMatrix& b) {
  require_same_size(a.size(), b.size(), "bool_product");
  const std::size_t n = a.size();
  BitMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto dst = out.row(i);
    const auto src = a.row(i);
    for (std::size_t w = 0; w < a.words_per_row(); ++w) {
      std::uint64_t word = src[w];
      while (word) {
        const auto k = w * 64 + static_cast<std::size_t>(std::countr_zero(word));
        const auto bk = b.row(k);
        for (std::size_t x = 0; x < dst.size(); ++x) dst[x] |= bk[x];
        word &= word - 1;
      }
    }
  }
  return out;
}

RealMatrix transpose(const RealMatrix& a) { return a.transposed(); }

RealMatrix min1(const RealMatrix& a) {
  RealMatrix out = a;
  min1_inplace(out);
  return out;
}

void min1_inplace(RealMatrix& a) {
  a.storage() = a.storage().cwiseMin(1.0);
}

double inf_norm(const RealMatrix& a) {
  if (a.size() == 0) return 0.0;
  return a.storage().cwiseAbs().rowwise().sum().maxCoeff();
}

double one_norm(const RealMatrix& a) {
  if (a.size() == 0) return 0.0;
  return a.storage().cwiseAbs().colwise().sum().maxCoeff();
}

double max_entry(const RealMatrix& a) {
  if (a.size() == 0) return 0.0;
  return a.storage().maxCoeff();
}

double max_abs_diff(const RealMatrix& a, const RealMatrix& b) {
  require_same_size(a.size(), b.size(), "max_abs_diff");
  if (a.size() == 0) return 0.0;
  return (a.storage() - b.storage()).cwiseAbs().maxCoeff();
}

BitMatrix threshold_positive(const RealMatrix& a, double tau) {
  if (tau < 0) throw std::invalid_argument("threshold tau must be >= 0");
  const std::size_t n = a.size();
  BitMatrix out(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (a(i, j) > tau) out.set(i, j);
    }
  }
  return out;
}

RealMatrix kron(const RealMatrix& a, const RealMatrix& b) {
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  RealMatrix out(na * nb);
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < na; ++j) {
      const double s = a(i, j);
      if (s == 0.0) continue;
      out.storage().block(i * nb, j * nb, nb, nb) = s * b.storage();
    }
  }
  return out;
}

RealVector vec(const RealMatrix& a) {
  const std::size_t n = a.size();
  RealVector v(static_cast<Eigen::Index>(n * n));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) v(j * n + i) = a(i, j);
  }
  return v;
}

RealMatrix unvec(const RealVector& v, std::size_t n) {
  require_same_size(static_cast<std::size_t>(v.size()), n * n, "unvec");
  RealMatrix a(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) a(i, j) = v(j * n + i);
  }
  return a;
}

// ------------------------------------------------------------------------ LU

LuFactorization::LuFactorization(const RealMatrix& a, double pivot_tolerance) : n_(a.size()) {
  if (n_ == 0) return;
  lu_.compute(a.storage());
  const double cutoff = pivot_tolerance * inf_norm(a);
  const auto& packed = lu_.matrixLU();
  for (std::size_t k = 0; k < n_; ++k) {
    const double pivot = std::abs(packed(k, k));
    if (!(pivot > cutoff)) throw SingularMatrixError(k, pivot);
  }
}

RealMatrix LuFactorization::solve(const RealMatrix& rhs) const {
  require_same_size(rhs.size(), n_, "LuFactorization::solve");
  if (n_ == 0) return rhs;
  return RealMatrix(DenseStorage(lu_.solve(rhs.storage())));
}

RealVector LuFactorization::solve(const RealVector& rhs) const {
  require_same_size(static_cast<std::size_t>(rhs.size()), n_, "LuFactorization::solve");
  if (n_ == 0) return rhs;
  return lu_.solve(rhs);
}

RealMatrix LuFactorization::inverse() const { return solve(RealMatrix::identity(n_)); }

MMatrixLu::MMatrixLu(const RealMatrix& a, double pivot_tolerance) : lu_(a.storage()) {
  using Eigen::Index;
  const Index n = lu_.rows();
  const double cutoff = pivot_tolerance * inf_norm(a);
  constexpr Index kBlock = 96;
  for (Index k = 0; k < n; k += kBlock) {
    const Index b = std::min(kBlock, n - k);
    for (Index j = k; j < k + b; ++j) {
      const double pivot = lu_(j, j);
      if (!(pivot > cutoff)) throw SingularMatrixError(static_cast<std::size_t>(j), std::abs(pivot));
      const Index below = n - j - 1;
      if (below == 0) continue;
      lu_.block(j + 1, j, below, 1) /= pivot;
      const Index width = k + b - j - 1;
      if (width > 0) {
        lu_.block(j + 1, j + 1, below, width).noalias() -=
            lu_.block(j + 1, j, below, 1) * lu_.block(j, j + 1, 1, width);
      }
    }
    const Index rest = n - k - b;
    if (rest == 0) continue;
    lu_.block(k, k, b, b).triangularView<Eigen::UnitLower>().solveInPlace(lu_.block(k, k + b, b, rest));
    lu_.block(k + b, k + b, rest, rest).noalias() -= lu_.block(k + b, k, rest, b) * lu_.block(k, k + b, b, rest);
  }
}

void MMatrixLu::solve_in_place(DenseStorage& rhs) const {
  if (rhs.rows() != lu_.rows()) throw DimensionError("MMatrixLu::solve: row count mismatch");
  if (lu_.rows() == 0) return;
  lu_.triangularView<Eigen::UnitLower>().solveInPlace(rhs);
  lu_.triangularView<Eigen::Upper>().solveInPlace(rhs);
}

RealMatrix MMatrixLu::solve(const RealMatrix& rhs) const {
  DenseStorage x = rhs.storage();
  solve_in_place(x);
  return RealMatrix(std::move(x));
}

RealMatrix invert(const RealMatrix& a) { return LuFactorization(a).inverse(); }

RealMatrix solve_linear(const RealMatrix& a, const RealMatrix& rhs) {
  return LuFactorization(a).solve(rhs);
}

RealVector solve_linear(const RealMatrix& a, const RealVector& rhs) {
  return LuFactorization(a).solve(rhs);
}

// ---------------------------------------------------------------------- dump

namespace {

constexpr std::array<char, 4> kDumpMagic{'M', 'L', 'G', 'M'};

template <typename T>
void put_le(std::ostream& out, T value) {
  std::array<unsigned char, sizeof(T)> bytes{};
  std::memcpy(bytes.data(), &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  out.write(reinterpret_cast<const char*>(bytes.data()), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), sizeof(T))) {
    throw std::runtime_error("matrix dump: truncated input");
  }
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
  T value;
  std::memcpy(&value, bytes.data(), sizeof(T));
  return value;
}

void put_header(std::ostream& out, DumpKind kind, std::size_t n) {
  out.write(kDumpMagic.data(), kDumpMagic.size());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(kind));
  put_le<std::uint64_t>(out, n);
}

}  // namespace

void write_matrix_dump(std::ostream& out, const BitMatrix& m) {
  put_header(out, DumpKind::bits, m.size());
  std::vector<char> row(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) row[j] = m.get(i, j) ? 1 : 0;
    out.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

void write_matrix_dump(std::ostream& out, const RealMatrix& m) {
  put_header(out, DumpKind::real, m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) put_le<double>(out, m(i, j));
  }
}

std::variant<BitMatrix, RealMatrix> read_matrix_dump(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kDumpMagic) {
    throw std::runtime_error("matrix dump: bad magic");
  }
  const auto kind = get_le<std::uint32_t>(in);
  const auto n = static_cast<std::size_t>(get_le<std::uint64_t>(in));
  if (kind == static_cast<std::uint32_t>(DumpKind::bits)) {
    BitMatrix m(n);
    std::vector<char> row(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!in.read(row.data(), static_cast<std::streamsize>(n))) {
        throw std::runtime_error("matrix dump: truncated input");
      }
      for (std::size_t j = 0; j < n; ++j) m.set(i, j, row[j] != 0);
    }
    return m;
  }
  if (kind == static_cast<std::uint32_t>(DumpKind::real)) {
    RealMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) m(i, j) = get_le<double>(in);
    }
    return m;
  }
  throw std::runtime_error("matrix dump: unknown element kind");
}

}  // namespace matlog
