#ifndef FRACTOOL_SPECTRAL_HPP
#define FRACTOOL_SPECTRAL_HPP

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "fractool/error.hpp"
#include "fractool/model.hpp"

namespace fractool {

using BigInt = boost::multiprecision::cpp_int;

/// Square matrix stored row-major.
template <typename T>
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n) : n_(n), data_(n * n, T(0)) {}
  SquareMatrix(std::size_t n, std::vector<T> row_major) : n_(n), data_(std::move(row_major)) {
    if (data_.size() != n * n) throw Error(ErrorCode::structural, "matrix data has the wrong size");
  }

  static SquareMatrix identity(std::size_t n) {
    SquareMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t size() const noexcept { return n_; }
  T& operator()(std::size_t row, std::size_t col) { return data_[row * n_ + col]; }
  const T& operator()(std::size_t row, std::size_t col) const { return data_[row * n_ + col]; }

  std::vector<T> column(std::size_t col) const {
    std::vector<T> out(n_);
    for (std::size_t r = 0; r < n_; ++r) out[r] = (*this)(r, col);
    return out;
  }

  friend SquareMatrix operator*(const SquareMatrix& a, const SquareMatrix& b) {
    SquareMatrix out(a.n_);
    for (std::size_t i = 0; i < a.n_; ++i)
      for (std::size_t k = 0; k < a.n_; ++k) {
        if (a(i, k) == T(0)) continue;
        for (std::size_t j = 0; j < a.n_; ++j) out(i, j) += a(i, k) * b(k, j);
      }
    return out;
  }

  friend bool operator==(const SquareMatrix&, const SquareMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<T> data_;
};

/// entry(a, b) = number of steps of type a in the generator of type b.
using SubstitutionMatrix = SquareMatrix<std::uint64_t>;
using BigMatrix = SquareMatrix<BigInt>;

inline SubstitutionMatrix substitution_matrix(const FractalSystem& system) {
  const std::size_t n = system.size();
  SubstitutionMatrix m(n);
  for (std::size_t b = 0; b < system.generators.size(); ++b)
    for (const auto& step : system.generators[b].steps) m(step.type_index(), system.generators[b].target_type) += 1;
  return m;
}

inline BigMatrix to_big(const SubstitutionMatrix& m) {
  BigMatrix out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) out(i, j) = m(i, j);
  return out;
}

/// Exact k-th power by repeated squaring.
inline BigMatrix matrix_power(const SubstitutionMatrix& matrix, std::uint64_t k) {
  BigMatrix result = BigMatrix::identity(matrix.size());
  BigMatrix base = to_big(matrix);
  while (k > 0) {
    if (k & 1u) result = result * base;
    k >>= 1u;
    if (k > 0) base = base * base;
  }
  return result;
}

/// Smallest k with M^k strictly positive, searched up to the Wielandt bound
/// n^2 - 2n + 2 over the boolean semiring. Empty when M is not primitive.
inline std::optional<std::uint64_t> primitivity(const SubstitutionMatrix& matrix) {
  const std::size_t n = matrix.size();
  if (n == 0) return std::nullopt;
  using Bool = std::vector<char>;
  Bool pattern(n * n), power(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) pattern[i * n + j] = power[i * n + j] = matrix(i, j) > 0;

  auto all_positive = [&](const Bool& p) {
    for (char c : p)
      if (!c) return false;
    return true;
  };
  const std::uint64_t bound = n * n - 2 * n + 2;
  for (std::uint64_t k = 1; k <= bound; ++k) {
    if (all_positive(power)) return k;
    Bool next(n * n, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < n; ++l) {
        if (!power[i * n + l]) continue;
        for (std::size_t j = 0; j < n; ++j) next[i * n + j] |= pattern[l * n + j];
      }
    power = std::move(next);
  }
  return std::nullopt;
}

/// First (row, column) that stays zero at the Wielandt bound, used to explain
/// a non-primitive matrix.
inline std::pair<std::size_t, std::size_t> zero_witness(const SubstitutionMatrix& matrix) {
  const std::size_t n = matrix.size();
  const std::uint64_t bound = n * n - 2 * n + 2;
  BigMatrix p = matrix_power(matrix, bound);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (p(i, j) == 0) return {i, j};
  return {0, 0};
}

inline constexpr double kDefaultEigenTolerance = 1e-14;
inline constexpr std::uint64_t kDefaultEigenIterations = 1'000'000;

struct PerronEigen {
  double lambda = 0.0;
  std::vector<double> freq;
  std::vector<double> left;
  double eigen_residual = 0.0;
  double left_residual = 0.0;
  std::uint64_t iterations = 0;
};

struct SpectralData {
  SubstitutionMatrix matrix;
  std::optional<std::uint64_t> primitive_exponent;
  double lambda_pf = 0.0;
  std::vector<double> freq;
  std::vector<double> left;
  double eigen_residual = 0.0;
};

namespace detail {

struct PowerResult {
  double lambda;
  std::vector<double> vector;
  double residual;
  std::uint64_t iterations;
};

inline std::vector<double> apply(const SubstitutionMatrix& m, const std::vector<double>& v, bool transpose) {
  const std::size_t n = m.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out[i] += static_cast<double>(transpose ? m(j, i) : m(i, j)) * v[j];
  return out;
}

inline double l1(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

inline PowerResult power_iteration(const SubstitutionMatrix& m, bool transpose, double tolerance,
                                   std::uint64_t max_iterations) {
  const std::size_t n = m.size();
  std::vector<double> v(n, 1.0 / static_cast<double>(n));
  double last_change = 0.0;
  for (std::uint64_t it = 1; it <= max_iterations; ++it) {
    std::vector<double> w = apply(m, v, transpose);
    const double norm = l1(w);
    if (!(norm > 0.0) || !std::isfinite(norm))
      throw Error(ErrorCode::numerical, "power iteration collapsed to the zero vector");
    for (double& x : w) x /= norm;
    last_change = 0.0;
    for (std::size_t i = 0; i < n; ++i) last_change += std::abs(w[i] - v[i]);
    v = std::move(w);
    if (last_change <= tolerance) {
      const std::vector<double> mv = apply(m, v, transpose);
      const double lambda = l1(mv);
      double residual = 0.0;
      for (std::size_t i = 0; i < n; ++i) residual += std::abs(mv[i] - lambda * v[i]);
      return {lambda, std::move(v), residual, it};
    }
  }
  throw Error(ErrorCode::numerical, "power iteration did not converge in " + std::to_string(max_iterations) +
                                        " iterations (last L1 change " + std::to_string(last_change) + ")");
}

}  // namespace detail

/// Perron-Frobenius eigenvalue and unit-L1 right/left eigenvectors of a
/// primitive matrix by power iteration from the uniform start vector.
inline PerronEigen perron_eigen(const SubstitutionMatrix& matrix, double tolerance = kDefaultEigenTolerance,
                                std::uint64_t max_iterations = kDefaultEigenIterations) {
  if (matrix.size() == 0) throw Error(ErrorCode::structural, "empty matrix");
  if (!(tolerance > 0.0)) throw Error(ErrorCode::numerical, "tolerance must be positive");
  auto right = detail::power_iteration(matrix, false, tolerance, max_iterations);
  auto left = detail::power_iteration(matrix, true, tolerance, max_iterations);
  return {right.lambda, std::move(right.vector), std::move(left.vector), right.residual, left.residual,
          right.iterations};
}

/// Matrix, primitivity, and PF data for a system. Throws non_primitive.
inline SpectralData spectral_analysis(const FractalSystem& system, double tolerance = kDefaultEigenTolerance,
                                      std::uint64_t max_iterations = kDefaultEigenIterations) {
  SpectralData out;
  out.matrix = substitution_matrix(system);
  out.primitive_exponent = primitivity(out.matrix);
  if (!out.primitive_exponent) {
    auto [r, c] = zero_witness(out.matrix);
    const auto& t = system.types;
    throw Error(ErrorCode::non_primitive,
                "substitution matrix is not primitive: entry (" + t[r].name + ", " + t[c].name +
                    ") stays zero in every power up to the Wielandt bound");
  }
  PerronEigen pe = perron_eigen(out.matrix, tolerance, max_iterations);
  out.lambda_pf = pe.lambda;
  out.freq = std::move(pe.freq);
  out.left = std::move(pe.left);
  out.eigen_residual = pe.eigen_residual;
  return out;
}

}  // namespace fractool

#endif  // FRACTOOL_SPECTRAL_HPP
