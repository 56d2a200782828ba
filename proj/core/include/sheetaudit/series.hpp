#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace sheetaudit {

// Immutable 1-D float64 array. Carries every model quantity (irradiance,
// operating months, generation, indices, EBITDA).
class NumericSeries {
 public:
  NumericSeries() = default;
  explicit NumericSeries(std::vector<double> values) : values_(std::move(values)) {}
  NumericSeries(std::initializer_list<double> values) : values_(values) {}

  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double at(std::size_t i) const { return values_.at(i); }
  std::span<const double> values() const { return values_; }
  const std::vector<double>& to_vector() const { return values_; }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  friend bool operator==(const NumericSeries&, const NumericSeries&) = default;

 private:
  std::vector<double> values_;
};

enum class ArithOp { kAdd, kSub, kMul, kDiv };

// output[i] = s[(i - shift) mod n]; negative shifts move elements toward the
// front. Empty input yields empty output.
NumericSeries roll(const NumericSeries& s, std::int64_t shift);

// Repeats s `reps` times. kDomainError for reps < 1.
NumericSeries tile(const NumericSeries& s, std::int64_t reps);

// [1, 2, ..., n].
NumericSeries range_from_one(std::int64_t n);

// Elementwise arithmetic. Series operands must have equal length
// (kLengthMismatch); division by an exact zero raises kDivisionByZero with
// the offending index.
NumericSeries zip_arith(const NumericSeries& a, const NumericSeries& b, ArithOp op);
NumericSeries zip_arith(const NumericSeries& a, double b, ArithOp op);

// output[i] = base^exponents[i]; base must be > 0.
NumericSeries pow_broadcast(double base, const NumericSeries& exponents);

double sum(const NumericSeries& s);

}  // namespace sheetaudit
