#include "sheetaudit/series.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "sheetaudit/errors.hpp"

namespace sheetaudit {

namespace {

double apply(double a, double b, ArithOp op) {
  switch (op) {
    case ArithOp::kAdd: return a + b;
    case ArithOp::kSub: return a - b;
    case ArithOp::kMul: return a * b;
    case ArithOp::kDiv: return a / b;
  }
  return 0.0;
}

}  // namespace

NumericSeries roll(const NumericSeries& s, std::int64_t shift) {
  const auto n = static_cast<std::int64_t>(s.size());
  if (n == 0) return s;
  std::int64_t k = ((shift % n) + n) % n;
  std::vector<double> out(s.size());
  for (std::int64_t i = 0; i < n; ++i) {
    out[static_cast<std::size_t>((i + k) % n)] = s[static_cast<std::size_t>(i)];
  }
  return NumericSeries(std::move(out));
}

NumericSeries tile(const NumericSeries& s, std::int64_t reps) {
  if (reps < 1) {
    throw Error(ErrorKind::kDomainError, "tile repetitions must be >= 1, got " + std::to_string(reps));
  }
  std::vector<double> out;
  out.reserve(s.size() * static_cast<std::size_t>(reps));
  for (std::int64_t r = 0; r < reps; ++r) out.insert(out.end(), s.begin(), s.end());
  return NumericSeries(std::move(out));
}

NumericSeries range_from_one(std::int64_t n) {
  if (n < 0) throw Error(ErrorKind::kDomainError, "range length must be >= 0");
  std::vector<double> out(static_cast<std::size_t>(n));
  std::iota(out.begin(), out.end(), 1.0);
  return NumericSeries(std::move(out));
}

NumericSeries zip_arith(const NumericSeries& a, const NumericSeries& b, ArithOp op) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::kLengthMismatch,
                "operands have lengths " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
  }
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (op == ArithOp::kDiv && b[i] == 0.0) {
      throw Error(ErrorKind::kDivisionByZero, "zero divisor at index " + std::to_string(i));
    }
    out[i] = apply(a[i], b[i], op);
  }
  return NumericSeries(std::move(out));
}

NumericSeries zip_arith(const NumericSeries& a, double b, ArithOp op) {
  if (op == ArithOp::kDiv && b == 0.0 && !a.empty()) {
    throw Error(ErrorKind::kDivisionByZero, "zero scalar divisor at index 0");
  }
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = apply(a[i], b, op);
  return NumericSeries(std::move(out));
}

NumericSeries pow_broadcast(double base, const NumericSeries& exponents) {
  if (!(base > 0.0)) {
    throw Error(ErrorKind::kDomainError, "power base must be > 0, got " + std::to_string(base));
  }
  std::vector<double> out(exponents.size());
  for (std::size_t i = 0; i < exponents.size(); ++i) out[i] = std::pow(base, exponents[i]);
  return NumericSeries(std::move(out));
}

double sum(const NumericSeries& s) { return std::accumulate(s.begin(), s.end(), 0.0); }

}  // namespace sheetaudit
