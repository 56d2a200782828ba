#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "sheetaudit/a1.hpp"
#include "sheetaudit/series.hpp"

namespace sheetaudit {

struct ToleranceSpec {
  double rtol = 1e-5;
  double atol = 1e-8;

  // Throws kDomainError unless both are finite and >= 0.
  void validate() const;

  friend bool operator==(const ToleranceSpec&, const ToleranceSpec&) = default;
};

// Inclusive index window.
struct IndexRun {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start + 1; }
  friend bool operator==(const IndexRun&, const IndexRun&) = default;
};

struct ComparisonResult {
  std::vector<bool> mask;  // true = close
  std::vector<std::size_t> mismatch_indices;
  std::vector<IndexRun> match_runs;
  std::vector<IndexRun> mismatch_runs;

  bool all_close() const { return mismatch_indices.empty(); }
  double mismatch_fraction() const;
};

// The closeness predicate for one pair, with `reference` on the oracle side:
// |actual - reference| <= atol + rtol * |reference|. NaN is never close;
// an infinity is close only to the identical infinity.
bool is_close_value(double actual, double reference, const ToleranceSpec& tol);

// Elementwise comparison of spreadsheet values `actual` against oracle values
// `reference`. kLengthMismatch on unequal lengths.
ComparisonResult isclose(const NumericSeries& actual, const NumericSeries& reference,
                         const ToleranceSpec& tol = {});
bool allclose(const NumericSeries& actual, const NumericSeries& reference,
              const ToleranceSpec& tol = {});

// Maximal blocks of false / true entries in the mask, ascending.
std::vector<IndexRun> mismatch_runs(const ComparisonResult& result);
std::vector<IndexRun> match_runs(const ComparisonResult& result);
std::vector<IndexRun> group_runs(const std::vector<bool>& mask, bool value);

// Index i lands on the cell `offset + i` steps from `anchor` along the
// orientation. Single-cell runs render as "$G$41", longer ones as
// "$H$41:$BN$41".
std::vector<std::string> runs_to_a1(const CellRef& anchor, Orientation orientation, std::size_t offset,
                                    const std::vector<IndexRun>& runs);

}  // namespace sheetaudit
