#include "sheetaudit/compare.hpp"

#include <cmath>

#include "sheetaudit/errors.hpp"

namespace sheetaudit {

void ToleranceSpec::validate() const {
  if (!std::isfinite(rtol) || rtol < 0 || !std::isfinite(atol) || atol < 0) {
    throw Error(ErrorKind::kDomainError, "tolerances must be finite and >= 0 (rtol=" +
                                             std::to_string(rtol) + ", atol=" + std::to_string(atol) + ")");
  }
}

double ComparisonResult::mismatch_fraction() const {
  if (mask.empty()) return 0.0;
  return static_cast<double>(mismatch_indices.size()) / static_cast<double>(mask.size());
}

bool is_close_value(double actual, double reference, const ToleranceSpec& tol) {
  if (std::isinf(actual) || std::isinf(reference)) return actual == reference;
  return std::fabs(actual - reference) <= tol.atol + tol.rtol * std::fabs(reference);
}

std::vector<IndexRun> group_runs(const std::vector<bool>& mask, bool value) {
  std::vector<IndexRun> runs;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] != value) continue;
    if (!runs.empty() && runs.back().end + 1 == i) {
      runs.back().end = i;
    } else {
      runs.push_back({i, i});
    }
  }
  return runs;
}

ComparisonResult isclose(const NumericSeries& actual, const NumericSeries& reference,
                         const ToleranceSpec& tol) {
  tol.validate();
  if (actual.size() != reference.size()) {
    throw Error(ErrorKind::kLengthMismatch, "compared series have lengths " + std::to_string(actual.size()) +
                                                " and " + std::to_string(reference.size()));
  }
  ComparisonResult r;
  r.mask.resize(actual.size());
  for (std::size_t i = 0; i < actual.size(); ++i) {
    r.mask[i] = is_close_value(actual[i], reference[i], tol);
    if (!r.mask[i]) r.mismatch_indices.push_back(i);
  }
  r.match_runs = group_runs(r.mask, true);
  r.mismatch_runs = group_runs(r.mask, false);
  return r;
}

bool allclose(const NumericSeries& actual, const NumericSeries& reference, const ToleranceSpec& tol) {
  return isclose(actual, reference, tol).all_close();
}

std::vector<IndexRun> mismatch_runs(const ComparisonResult& result) {
  return group_runs(result.mask, false);
}

std::vector<IndexRun> match_runs(const ComparisonResult& result) { return group_runs(result.mask, true); }

std::vector<std::string> runs_to_a1(const CellRef& anchor, Orientation orientation, std::size_t offset,
                                    const std::vector<IndexRun>& runs) {
  std::vector<std::string> out;
  out.reserve(runs.size());
  for (const IndexRun& run : runs) {
    if (run.end < run.start) throw Error(ErrorKind::kDomainError, "run end precedes start");
    CellRef first = displace(anchor, orientation, static_cast<std::int64_t>(offset + run.start));
    CellRef last = displace(anchor, orientation, static_cast<std::int64_t>(offset + run.end));
    out.push_back(absolute_address(make_range(first, last)));
  }
  return out;
}

}  // namespace sheetaudit
