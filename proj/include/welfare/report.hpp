#ifndef WELFARE_REPORT_HPP_
#define WELFARE_REPORT_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "welfare/core.hpp"
#include "welfare/welfare.hpp"

namespace welfare {

struct ReportRow {
  std::size_t index = 0;
  int group = 0;
  double income = 0.0;
  double margin = 0.0;
  double weight = 0.0;
  double marginal_gain = 0.0;
  int allocated = 0;
  int label = 0;
};

struct GroupSummary {
  std::size_t count = 0;
  double positive_rate = 0.0;
  std::optional<double> tpr;  // absent when the group has no label +1 members
  double mean_weight = 0.0;
  double welfare = 0.0;        // sum over the group of w_i u_i
  double welfare_share = 0.0;  // welfare / total_welfare
};

/// Equal-width bins over the pooled weight range; counts per group.
struct WeightHistogram {
  double lo = 0.0;
  double hi = 0.0;
  std::map<int, std::vector<std::size_t>> counts;
};

struct WelfareReport {
  std::string regime;
  WeightFunction weight_function;
  std::size_t budget = 0;
  std::optional<bool> matched;
  std::string income_checksum;
  std::vector<ReportRow> rows;
  std::map<int, GroupSummary> groups;
  double total_welfare = 0.0;
  WeightHistogram histogram;

  /// Shares sum to 1 within 1e-9 and total_welfare agrees with the rows to
  /// 1e-9 relative. Throws ValidationError otherwise.
  void validate() const;
};

/// Order-sensitive FNV-1a hash of the income bit patterns, as 16 hex digits.
std::string income_checksum(std::span<const double> incomes);

/// W = sum_i w_i u(x^m_i, y_i) with per-group shares. Throws std::runtime_error
/// "report undefined" when W <= 0.
WelfareReport build_report(const Dataset& dataset, std::span<const double> margins, const Allocation& allocation,
                           const WeightFunction& wf, const std::string& regime, std::size_t histogram_bins = 20);

struct GroupDelta {
  double positive_rate = 0.0;
  double mean_weight = 0.0;
  double welfare_share = 0.0;
};

struct FlippedIndividual {
  std::size_t index = 0;
  int group = 0;
  double income_quantile = 0.0;  // empirical CDF of income at this individual
  int from = 0;
  int to = 0;
};

struct RegimeComparison {
  std::string regime;
  std::map<int, GroupDelta> deltas;  // regime minus baseline
  std::vector<FlippedIndividual> flipped;
};

struct ComparisonTable {
  std::string baseline;
  std::vector<RegimeComparison> regimes;  // one per report, baseline included
};

/// Deltas of every report against the first one. Reports must describe the
/// same population (same n and income checksum).
ComparisonTable compare_regimes(std::span<const WelfareReport> reports);

/// Aligned plain-text rendering for terminals.
std::string render_text(const ComparisonTable& table);

}  // namespace welfare

#endif  // WELFARE_REPORT_HPP_
