#include "welfare/report.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "welfare/kernels.hpp"

namespace welfare {

std::string income_checksum(std::span<const double> incomes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (double v : incomes) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    for (int byte = 0; byte < 8; ++byte) {
      hash ^= (bits >> (8 * byte)) & 0xffU;
      hash *= 0x100000001b3ULL;
    }
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

void WelfareReport::validate() const {
  double share_sum = 0.0;
  for (const auto& [g, s] : groups) share_sum += s.welfare_share;
  require(std::abs(share_sum - 1.0) <= 1e-9, "welfare shares sum to " + std::to_string(share_sum));
  std::vector<double> terms;
  terms.reserve(rows.size());
  for (const auto& row : rows) {
    terms.push_back(row.weight * utility(weight_function.utility, row.income, row.allocated));
  }
  const double recomputed = kernels::pairwise_sum(terms);
  require(std::abs(recomputed - total_welfare) <= 1e-9 * std::abs(total_welfare),
          "total welfare does not match per-individual rows");
}

WelfareReport build_report(const Dataset& dataset, std::span<const double> margins, const Allocation& allocation,
                           const WeightFunction& wf, const std::string& regime, std::size_t histogram_bins) {
  wf.validate();
  require(margins.size() == dataset.size() && allocation.size() == dataset.size(),
          "dataset, margins and allocation must have the same length");
  require(histogram_bins >= 1, "histogram needs at least one bin");

  const std::vector<double> incomes = dataset.incomes();
  const std::vector<double> w = weights(wf, margins, incomes);
  const std::vector<double> gains = marginal_gains(wf, margins, incomes);

  WelfareReport report;
  report.regime = regime;
  report.weight_function = wf;
  report.budget = allocation.budget;
  report.income_checksum = income_checksum(incomes);
  report.rows.reserve(dataset.size());

  std::vector<double> terms(dataset.size());
  std::map<int, std::vector<double>> group_terms;
  std::map<int, std::size_t> positives;
  std::map<int, std::size_t> label_pos;
  std::map<int, std::size_t> true_pos;
  std::map<int, double> weight_sum;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const Individual& ind = dataset[i];
    const int y = allocation.assignments[i];
    report.rows.push_back({i, ind.group, ind.income, margins[i], w[i], gains[i], y, sign_of(ind.label)});
    terms[i] = w[i] * utility(wf.utility, ind.income, y);
    group_terms[ind.group].push_back(terms[i]);
    auto& summary = report.groups[ind.group];
    ++summary.count;
    positives[ind.group] += y;
    weight_sum[ind.group] += w[i];
    if (ind.label == Label::Positive) {
      ++label_pos[ind.group];
      true_pos[ind.group] += y;
    }
  }

  report.total_welfare = kernels::pairwise_sum(terms);
  if (!(report.total_welfare > 0.0)) {
    throw std::runtime_error("report undefined: total welfare is not positive (utilities may be <= 0)");
  }
  for (auto& [g, summary] : report.groups) {
    const double count = static_cast<double>(summary.count);
    summary.positive_rate = static_cast<double>(positives[g]) / count;
    if (label_pos[g] > 0) summary.tpr = static_cast<double>(true_pos[g]) / static_cast<double>(label_pos[g]);
    summary.mean_weight = weight_sum[g] / count;
    summary.welfare = kernels::pairwise_sum(group_terms[g]);
    summary.welfare_share = summary.welfare / report.total_welfare;
  }

  auto& hist = report.histogram;
  const auto [lo_it, hi_it] = std::minmax_element(w.begin(), w.end());
  hist.lo = *lo_it;
  hist.hi = *hi_it > *lo_it ? *hi_it : *lo_it + 1.0;
  const double width = (hist.hi - hist.lo) / static_cast<double>(histogram_bins);
  for (const auto& [g, summary] : report.groups) hist.counts[g].assign(histogram_bins, 0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    auto bin = static_cast<std::size_t>((w[i] - hist.lo) / width);
    bin = std::min(bin, histogram_bins - 1);
    ++hist.counts[dataset[i].group][bin];
  }
  return report;
}

ComparisonTable compare_regimes(std::span<const WelfareReport> reports) {
  require(reports.size() >= 2, "comparison needs at least two reports");
  const WelfareReport& base = reports.front();
  for (const auto& r : reports) {
    require(r.rows.size() == base.rows.size() && r.income_checksum == base.income_checksum,
            "report '" + r.regime + "' describes a different dataset than '" + base.regime + "'");
  }

  std::vector<double> sorted_income;
  for (const auto& row : base.rows) sorted_income.push_back(row.income);
  std::sort(sorted_income.begin(), sorted_income.end());
  const auto quantile = [&](double income) {
    const auto upper = std::upper_bound(sorted_income.begin(), sorted_income.end(), income);
    return static_cast<double>(upper - sorted_income.begin()) / static_cast<double>(sorted_income.size());
  };

  ComparisonTable table;
  table.baseline = base.regime;
  for (const auto& r : reports) {
    RegimeComparison cmp;
    cmp.regime = r.regime;
    for (const auto& [g, s] : r.groups) {
      const auto it = base.groups.find(g);
      const GroupSummary empty;
      const GroupSummary& b = it == base.groups.end() ? empty : it->second;
      cmp.deltas[g] = {s.positive_rate - b.positive_rate, s.mean_weight - b.mean_weight,
                       s.welfare_share - b.welfare_share};
    }
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
      const int from = base.rows[i].allocated;
      const int to = r.rows[i].allocated;
      if (from != to) cmp.flipped.push_back({i, r.rows[i].group, quantile(r.rows[i].income), from, to});
    }
    table.regimes.push_back(std::move(cmp));
  }
  return table;
}

std::string render_text(const ComparisonTable& table) {
  std::ostringstream os;
  char line[160];
  os << "baseline: " << table.baseline << "\n";
  std::snprintf(line, sizeof line, "%-24s %5s %14s %14s %14s %8s\n", "regime", "group", "d_pos_rate",
                "d_mean_weight", "d_welf_share", "flipped");
  os << line;
  for (const auto& cmp : table.regimes) {
    for (const auto& [g, d] : cmp.deltas) {
      std::snprintf(line, sizeof line, "%-24s %5d %+14.6f %+14.6g %+14.6f %8zu\n", cmp.regime.c_str(), g,
                    d.positive_rate, d.mean_weight, d.welfare_share, cmp.flipped.size());
      os << line;
    }
  }
  return os.str();
}

}  // namespace welfare
