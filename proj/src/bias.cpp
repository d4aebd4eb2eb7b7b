#include "neardup/bias.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>

#include "neardup/errors.hpp"

namespace neardup {

namespace {

constexpr std::size_t kPairwiseBase = 8;

std::string list_offenders(const std::vector<DocId>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size() && i < 10; ++i) {
    out += " \"" + ids[i] + "\"";
  }
  if (ids.size() > 10) out += " ...";
  return out;
}

// Metric values laid out in universe order, after checking that metric ids
// and universe ids match one to one.
std::vector<double> values_by_universe(std::span<const MetricRecord> metrics,
                                       const DuplicationReport& report) {
  std::unordered_map<std::string_view, const MetricRecord*> by_id;
  by_id.reserve(metrics.size());
  std::vector<DocId> repeated;
  std::vector<DocId> unknown;
  for (const auto& m : metrics) {
    if (!by_id.emplace(m.id, &m).second) repeated.push_back(m.id);
    if (!report.contains(m.id)) unknown.push_back(m.id);
  }
  std::vector<DocId> missing;
  std::vector<double> values;
  values.reserve(report.num_files());
  for (const auto& id : report.universe()) {
    auto it = by_id.find(id);
    if (it == by_id.end()) {
      missing.push_back(id);
    } else {
      values.push_back(it->second->value);
    }
  }
  std::string problems;
  if (!repeated.empty()) problems += " repeated metric ids:" + list_offenders(repeated) + ";";
  if (!unknown.empty()) problems += " metric ids not in the report:" + list_offenders(unknown) + ";";
  if (!missing.empty()) problems += " ids without a metric:" + list_offenders(missing) + ";";
  if (!problems.empty()) {
    problems.pop_back();
    throw DataError("metrics do not match the report:" + problems);
  }
  if (values.empty()) throw DataError("no samples to aggregate");
  return values;
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= kPairwiseBase) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum;
  }
  std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

double estimate_mean(std::span<const MetricRecord> metrics) {
  if (metrics.empty()) throw DataError("cannot average an empty metric set");
  std::vector<const MetricRecord*> sorted;
  sorted.reserve(metrics.size());
  for (const auto& m : metrics) sorted.push_back(&m);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto* a, const auto* b) { return a->id < b->id; });
  std::vector<double> values;
  values.reserve(sorted.size());
  for (const auto* m : sorted) values.push_back(m->value);
  return pairwise_sum(values) / static_cast<double>(values.size());
}

BiasDecomposition decompose(std::span<const MetricRecord> metrics,
                            const DuplicationReport& report) {
  const auto values = values_by_universe(metrics, report);
  const auto& universe = report.universe();

  // Unique items in id order: each singleton, and each group at the position
  // of its smallest member, contributes its (group) mean.
  std::vector<double> unique_means;
  std::vector<double> redundant;  // (c_g - 1) * m_g per group
  unique_means.reserve(report.num_unique());
  redundant.reserve(report.num_groups());
  std::vector<double> group_values;
  for (std::size_t i = 0; i < universe.size(); ++i) {
    auto g = report.group_index(universe[i]);
    if (!g) {
      unique_means.push_back(values[i]);
      continue;
    }
    const auto& members = report.groups()[*g];
    if (members.front() != universe[i]) continue;
    group_values.clear();
    for (const auto& id : members) {
      auto pos = std::lower_bound(universe.begin(), universe.end(), id) - universe.begin();
      group_values.push_back(values[static_cast<std::size_t>(pos)]);
    }
    const double c = static_cast<double>(members.size());
    const double mean = pairwise_sum(group_values) / c;
    unique_means.push_back(mean);
    redundant.push_back((c - 1.0) * mean);
  }

  const double num_files = static_cast<double>(universe.size());
  const double num_unique = static_cast<double>(unique_means.size());
  BiasDecomposition result;
  result.d = (num_files - num_unique) / num_files;
  result.f_hat = pairwise_sum(values) / num_files;
  result.f_bar = pairwise_sum(unique_means) / num_unique;
  if (report.num_groups() > 0) {
    result.beta = pairwise_sum(redundant) / (num_files - num_unique);
  } else {
    result.f_hat = result.f_bar;
  }
  return result;
}

double down_weighted_mean(std::span<const MetricRecord> metrics,
                          const DuplicationReport& report) {
  const auto values = values_by_universe(metrics, report);
  std::vector<double> weighted;
  weighted.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    auto c = static_cast<double>(report.group_size_of(report.universe()[i]));
    weighted.push_back(values[i] / c);
  }
  return pairwise_sum(weighted) / static_cast<double>(report.num_unique());
}

std::vector<WeightedSample> sample_weights(const DuplicationReport& report) {
  std::vector<WeightedSample> weights;
  weights.reserve(report.num_files());
  for (const auto& id : report.universe()) {
    weights.push_back({id, 1.0 / static_cast<double>(report.group_size_of(id))});
  }
  return weights;
}

}  // namespace neardup
