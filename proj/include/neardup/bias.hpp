#pragma once

#include <optional>
#include <span>
#include <vector>

#include "neardup/corpus_io.hpp"
#include "neardup/report.hpp"

namespace neardup {

/// f_hat = (1 - d) * f_bar + d * beta.
struct BiasDecomposition {
  double d = 0.0;
  /// Plain mean over every sample, duplicates included.
  double f_hat = 0.0;
  /// Mean over unique items, each group contributing its group mean once.
  double f_bar = 0.0;
  /// Mean contribution of the redundant copies; absent when d = 0.
  std::optional<double> beta;
};

struct WeightedSample {
  DocId id;
  /// 1 / (size of the sample's group); 1 for singletons.
  double weight = 1.0;
};

/// Pairwise (cascade) summation.
double pairwise_sum(std::span<const double> values);

/// Arithmetic mean, summed in id order. Throws DataError when empty.
double estimate_mean(std::span<const MetricRecord> metrics);

/// Requires exactly one metric per universe id and no others; otherwise
/// throws DataError listing up to 10 offending ids.
BiasDecomposition decompose(std::span<const MetricRecord> metrics,
                            const DuplicationReport& report);

/// (1/|X|) * sum_i f(x_i) / c_i. Same preconditions as decompose.
double down_weighted_mean(std::span<const MetricRecord> metrics,
                          const DuplicationReport& report);

/// One entry per universe id, in id order.
std::vector<WeightedSample> sample_weights(const DuplicationReport& report);

}  // namespace neardup
