#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace neardup {

/// A similarity threshold in (0, 1] held as an exact fraction, so that
/// "ratio >= threshold" decisions on integer counts never depend on
/// floating-point rounding.
class Threshold {
 public:
  /// Throws UsageError unless 0 < numerator <= denominator.
  Threshold(std::uint64_t numerator, std::uint64_t denominator);

  /// Exact decimal parse: "0.8" -> 4/5, "1" -> 1/1, "0.125" -> 1/8.
  static Threshold parse(std::string_view decimal);
  /// Uses the shortest decimal that round-trips to `value`, so 0.7 -> 7/10.
  static Threshold from_double(double value);

  std::uint64_t numerator() const { return num_; }
  std::uint64_t denominator() const { return den_; }
  double value() const { return static_cast<double>(num_) / den_; }
  std::string to_string() const;

  /// part / whole >= threshold. A zero `whole` is treated as similarity 1.
  bool admits(std::uint64_t part, std::uint64_t whole) const;
  /// Smallest integer k with k >= threshold * n.
  std::uint64_t ceil_times(std::uint64_t n) const;

  friend bool operator==(const Threshold&, const Threshold&) = default;

 private:
  std::uint64_t num_;
  std::uint64_t den_;
};

}  // namespace neardup
