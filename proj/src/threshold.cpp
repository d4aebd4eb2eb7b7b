#include "neardup/threshold.hpp"

#include <charconv>
#include <cmath>
#include <numeric>

#include "neardup/errors.hpp"

namespace neardup {

namespace {
__extension__ using u128 = unsigned __int128;
}

Threshold::Threshold(std::uint64_t numerator, std::uint64_t denominator)
    : num_(numerator), den_(denominator) {
  if (den_ == 0 || num_ == 0 || num_ > den_) {
    throw UsageError("threshold must lie in (0, 1], got " +
                     std::to_string(numerator) + "/" +
                     std::to_string(denominator));
  }
  std::uint64_t g = std::gcd(num_, den_);
  num_ /= g;
  den_ /= g;
}

Threshold Threshold::parse(std::string_view text) {
  auto fail = [&]() -> Threshold {
    throw UsageError("invalid threshold \"" + std::string(text) +
                     "\": expected a decimal in (0, 1]");
  };
  std::uint64_t num = 0;
  std::uint64_t den = 1;
  bool seen_digit = false;
  bool seen_point = false;
  for (char c : text) {
    if (c == '.') {
      if (seen_point) return fail();
      seen_point = true;
    } else if (c >= '0' && c <= '9') {
      seen_digit = true;
      if (num > 1'000'000'000'000ULL || den > 1'000'000'000'000ULL) {
        return fail();  // more precision than any threshold needs
      }
      num = num * 10 + static_cast<std::uint64_t>(c - '0');
      if (seen_point) den *= 10;
    } else {
      return fail();
    }
  }
  if (!seen_digit || num == 0 || num > den) return fail();
  return Threshold(num, den);
}

Threshold Threshold::from_double(double value) {
  if (!std::isfinite(value)) {
    throw UsageError("threshold must be finite");
  }
  char buf[64];
  auto [end, ec] =
      std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed);
  if (ec != std::errc{}) throw UsageError("threshold out of range");
  return parse(std::string_view(buf, static_cast<std::size_t>(end - buf)));
}

std::string Threshold::to_string() const {
  return std::to_string(num_) + "/" + std::to_string(den_);
}

bool Threshold::admits(std::uint64_t part, std::uint64_t whole) const {
  if (whole == 0) return true;
  return static_cast<u128>(part) * den_ >= static_cast<u128>(num_) * whole;
}

std::uint64_t Threshold::ceil_times(std::uint64_t n) const {
  u128 scaled = static_cast<u128>(n) * num_;
  return static_cast<std::uint64_t>((scaled + den_ - 1) / den_);
}

}  // namespace neardup
