#include "qsat/bounds.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qsat/errors.hpp"

namespace qsat {

namespace {

constexpr std::uint64_t kEncodedSourceDegree = 510;

long double lll_ratio(std::size_t exponent, std::size_t divisor) {
  return std::ldexp(1.0L, static_cast<int>(exponent)) /
         (std::numbers::e_v<long double> * static_cast<long double>(divisor));
}

}  // namespace

BoundReport bound_report(std::size_t k) {
  if (k < 1 || k > kMaxBoundK) {
    throw ArgumentError("k must be in [1, " + std::to_string(kMaxBoundK) + "], got " +
                        std::to_string(k));
  }
  BoundReport report;
  report.k = k;
  report.qlll_lower = static_cast<std::uint64_t>(std::floor(lll_ratio(k, k)));
  report.gebauer_lower = static_cast<std::uint64_t>(std::floor(lll_ratio(k + 1, k + 1)));
  report.gebauer_upper_estimate = static_cast<double>(lll_ratio(k + 1, k));
  report.tovey_lower = k;
  return report;
}

bool threshold_check(std::size_t k) {
  return bound_report(k).qlll_lower + 2 > kEncodedSourceDegree;
}

}  // namespace qsat
