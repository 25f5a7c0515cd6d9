#pragma once

#include <cmath>
#include <iterator>
#include <type_traits>

namespace pickands {

/// Neumaier-compensated running sum. Order of `add` calls is part of the
/// result, so callers that need reproducibility feed values by index.
template <typename Scalar = double>
class CompensatedSum {
public:
  void add(Scalar x) noexcept {
    const Scalar t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(Scalar x) noexcept {
    add(x);
    return *this;
  }

  Scalar value() const noexcept { return sum_ + comp_; }

private:
  Scalar sum_{0};
  Scalar comp_{0};
};

template <typename Range>
auto compensated_total(const Range& values) {
  using Scalar = std::remove_cvref_t<decltype(*std::begin(values))>;
  CompensatedSum<Scalar> acc;
  for (const auto& v : values) acc.add(v);
  return acc.value();
}

}  // namespace pickands
