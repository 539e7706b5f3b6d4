#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "corebench/errors.hpp"

namespace corebench {

/// Subset of agents {0..n-1} as a bitmask.
using Coalition = std::uint32_t;

inline constexpr std::size_t kDefaultEnumerationCap = 14;
// Hard ceiling: coalition tables are dense arrays of 2^n entries.
inline constexpr std::size_t kMaxEnumerationCap = 24;

/// Enumeration cap from COREBENCH_CAP, else the default.
inline std::size_t enumeration_cap_from_env() {
  if (const char* raw = std::getenv("COREBENCH_CAP")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(raw, &end, 10);
    if (end != raw && *end == '\0' && v >= 1 && v <= kMaxEnumerationCap) return v;
    throw InvalidInput("COREBENCH_CAP: expected an integer in [1, " +
                       std::to_string(kMaxEnumerationCap) + "]");
  }
  return kDefaultEnumerationCap;
}

inline std::vector<std::size_t> members(Coalition c) {
  std::vector<std::size_t> out;
  while (c != 0) {
    out.push_back(static_cast<std::size_t>(std::countr_zero(c)));
    c &= c - 1;
  }
  return out;
}

inline Coalition coalition_of(const std::vector<std::size_t>& agents) {
  Coalition c = 0;
  for (std::size_t a : agents) c |= Coalition{1} << a;
  return c;
}

/// Lexicographic order on sorted member lists ({0,1} < {0,2} < {1}).
inline bool lexicographically_less(Coalition a, Coalition b) {
  const auto ma = members(a);
  const auto mb = members(b);
  return std::lexicographical_compare(ma.begin(), ma.end(), mb.begin(), mb.end());
}

/// Single-parameter environment with an explicit feasible family F over n agents.
class GenericEnvironment {
 public:
  GenericEnvironment() = default;

  /// The empty set is added to `feasible` if missing. Duplicate sets are merged.
  /// With `downward_closed`, closure under subsets is validated.
  GenericEnvironment(std::vector<double> values, std::vector<Coalition> feasible,
                     bool downward_closed = false)
      : values_(std::move(values)), feasible_(std::move(feasible)) {
    if (values_.empty()) throw InvalidInput("values: environment needs at least one agent");
    if (values_.size() > kMaxEnumerationCap)
      throw InstanceTooLarge(values_.size(), kMaxEnumerationCap);
    for (std::size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i]) || values_[i] < 0.0)
        throw InvalidInput("values[" + std::to_string(i) + "]: must be finite and non-negative");
    }
    const Coalition universe = full();
    for (Coalition c : feasible_) {
      if ((c & ~universe) != 0) throw InvalidInput("feasible: set references an unknown agent");
    }
    feasible_.push_back(0);
    std::sort(feasible_.begin(), feasible_.end(), lexicographically_less);
    feasible_.erase(std::unique(feasible_.begin(), feasible_.end()), feasible_.end());

    member_.assign(std::size_t{1} << values_.size(), 0);
    for (Coalition c : feasible_) member_[c] = 1;
    downward_closed_ = std::all_of(feasible_.begin(), feasible_.end(), [&](Coalition c) {
      for (Coalition rest = c; rest != 0; rest &= rest - 1)
        if (!member_[c & ~(rest & -rest)]) return false;
      return true;
    });
    if (downward_closed && !downward_closed_)
      throw InvalidInput("feasible: family flagged downward-closed but is not");
  }

  /// Build from 0-based index lists.
  static GenericEnvironment from_lists(std::vector<double> values,
                                       const std::vector<std::vector<std::size_t>>& sets,
                                       bool downward_closed = false) {
    std::vector<Coalition> feasible;
    for (const auto& s : sets) {
      for (std::size_t a : s) {
        if (a >= values.size())
          throw InvalidInput("feasible: index " + std::to_string(a) + " out of range");
      }
      feasible.push_back(coalition_of(s));
    }
    return GenericEnvironment(std::move(values), std::move(feasible), downward_closed);
  }

  /// Multi-unit environment: every set of at most `k` agents.
  static GenericEnvironment multi_unit(std::vector<double> values, std::size_t k) {
    const std::size_t n = values.size();
    if (n > kMaxEnumerationCap) throw InstanceTooLarge(n, kMaxEnumerationCap);
    std::vector<Coalition> feasible;
    for (Coalition c = 0; c < (Coalition{1} << n); ++c)
      if (static_cast<std::size_t>(std::popcount(c)) <= k) feasible.push_back(c);
    return GenericEnvironment(std::move(values), std::move(feasible), true);
  }

  /// Digital goods: F = 2^N.
  static GenericEnvironment digital_goods(std::vector<double> values) {
    const std::size_t n = values.size();
    return multi_unit(std::move(values), n);
  }

  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<double>& values() const noexcept { return values_; }
  const std::vector<Coalition>& feasible() const noexcept { return feasible_; }
  bool is_feasible(Coalition c) const { return (c & ~full()) == 0 && member_[c] != 0; }
  bool is_downward_closed() const noexcept { return downward_closed_; }
  Coalition full() const noexcept {
    return static_cast<Coalition>((std::uint64_t{1} << values_.size()) - 1);
  }

  double value_of(Coalition c) const {
    double sum = 0.0;
    for (std::size_t a : members(c)) sum += values_[a];
    return sum;
  }

  void require_within(std::size_t cap) const {
    if (size() > cap) throw InstanceTooLarge(size(), cap);
  }

 private:
  std::vector<double> values_;
  std::vector<Coalition> feasible_;
  std::vector<char> member_;
  bool downward_closed_ = true;
};

/// Winner set plus per-winner payments.
struct DeterministicOutcome {
  std::vector<std::size_t> winners;  // ascending agent ids
  std::map<std::size_t, double> payments;

  double revenue() const {
    return std::accumulate(payments.begin(), payments.end(), 0.0,
                           [](double acc, const auto& kv) { return acc + kv.second; });
  }
  double payment_of(std::size_t agent) const {
    auto it = payments.find(agent);
    return it == payments.end() ? 0.0 : it->second;
  }
  bool wins(std::size_t agent) const {
    return std::binary_search(winners.begin(), winners.end(), agent);
  }
  Coalition coalition() const { return coalition_of(winners); }
};

}  // namespace corebench
