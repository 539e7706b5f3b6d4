#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <tuple>
#include <vector>

#include "corebench/benchmarks.hpp"
#include "corebench/errors.hpp"
#include "corebench/mechanisms.hpp"
#include "corebench/profile.hpp"
#include "corebench/random.hpp"

namespace corebench {

inline constexpr double kIcTolerance = 1e-7;
inline constexpr double kCriticalPrecision = 1e-7;

struct ICViolation {
  std::size_t agent = 0;
  double true_value = 0.0;
  double deviation = 0.0;
  double utility_gain = 0.0;
};

struct RatioRecord {
  std::size_t profile_id = 0;
  std::size_t k = 0;
  double core_rev = 0.0;
  double mechanism_revenue = 0.0;
  double ratio = 1.0;
};

inline AgentResult result_for(const Mechanism& m, const TextImageProfile& p, std::size_t agent) {
  return m.evaluate(p).at(agent);
}

/// Infimum winning bid of `agent` on [0, hi] for a deterministic mechanism,
/// by bisection to `precision`. A 64-point scan first rejects rules where the
/// agent wins at some bid and loses at a higher one.
inline double critical_value(const Mechanism& m, const TextImageProfile& p, std::size_t agent,
                             double hi, double precision = kCriticalPrecision) {
  if (!m.deterministic) throw InvalidInput("critical value: mechanism must be deterministic");
  if (!(hi >= 0.0) || !std::isfinite(hi)) throw InvalidInput("critical value: bad upper bound");
  auto wins = [&](double bid) {
    return result_for(m, p.with_value(agent, bid), agent).win_probability >= 0.5;
  };
  if (!wins(hi)) throw InvalidInput("critical value: agent does not win at the upper bound");

  bool seen_win = false;
  for (int i = 0; i <= 64; ++i) {
    const double bid = hi * i / 64.0;
    const bool w = wins(bid);
    if (seen_win && !w)
      throw MonotonicityViolation("critical value: agent " + std::to_string(agent) +
                                  " wins below " + std::to_string(bid) + " but loses there");
    seen_win = seen_win || w;
  }
  if (wins(0.0)) return 0.0;

  double lo = 0.0;
  while (hi - lo > precision / 4.0) {
    const double mid = lo + (hi - lo) / 2.0;
    if (mid <= lo || mid >= hi) break;
    (wins(mid) ? hi : lo) = mid;
  }
  return lo + (hi - lo) / 2.0;
}

/// True iff the agent's win probability never drops along the ascending grid.
inline bool check_monotone(const Mechanism& m, const TextImageProfile& p, std::size_t agent,
                           const std::vector<double>& grid) {
  if (!std::is_sorted(grid.begin(), grid.end()))
    throw InvalidInput("monotonicity: grid must be ascending");
  double prev = -std::numeric_limits<double>::infinity();
  for (double bid : grid) {
    const double x = result_for(m, p.with_value(agent, bid), agent).win_probability;
    if (x < prev - kMonotoneTolerance) return false;
    prev = std::max(prev, x);
  }
  return true;
}

/// `count` evenly spaced bids covering [0, 2 * max value] (or [0, 2] for an all-zero profile).
inline std::vector<double> deviation_grid(const TextImageProfile& p, std::size_t count = 32) {
  double top = 0.0;
  for (std::size_t a = 0; a < p.agent_count(); ++a) top = std::max(top, p.value_of(a));
  const double hi = top > 0.0 ? 2.0 * top : 2.0;
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i)
    grid[i] = count == 1 ? hi : hi * static_cast<double>(i) / static_cast<double>(count - 1);
  return grid;
}

/// Every (agent, deviation) where misreporting raises expected utility by more
/// than the tolerance.
inline std::vector<ICViolation> check_ic(const Mechanism& m, const TextImageProfile& p,
                                         const std::vector<double>& deviations) {
  std::vector<ICViolation> out;
  const auto truthful = m.evaluate(p);
  for (std::size_t a = 0; a < p.agent_count(); ++a) {
    const double v = p.value_of(a);
    const double honest = v * truthful[a].win_probability - truthful[a].expected_payment;
    for (double bid : deviations) {
      if (bid == v) continue;
      const auto r = result_for(m, p.with_value(a, bid), a);
      const double gain = v * r.win_probability - r.expected_payment - honest;
      if (gain > kIcTolerance) out.push_back({a, v, bid, gain});
    }
  }
  return out;
}

/// Shuffles texts among texts and images among images.
inline TextImageProfile permute_profile(const TextImageProfile& p, std::uint64_t seed) {
  auto rng = substream(seed, "anonymity");
  auto shuffle = [&](std::vector<double> v) {
    for (std::size_t i = v.size(); i > 1; --i)
      std::swap(v[i - 1], v[uniform_int(rng, 0, i - 1)]);
    return v;
  };
  return TextImageProfile::create(
      p.slots(), shuffle({p.text_values().begin(), p.text_values().end()}),
      shuffle({p.image_values().begin(), p.image_values().end()}));
}

/// True iff the multiset of (value, win probability, payment) over served
/// agents is unchanged by a type-respecting permutation.
inline bool check_anonymity(const Mechanism& m, const TextImageProfile& p,
                            std::uint64_t permutation_seed) {
  auto served = [&](const TextImageProfile& q) {
    std::vector<std::tuple<double, double, double>> out;
    const auto r = m.evaluate(q);
    for (std::size_t a = 0; a < q.agent_count(); ++a)
      if (r[a].win_probability > 0.0)
        out.emplace_back(q.value_of(a), r[a].win_probability, r[a].expected_payment);
    std::sort(out.begin(), out.end());
    return out;
  };
  const auto before = served(p);
  const auto after = served(permute_profile(p, permutation_seed));
  if (before.size() != after.size()) return false;
  constexpr double tol = 1e-9;
  for (std::size_t i = 0; i < before.size(); ++i) {
    const auto& [v1, x1, p1] = before[i];
    const auto& [v2, x2, p2] = after[i];
    if (v1 != v2 || std::abs(x1 - x2) > tol || std::abs(p1 - p2) > tol) return false;
  }
  return true;
}

/// CoreRev / revenue. 1 when CoreRev is 0, +inf when only the revenue is 0.
inline double revenue_ratio(double core_rev, double revenue) {
  if (core_rev <= 0.0) return 1.0;
  if (revenue <= 0.0) return std::numeric_limits<double>::infinity();
  return core_rev / revenue;
}

inline RatioRecord competitive_ratio(const Mechanism& m, const TextImageProfile& p,
                                     std::size_t profile_id = 0) {
  RatioRecord r;
  r.profile_id = profile_id;
  r.k = p.slots();
  r.core_rev = core_revenue_text_image(p);
  r.mechanism_revenue = expected_revenue(m, p);
  r.ratio = revenue_ratio(r.core_rev, r.mechanism_revenue);
  return r;
}

// ---------------------------------------------------------------------------
// Control mechanisms. They treat every ad as a bidder for one item and exist
// to show the harness can fail.

namespace controls {

inline std::size_t highest(const TextImageProfile& p, std::size_t skip = kPadding) {
  std::size_t best = kPadding;
  for (std::size_t a = 0; a < p.agent_count(); ++a) {
    if (a == skip) continue;
    if (best == kPadding || p.value_of(a) > p.value_of(best)) best = a;
  }
  return best;
}

inline double second_value(const TextImageProfile& p, std::size_t winner) {
  const std::size_t b = highest(p, winner);
  return b == kPadding ? 0.0 : p.value_of(b);
}

inline Mechanism second_price() {
  return {"second-price-toy", true, [](const TextImageProfile& p) {
            std::vector<AgentResult> out(p.agent_count());
            const std::size_t w = highest(p);
            out[w] = {1.0, second_value(p, w)};
            return out;
          }, {}};
}

inline Mechanism first_price() {
  return {"first-price-toy", true, [](const TextImageProfile& p) {
            std::vector<AgentResult> out(p.agent_count());
            const std::size_t w = highest(p);
            out[w] = {1.0, p.value_of(w)};
            return out;
          }, {}};
}

/// Serves an agent iff its bid lies in [1, 2]. Not monotone.
inline Mechanism interval() {
  return {"interval-toy", true, [](const TextImageProfile& p) {
            std::vector<AgentResult> out(p.agent_count());
            for (std::size_t a = 0; a < p.agent_count(); ++a)
              if (p.value_of(a) >= 1.0 && p.value_of(a) <= 2.0) out[a] = {1.0, 1.0};
            return out;
          }, {}};
}

/// Everyone served with probability 1/2 for free.
inline Mechanism constant() {
  return {"constant-toy", false, [](const TextImageProfile& p) {
            return std::vector<AgentResult>(p.agent_count(), AgentResult{0.5, 0.0});
          }, {}};
}

/// Agent 0 wins whenever it bids at least half the best rival, paying that half.
/// Depends on identities, so it fails anonymity.
inline Mechanism index_biased() {
  return {"index-biased-toy", true, [](const TextImageProfile& p) {
            std::vector<AgentResult> out(p.agent_count());
            const double rival = second_value(p, 0);
            if (p.value_of(0) >= rival / 2.0) {
              out[0] = {1.0, rival / 2.0};
            } else {
              const std::size_t w = highest(p);
              out[w] = {1.0, second_value(p, w)};
            }
            return out;
          }, {}};
}

/// Serves the top-k texts at price 0.
inline Mechanism posted_price_zero() {
  return {"posted-price-0", true, [](const TextImageProfile& p) {
            std::vector<AgentResult> out(p.agent_count());
            for (std::size_t r = 1; r <= p.slots(); ++r) {
              const std::size_t a = p.text_agent(r);
              if (a != kPadding) out[a] = {1.0, 0.0};
            }
            return out;
          }, [](const TextImageProfile&) { return 0.0; }};
}

}  // namespace controls

/// Look up a mechanism by CLI name.
inline Mechanism mechanism_by_name(const std::string& name) {
  if (name == "det") return deterministic_mechanism();
  if (name == "rand") return randomized_mechanism();
  if (name == "vcg") return vcg_mechanism();
  if (name == "first-price-toy") return controls::first_price();
  if (name == "second-price-toy") return controls::second_price();
  if (name == "interval-toy") return controls::interval();
  if (name == "constant-toy") return controls::constant();
  if (name == "index-biased-toy") return controls::index_biased();
  if (name == "posted-price-0") return controls::posted_price_zero();
  throw InvalidInput("mechanism: unknown name '" + name + "'");
}

// ---------------------------------------------------------------------------
// Batch suite

/// Random profile for property checks. Mixes uniform and harmonic-shaped text
/// values and places the top image on either side of the text strength.
inline TextImageProfile random_test_profile(std::mt19937_64& rng, std::size_t max_k = 12,
                                            std::size_t max_images = 3) {
  const std::size_t k = uniform_int(rng, 1, max_k);
  const std::size_t nt = uniform_int(rng, 0, k + 3);
  std::size_t ni = uniform_int(rng, 0, max_images);
  if (nt == 0 && ni == 0) ni = 1;

  const double scale = std::exp(uniform01(rng) * 4.0 - 2.0);
  const bool harmonic_shape = uniform01(rng) < 0.4;
  std::vector<double> text(nt);
  for (std::size_t i = 0; i < nt; ++i)
    text[i] = harmonic_shape ? scale * (0.5 + uniform01(rng)) / static_cast<double>(i + 1)
                             : scale * uniform01(rng);

  double phi = 0.0;
  {
    std::vector<double> sorted = text;
    std::sort(sorted.begin(), sorted.end(), std::greater<>{});
    for (std::size_t j = 0; j < std::min(k, sorted.size()); ++j)
      phi = std::max(phi, static_cast<double>(j + 1) * sorted[j]);
  }
  const double anchor = phi > 0.0 ? phi : scale;
  std::vector<double> image(ni);
  for (std::size_t i = 0; i < ni; ++i) {
    // Ratio to the text strength spans roughly [0.1, 33].
    image[i] = anchor * std::exp(uniform01(rng) * 5.8 - 2.3);
  }
  return TextImageProfile::create(k, std::move(text), std::move(image));
}

struct CriticalValueMismatch {
  std::size_t trial = 0;
  std::size_t agent = 0;
  double closed_form = 0.0;
  double bisection = 0.0;
};

struct MonotonicityFailure {
  std::size_t trial = 0;
  std::size_t agent = 0;
};

struct SuiteOptions {
  std::size_t deviations = 32;
  std::size_t monotone_grid = 64;
  bool check_critical_values = true;
  double critical_tolerance = 1e-6;
  std::size_t max_k = 12;
};

struct VerificationReport {
  std::string mechanism;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::size_t, ICViolation>> ic_violations;  // (trial, violation)
  std::vector<MonotonicityFailure> monotonicity_failures;
  std::vector<std::size_t> anonymity_failures;
  std::vector<CriticalValueMismatch> critical_value_mismatches;
  std::size_t critical_values_checked = 0;

  bool clean() const {
    return ic_violations.empty() && monotonicity_failures.empty() && anonymity_failures.empty() &&
           critical_value_mismatches.empty();
  }
};

/// Runs monotonicity, IC, anonymity and (for deterministic mechanisms)
/// bisection-vs-payment checks over `trials` seeded random profiles.
inline VerificationReport run_verification_suite(const Mechanism& m, std::size_t trials,
                                                 std::uint64_t seed,
                                                 const SuiteOptions& opt = {}) {
  VerificationReport rep;
  rep.mechanism = m.name;
  rep.trials = trials;
  rep.seed = seed;
  for (std::size_t t = 0; t < trials; ++t) {
    auto rng = substream(seed, "verify-profile", t);
    const TextImageProfile p = random_test_profile(rng, opt.max_k);

    for (const auto& v : check_ic(m, p, deviation_grid(p, opt.deviations)))
      rep.ic_violations.emplace_back(t, v);

    const auto grid = deviation_grid(p, opt.monotone_grid);
    for (std::size_t a = 0; a < p.agent_count(); ++a)
      if (!check_monotone(m, p, a, grid)) rep.monotonicity_failures.push_back({t, a});

    if (!check_anonymity(m, p, splitmix64(seed + t))) rep.anonymity_failures.push_back(t);

    if (m.deterministic && opt.check_critical_values) {
      const auto truthful = m.evaluate(p);
      for (std::size_t a = 0; a < p.agent_count(); ++a) {
        if (truthful[a].win_probability < 0.5) continue;
        try {
          const double cv = critical_value(m, p, a, p.value_of(a));
          ++rep.critical_values_checked;
          if (std::abs(cv - truthful[a].expected_payment) > opt.critical_tolerance)
            rep.critical_value_mismatches.push_back({t, a, truthful[a].expected_payment, cv});
        } catch (const MonotonicityViolation&) {
          rep.monotonicity_failures.push_back({t, a});
        }
      }
    }
  }
  return rep;
}

}  // namespace corebench
