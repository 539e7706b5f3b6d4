#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "corebench/benchmarks.hpp"
#include "corebench/environment.hpp"
#include "corebench/errors.hpp"
#include "corebench/profile.hpp"
#include "corebench/random.hpp"

namespace corebench {

// Scale factors. The asymptotic forms sqrt(ln k) and ln ln k vanish or go
// negative for small k, so both are clamped below at 1; for k >= 16 the
// clamps are inactive.

/// Text weighting of the deterministic mechanism: max(1, sqrt(ln k)).
inline double text_weight(std::size_t k) {
  return std::max(1.0, std::sqrt(std::log(static_cast<double>(k))));
}

/// Lottery normalizer of the randomized mechanism: max(1, ln ln k).
inline double lottery_scale(std::size_t k) {
  return std::max(1.0, std::log(std::log(static_cast<double>(k))));
}

/// Ratio psi = v_I / Phi beyond which the image lottery stops growing: max(2, ln k).
inline double lottery_saturation(std::size_t k) {
  return std::max(2.0, std::log(static_cast<double>(k)));
}

// ---------------------------------------------------------------------------
// Deterministic mechanism

namespace detail {

// Allocation and uniform price of the deterministic mechanism, without
// materializing per-agent outcomes.
struct DeterministicDecision {
  bool allocated = false;
  bool image = false;
  std::size_t text_count = 0;  // j
  double price = 0.0;
};

inline DeterministicDecision deterministic_decision(const TextImageProfile& p) {
  DeterministicDecision d;
  const std::size_t k = p.slots();
  const double phi = phi_text(p);
  const double s = text_weight(k);
  const double top_image = p.image(1);
  if (phi == 0.0 && top_image == 0.0) return d;
  d.allocated = true;
  if (top_image >= phi * s) {
    d.image = true;
    d.price = std::max(p.image(2), phi * s);
    return d;
  }
  const double threshold = top_image / s;
  std::size_t j = k;
  while (j > 0 && !(static_cast<double>(j) * p.text(j) > threshold)) --j;
  if (j == 0) throw InvariantViolation("deterministic mechanism: no text set clears the image");
  d.text_count = j;
  d.price = std::max(p.text(k + 1), threshold / static_cast<double>(j));
  return d;
}

}  // namespace detail

/// Image wins iff v_I1 >= Phi * s(k), paying max(v_I2, Phi * s(k)). Otherwise the
/// top j texts win, j the largest index <= k with j * v_j > v_I1 / s(k), each
/// paying max(v_{k+1}, v_I1 / (j * s(k))). Both prices are critical values.
inline DeterministicOutcome deterministic_text_image(const TextImageProfile& p) {
  DeterministicOutcome out;
  const auto d = detail::deterministic_decision(p);
  if (!d.allocated) return out;
  if (d.image) {
    const std::size_t agent = p.image_agent(1);
    out.winners = {agent};
    out.payments[agent] = d.price;
    return out;
  }
  for (std::size_t r = 1; r <= d.text_count; ++r) {
    const std::size_t agent = p.text_agent(r);
    out.winners.push_back(agent);
    out.payments[agent] = d.price;
  }
  std::sort(out.winners.begin(), out.winners.end());
  return out;
}

/// Revenue of deterministic_text_image without building the outcome.
inline double deterministic_revenue(const TextImageProfile& p) {
  const auto d = detail::deterministic_decision(p);
  if (!d.allocated) return 0.0;
  return d.image ? d.price : static_cast<double>(d.text_count) * d.price;
}

// ---------------------------------------------------------------------------
// Randomized mechanism

enum class AllocationKind { TextSet, ImageLottery, Unallocated };

inline const char* to_string(AllocationKind kind) {
  switch (kind) {
    case AllocationKind::TextSet: return "text";
    case AllocationKind::ImageLottery: return "image";
    case AllocationKind::Unallocated: return "none";
  }
  return "none";
}

struct RandomizedOutcome {
  AllocationKind kind = AllocationKind::Unallocated;
  std::size_t text_set_size = 0;  // j for TextSet
  double probability = 0.0;       // q for ImageLottery, 1 for TextSet
  std::map<std::size_t, double> win_probability;
  std::map<std::size_t, double> expected_payment;

  double expected_revenue() const {
    return std::accumulate(expected_payment.begin(), expected_payment.end(), 0.0,
                           [](double acc, const auto& kv) { return acc + kv.second; });
  }
  std::vector<std::size_t> winners() const {
    std::vector<std::size_t> w;
    for (const auto& [agent, prob] : win_probability)
      if (prob > 0.0) w.push_back(agent);
    return w;
  }
};

/// Probability that the top image is served when it bids `bid` against text
/// strength `phi` (others fixed, ignoring competing images):
/// 0 up to 2*phi, then ln(min(bid/phi, B(k))) / L(k).
inline double image_lottery_probability(double bid, double phi, std::size_t k) {
  if (phi == 0.0) return bid > 0.0 ? 1.0 : 0.0;
  if (bid <= 2.0 * phi) return 0.0;
  const double ratio = std::min(bid / phi, lottery_saturation(k));
  return std::min(1.0, std::log(ratio) / lottery_scale(k));
}

namespace detail {

// Integral of image_lottery_probability over (2*phi, u], phi > 0.
inline double lottery_area(double u, double phi, std::size_t k) {
  if (u <= 2.0 * phi) return 0.0;
  const double scale = lottery_scale(k);
  const double cap = lottery_saturation(k) * phi;
  auto primitive = [&](double x) { return (x * std::log(x / phi) - x) / scale; };
  const double base = primitive(2.0 * phi);
  if (u <= cap) return primitive(u) - base;
  return primitive(cap) - base + (u - cap) * std::log(lottery_saturation(k)) / scale;
}

}  // namespace detail

/// Myerson payment of the top image with value `value`, runner-up image
/// `runner_up` and text strength `phi`. It only wins above both 2*phi and the
/// runner-up, so the integral starts at a = max(runner_up, 2*phi):
///     p = v x(v) - int_a^v x(u) du.
/// With runner_up <= 2*phi this is (v + 2 phi ln 2 - 2 phi) / L(k) below
/// saturation and (B(k) phi + 2 phi ln 2 - 2 phi) / L(k) above it.
inline double image_lottery_payment(double value, double runner_up, double phi, std::size_t k) {
  if (phi == 0.0) return value > 0.0 ? runner_up : 0.0;
  if (value <= 2.0 * phi) return 0.0;
  const double floor = std::max(runner_up, 2.0 * phi);
  return value * image_lottery_probability(value, phi, k) -
         (detail::lottery_area(value, phi, k) - detail::lottery_area(floor, phi, k));
}

namespace detail {

struct RandomizedDecision {
  AllocationKind kind = AllocationKind::Unallocated;
  std::size_t text_count = 0;  // j for TextSet
  double probability = 0.0;
  double price = 0.0;  // per-text price, or the image's expected payment
};

inline RandomizedDecision randomized_decision(const TextImageProfile& p) {
  RandomizedDecision d;
  const std::size_t k = p.slots();
  const double phi = phi_text(p);
  const double top_image = p.image(1);
  if (phi == 0.0 && top_image == 0.0) return d;

  if (top_image <= 2.0 * phi) {
    const double half = top_image / 2.0;
    std::size_t j = k;
    while (j > 0 && !(static_cast<double>(j) * p.text(j) >= half)) --j;
    if (j == 0) throw InvariantViolation("randomized mechanism: no text set clears the image");
    d.kind = AllocationKind::TextSet;
    d.text_count = j;
    d.probability = 1.0;
    d.price = std::max(p.text(k + 1), half / static_cast<double>(j));
    return d;
  }
  d.kind = AllocationKind::ImageLottery;
  d.probability = image_lottery_probability(top_image, phi, k);
  d.price = image_lottery_payment(top_image, p.image(2), phi, k);
  return d;
}

}  // namespace detail

/// psi = v_I1 / Phi. psi <= 2: the top j texts win (j the largest with
/// j * v_j >= v_I1 / 2) at max(v_{k+1}, v_I1 / (2j)). Otherwise the top image
/// wins with the lottery probability and pays its Myerson integral.
inline RandomizedOutcome randomized_text_image(const TextImageProfile& p) {
  RandomizedOutcome out;
  const auto d = detail::randomized_decision(p);
  out.kind = d.kind;
  out.probability = d.probability;
  if (d.kind == AllocationKind::TextSet) {
    out.text_set_size = d.text_count;
    for (std::size_t r = 1; r <= d.text_count; ++r) {
      const std::size_t agent = p.text_agent(r);
      if (agent == kPadding) continue;
      out.win_probability[agent] = 1.0;
      out.expected_payment[agent] = d.price;
    }
  } else if (d.kind == AllocationKind::ImageLottery) {
    const std::size_t agent = p.image_agent(1);
    out.win_probability[agent] = d.probability;
    out.expected_payment[agent] = d.price;
  }
  return out;
}

/// Expected revenue of randomized_text_image without building the outcome.
/// A positive text price implies k+1 real texts, so no padding is charged.
inline double randomized_revenue(const TextImageProfile& p) {
  const auto d = detail::randomized_decision(p);
  switch (d.kind) {
    case AllocationKind::TextSet: return static_cast<double>(d.text_count) * d.price;
    case AllocationKind::ImageLottery: return d.price;
    case AllocationKind::Unallocated: break;
  }
  return 0.0;
}

/// One draw of the randomized outcome.
struct LotteryRealization {
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  std::vector<std::size_t> winners;
  std::map<std::size_t, double> payments;

  double revenue() const {
    return std::accumulate(payments.begin(), payments.end(), 0.0,
                           [](double acc, const auto& kv) { return acc + kv.second; });
  }
};

/// Flips the lottery coin for draw `index` under `seed`. A served image pays
/// expected_payment / q, so payments match the outcome's expectations; an
/// unserved one pays nothing.
inline LotteryRealization realize_lottery(const RandomizedOutcome& outcome, std::uint64_t seed,
                                          std::uint64_t index = 0) {
  LotteryRealization r;
  r.seed = seed;
  r.index = index;
  switch (outcome.kind) {
    case AllocationKind::Unallocated:
      break;
    case AllocationKind::TextSet:
      r.winners = outcome.winners();
      r.payments = outcome.expected_payment;
      break;
    case AllocationKind::ImageLottery: {
      auto rng = substream(seed, "lottery", index);
      if (outcome.probability > 0.0 && uniform01(rng) < outcome.probability) {
        for (const auto& [agent, pay] : outcome.expected_payment) {
          r.winners.push_back(agent);
          r.payments[agent] = pay / outcome.probability;
        }
      }
      break;
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Numeric Myerson payments

inline constexpr double kMonotoneTolerance = 1e-9;

/// v * x(v) - int_lower^v x(u) du for a monotone allocation curve x, taken
/// as zero below `lower_support`. Monotonicity is checked on a 4097-point grid.
inline double myerson_payment_numeric(const std::function<double(double)>& curve, double value,
                                      double lower_support = 0.0) {
  if (!(value >= lower_support)) throw InvalidInput("myerson: value below lower support");
  if (value == lower_support) return value * curve(value);

  // Scan for monotonicity and pin down jumps. Quadrature then runs per scan
  // segment, so a jump sits on a break and a kink stays inside one short piece.
  constexpr int kSamples = 4096;
  constexpr double kJump = 1e-3;
  std::vector<double> breaks = {lower_support};
  double prev_u = lower_support;
  double prev = curve(lower_support);
  for (int i = 1; i <= kSamples; ++i) {
    const double u = i == kSamples ? value : lower_support + (value - lower_support) * i / kSamples;
    const double x = curve(u);
    if (x < prev - kMonotoneTolerance)
      throw MonotonicityViolation("myerson: allocation curve decreases near u = " +
                                  std::to_string(u));
    if (x - prev > kJump) {
      double lo = prev_u;
      double hi = u;
      for (int it = 0; it < 200 && lo < hi; ++it) {
        const double mid = lo + (hi - lo) / 2;
        if (mid <= lo || mid >= hi) break;
        (curve(mid) - prev > (x - prev) / 2 ? hi : lo) = mid;
      }
      if (hi > breaks.back() && hi < u) breaks.push_back(hi);
    }
    if (u > breaks.back()) breaks.push_back(u);
    prev_u = u;
    prev = std::max(prev, x);
  }

  double area = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    double error = 0.0;
    area += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(curve, breaks[i], breaks[i + 1], 4,
                                                                          1e-10, &error);
  }
  return value * curve(value) - area;
}

// ---------------------------------------------------------------------------
// Mechanism handles

struct AgentResult {
  double win_probability = 0.0;
  double expected_payment = 0.0;
};

/// Uniform view of a single-parameter mechanism over Text-and-Image profiles:
/// per-agent win probability and expected payment, indexed by agent id.
/// Deterministic mechanisms report 0/1 probabilities.
struct Mechanism {
  std::string name;
  bool deterministic = true;
  std::function<std::vector<AgentResult>(const TextImageProfile&)> evaluate;
  /// Optional fast path for total expected revenue.
  std::function<double(const TextImageProfile&)> revenue;
};

inline double expected_revenue(const Mechanism& m, const TextImageProfile& p) {
  if (m.revenue) return m.revenue(p);
  double total = 0.0;
  for (const auto& r : m.evaluate(p)) total += r.expected_payment;
  return total;
}

inline std::vector<AgentResult> to_agent_results(const TextImageProfile& p,
                                                 const DeterministicOutcome& o) {
  std::vector<AgentResult> out(p.agent_count());
  for (std::size_t w : o.winners) out[w] = {1.0, o.payment_of(w)};
  return out;
}

inline std::vector<AgentResult> to_agent_results(const TextImageProfile& p,
                                                 const RandomizedOutcome& o) {
  std::vector<AgentResult> out(p.agent_count());
  for (const auto& [agent, prob] : o.win_probability) out[agent].win_probability = prob;
  for (const auto& [agent, pay] : o.expected_payment) out[agent].expected_payment = pay;
  return out;
}

inline Mechanism deterministic_mechanism() {
  return {"det", true,
          [](const TextImageProfile& p) { return to_agent_results(p, deterministic_text_image(p)); },
          [](const TextImageProfile& p) { return deterministic_revenue(p); }};
}

inline Mechanism randomized_mechanism() {
  return {"rand", false,
          [](const TextImageProfile& p) { return to_agent_results(p, randomized_text_image(p)); },
          [](const TextImageProfile& p) { return randomized_revenue(p); }};
}

/// VCG on the Text-and-Image environment in closed form: the efficient side
/// wins (texts on ties), texts at max(v_{k+1}, v_I1 - S + v_i), the image at
/// max(S, v_I2), where S is the top-k text sum.
inline DeterministicOutcome vcg_text_image(const TextImageProfile& p) {
  DeterministicOutcome out;
  const std::size_t k = p.slots();
  const double text_sum = p.top_k_text_sum();
  if (text_sum >= p.image(1)) {
    for (std::size_t r = 1; r <= k; ++r) {
      const std::size_t agent = p.text_agent(r);
      if (agent == kPadding || p.text(r) == 0.0) continue;
      out.winners.push_back(agent);
      out.payments[agent] = std::max(p.text(k + 1), p.image(1) - text_sum + p.text(r));
    }
    std::sort(out.winners.begin(), out.winners.end());
  } else {
    const std::size_t agent = p.image_agent(1);
    out.winners = {agent};
    out.payments[agent] = std::max(text_sum, p.image(2));
  }
  return out;
}

inline Mechanism vcg_mechanism() {
  return {"vcg", true,
          [](const TextImageProfile& p) { return to_agent_results(p, vcg_text_image(p)); },
          [](const TextImageProfile& p) { return vcg_text_image(p).revenue(); }};
}

}  // namespace corebench
