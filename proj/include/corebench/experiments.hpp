#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "corebench/benchmarks.hpp"
#include "corebench/errors.hpp"
#include "corebench/mechanisms.hpp"
#include "corebench/profile.hpp"
#include "corebench/random.hpp"
#include "corebench/verification.hpp"

namespace corebench {

/// Hard instance family: k texts i.i.d. uniform on {1, 1/2, ..., 1/k}, one
/// image uniform on {H/1, H/2, ..., H/H} with H = ceil(H_k).
struct LowerBoundConfig {
  std::size_t k = 16;
  std::size_t samples = 10000;
  std::uint64_t seed = 0;

  std::size_t image_support() const {
    if (k == 1) return 1;
    return static_cast<std::size_t>(std::ceil(harmonic(k)));
  }
  void validate() const {
    if (k == 0) throw InvalidInput("k: must be at least 1");
    if (samples == 0) throw InvalidInput("samples: must be at least 1");
  }
};

struct SweepResult {
  std::size_t k = 0;
  std::size_t samples = 0;
  double mean_core_rev = 0.0;
  double se_core_rev = 0.0;
  double mean_revenue = 0.0;
  double se_revenue = 0.0;
  double worst_ratio = 1.0;
  double mean_ratio = 1.0;
};

struct SampleStats {
  double mean = 0.0;
  double variance = 0.0;  // unbiased sample variance
  double std_error = 0.0;
  std::size_t count = 0;
};

/// Welford accumulation in index order, so results are bit-reproducible.
inline SampleStats summarize(const std::vector<double>& xs) {
  SampleStats s;
  double m2 = 0.0;
  for (double x : xs) {
    ++s.count;
    const double delta = x - s.mean;
    s.mean += delta / static_cast<double>(s.count);
    m2 += delta * (x - s.mean);
  }
  if (s.count > 1) s.variance = m2 / static_cast<double>(s.count - 1);
  s.std_error = s.count > 0 ? std::sqrt(s.variance / static_cast<double>(s.count)) : 0.0;
  return s;
}

namespace detail {

// k i.i.d. draws from {1, 1/2, ..., 1/k}, returned in descending order.
inline std::vector<double> draw_harmonic_texts(std::mt19937_64& rng, std::size_t k) {
  std::vector<std::uint32_t> counts(k + 1, 0);
  for (std::size_t i = 0; i < k; ++i) ++counts[uniform_int(rng, 1, k)];
  std::vector<double> text;
  text.reserve(k);
  for (std::size_t j = 1; j <= k; ++j)
    text.insert(text.end(), counts[j], 1.0 / static_cast<double>(j));
  return text;
}

}  // namespace detail

/// Draw `draw_index` of the hard distribution; depends only on (seed, draw_index).
/// Texts come back in canonical (descending) order.
inline TextImageProfile sample_lower_bound_profile(const LowerBoundConfig& config,
                                                   std::uint64_t draw_index) {
  config.validate();
  auto rng = substream(config.seed, "lower-bound", draw_index);
  std::vector<double> text = detail::draw_harmonic_texts(rng, config.k);
  const std::size_t h = config.image_support();
  const double image = static_cast<double>(h) / static_cast<double>(uniform_int(rng, 1, h));
  return TextImageProfile::create(config.k, std::move(text), {image});
}

/// One pass over the hard distribution: the sweep row plus moments of the
/// top-k text sum.
struct LowerBoundEstimate {
  SweepResult sweep;
  SampleStats text_sum;
};

/// CoreRev and (optionally) mechanism revenue over the hard distribution.
/// Without a mechanism the revenue fields stay 0 and the ratios 1.
inline LowerBoundEstimate lower_bound_estimate(const LowerBoundConfig& config,
                                               const std::optional<Mechanism>& mechanism = std::nullopt) {
  config.validate();
  std::vector<double> core(config.samples), sums(config.samples), revenue, ratio;
  if (mechanism) {
    revenue.resize(config.samples);
    ratio.resize(config.samples);
  }
  for (std::size_t d = 0; d < config.samples; ++d) {
    const TextImageProfile p = sample_lower_bound_profile(config, d);
    core[d] = core_revenue_text_image(p);
    sums[d] = p.top_k_text_sum();
    if (mechanism) {
      revenue[d] = expected_revenue(*mechanism, p);
      ratio[d] = revenue_ratio(core[d], revenue[d]);
    }
  }
  LowerBoundEstimate est;
  SweepResult& r = est.sweep;
  r.k = config.k;
  r.samples = config.samples;
  const SampleStats c = summarize(core);
  r.mean_core_rev = c.mean;
  r.se_core_rev = c.std_error;
  if (mechanism) {
    const SampleStats v = summarize(revenue);
    r.mean_revenue = v.mean;
    r.se_revenue = v.std_error;
    r.worst_ratio = *std::max_element(ratio.begin(), ratio.end());
    r.mean_ratio = revenue_ratio(r.mean_core_rev, r.mean_revenue);
  }
  est.text_sum = summarize(sums);
  return est;
}

inline SweepResult lower_bound_sweep(const LowerBoundConfig& config,
                                     const std::optional<Mechanism>& mechanism = std::nullopt) {
  return lower_bound_estimate(config, mechanism).sweep;
}

inline SweepResult estimate_expected_core_rev(const LowerBoundConfig& config) {
  return lower_bound_sweep(config);
}

inline SweepResult estimate_mechanism_revenue(const Mechanism& m, const LowerBoundConfig& config) {
  return lower_bound_sweep(config, m);
}

/// Moments of the top-k text sum under the hard distribution.
inline SampleStats text_sum_moments(const LowerBoundConfig& config) {
  return lower_bound_estimate(config).text_sum;
}

// ---------------------------------------------------------------------------
// Efficient-subset hardness

/// Serves agent i iff i is in the efficient (VCG) allocation and bids at
/// least `reserve`, at price max(reserve, VCG price). It only ever serves a
/// subset of the VCG winners.
inline Mechanism efficient_subset_mechanism(double reserve = 1.0) {
  auto run = [reserve](const TextImageProfile& p) {
    DeterministicOutcome vcg = vcg_text_image(p);
    DeterministicOutcome out;
    for (std::size_t w : vcg.winners) {
      if (p.value_of(w) < reserve) continue;
      out.winners.push_back(w);
      out.payments[w] = std::max(reserve, vcg.payment_of(w));
    }
    return out;
  };
  // Same revenue, walking only the texts that clear the reserve.
  auto revenue = [reserve](const TextImageProfile& p) {
    const std::size_t k = p.slots();
    const double text_sum = p.top_k_text_sum();
    if (text_sum < p.image(1)) {
      return p.image(1) >= reserve ? std::max(reserve, std::max(text_sum, p.image(2))) : 0.0;
    }
    double total = 0.0;
    for (std::size_t r = 1; r <= k && p.text(r) >= reserve && p.text(r) > 0.0; ++r)
      total += std::max(reserve, std::max(p.text(k + 1), p.image(1) - text_sum + p.text(r)));
    return total;
  };
  return {"efficient-subset", true,
          [run](const TextImageProfile& p) { return to_agent_results(p, run(p)); }, revenue};
}

struct SubsetHardnessResult {
  SweepResult sweep;  // revenue fields refer to the efficient-subset baseline
  double image_value = 0.0;
  double image_efficient_frequency = 0.0;
  double core_to_baseline = 1.0;  // mean CoreRev / mean baseline revenue
};

/// Texts from the hard distribution, one image fixed at H_k / 2.
inline SubsetHardnessResult efficient_subset_hardness(std::size_t k, std::size_t samples,
                                                      std::uint64_t seed, double reserve = 1.0) {
  if (k < 16) throw InvalidInput("k: subset-hardness construction needs k >= 16");
  if (samples == 0) throw InvalidInput("samples: must be at least 1");
  const double image = harmonic(k) / 2.0;
  const Mechanism baseline = efficient_subset_mechanism(reserve);

  std::vector<double> core(samples), revenue(samples), ratio(samples);
  std::size_t image_efficient = 0;
  for (std::size_t d = 0; d < samples; ++d) {
    auto rng = substream(seed, "subset-hardness", d);
    const TextImageProfile p =
        TextImageProfile::create(k, detail::draw_harmonic_texts(rng, k), {image});
    if (p.top_k_text_sum() < image) ++image_efficient;
    core[d] = core_revenue_text_image(p);
    revenue[d] = expected_revenue(baseline, p);
    ratio[d] = revenue_ratio(core[d], revenue[d]);
  }

  SubsetHardnessResult r;
  r.image_value = image;
  r.image_efficient_frequency = static_cast<double>(image_efficient) / static_cast<double>(samples);
  const SampleStats c = summarize(core);
  const SampleStats v = summarize(revenue);
  r.sweep = {k, samples, c.mean, c.std_error, v.mean, v.std_error,
             *std::max_element(ratio.begin(), ratio.end()), revenue_ratio(c.mean, v.mean)};
  r.core_to_baseline = r.sweep.mean_ratio;
  return r;
}

// ---------------------------------------------------------------------------
// Ratio sweeps

using ProfileGenerator =
    std::function<std::vector<TextImageProfile>(std::size_t k, std::size_t samples, std::uint64_t seed)>;

/// Deterministic worst-case grid. Text families: harmonic 1/i (with and
/// without a (k+1)-th text), harmonic truncated at k/4, flat, geometric.
/// Top image at Phi times every branch boundary (s(k), 2, ln k, max(2, ln k),
/// H_k, text sum / Phi), each nudged by a relative 1e-9 either way, plus a
/// geometric grid of `samples` ratios. Runner-up image at 0, half, or 0.999 of the top.
inline ProfileGenerator adversarial_generator() {
  return [](std::size_t k, std::size_t samples, std::uint64_t) {
    std::vector<std::vector<double>> families;
    auto harmonic_texts = [](std::size_t n) {
      std::vector<double> t(n);
      for (std::size_t i = 0; i < n; ++i) t[i] = 1.0 / static_cast<double>(i + 1);
      return t;
    };
    families.push_back(harmonic_texts(k));
    families.push_back(harmonic_texts(k + 1));
    families.push_back(harmonic_texts(std::max<std::size_t>(1, k / 4)));
    families.emplace_back(k + 1, 1.0);
    {
      std::vector<double> geo(std::min<std::size_t>(k, 60));
      for (std::size_t i = 0; i < geo.size(); ++i) geo[i] = std::ldexp(1.0, -static_cast<int>(i));
      families.push_back(geo);
    }

    std::vector<double> anchors = {text_weight(k), 2.0, std::log(static_cast<double>(k)),
                                   lottery_saturation(k), harmonic(k)};
    const std::size_t grid = std::max<std::size_t>(samples, 2);
    const double lo = 0.05;
    const double hi = 4.0 * std::max(harmonic(k), lottery_saturation(k));

    std::vector<TextImageProfile> out;
    for (const auto& text : families) {
      const TextImageProfile base = TextImageProfile::create(k, text, {0.0});
      const double phi = phi_text(base);
      std::vector<double> ratios;
      for (double a : anchors) ratios.insert(ratios.end(), {a * (1 - 1e-9), a, a * (1 + 1e-9)});
      const double sum_ratio = base.top_k_text_sum() / phi;
      ratios.insert(ratios.end(), {sum_ratio * (1 - 1e-9), sum_ratio, sum_ratio * (1 + 1e-9)});
      for (std::size_t i = 0; i < grid; ++i)
        ratios.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(grid - 1)));
      for (double r : ratios) {
        const double top = r * phi;
        for (double second : {0.0, 0.5 * top, 0.999 * top})
          out.push_back(TextImageProfile::create(k, text, {top, second}));
      }
    }
    return out;
  };
}

/// `samples` random profiles per k (see random_test_profile) with k slots.
inline ProfileGenerator random_generator() {
  return [](std::size_t k, std::size_t samples, std::uint64_t seed) {
    std::vector<TextImageProfile> out;
    out.reserve(samples);
    for (std::size_t d = 0; d < samples; ++d) {
      auto rng = substream(seed, "ratio-sweep-random", d * 1000003ULL + k);
      const TextImageProfile q = random_test_profile(rng, 1);
      std::vector<double> text(q.text_values().begin(), q.text_values().end());
      const std::size_t extra = uniform_int(rng, 0, k + 1);
      for (std::size_t i = 0; i < extra; ++i) text.push_back(uniform01(rng) / static_cast<double>(i + 1));
      out.push_back(TextImageProfile::create(
          k, std::move(text), {q.image_values().begin(), q.image_values().end()}));
    }
    return out;
  };
}

/// Worst and mean CoreRev / revenue per k. A k whose generator yields no
/// profiles contributes no row.
inline std::vector<SweepResult> ratio_sweep(const Mechanism& m, const std::vector<std::size_t>& k_list,
                                            const ProfileGenerator& generator, std::size_t samples,
                                            std::uint64_t seed) {
  if (k_list.empty()) throw InvalidInput("k: list must not be empty");
  std::vector<SweepResult> results;
  for (std::size_t k : k_list) {
    if (k == 0) throw InvalidInput("k: must be at least 1");
    const auto profiles = generator(k, samples, seed);
    if (profiles.empty()) continue;
    std::vector<double> core, revenue, ratio;
    for (std::size_t i = 0; i < profiles.size(); ++i) {
      const RatioRecord rec = competitive_ratio(m, profiles[i], i);
      core.push_back(rec.core_rev);
      revenue.push_back(rec.mechanism_revenue);
      ratio.push_back(rec.ratio);
    }
    const SampleStats c = summarize(core);
    const SampleStats v = summarize(revenue);
    const SampleStats q = summarize(ratio);
    results.push_back({k, profiles.size(), c.mean, c.std_error, v.mean, v.std_error,
                       *std::max_element(ratio.begin(), ratio.end()), q.mean});
  }
  return results;
}

}  // namespace corebench
