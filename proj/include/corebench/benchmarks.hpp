#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "corebench/environment.hpp"
#include "corebench/errors.hpp"
#include "corebench/exact_lp.hpp"
#include "corebench/profile.hpp"

namespace corebench {

/// Best uniform-price revenue from text ads: max over j in 1..k of j * v_j.
inline double phi_text(const TextImageProfile& p) {
  double best = 0.0;
  for (std::size_t j = 1; j <= p.slots(); ++j)
    best = std::max(best, static_cast<double>(j) * p.text(j));
  return best;
}

inline double harmonic(std::size_t k) {
  if (k == 0) throw InvalidInput("harmonic: k must be at least 1");
  double sum = 0.0;
  // Smallest terms first.
  for (std::size_t j = k; j >= 1; --j) sum += 1.0 / static_cast<double>(j);
  return sum;
}

/// Minimum core revenue of a Text-and-Image profile in closed form.
/// Ties between the top-k text sum and the top image go to the text branch.
inline double core_revenue_text_image(const TextImageProfile& p) {
  const std::size_t k = p.slots();
  const double text_sum = p.top_k_text_sum();
  if (text_sum >= p.image(1))
    return std::max(static_cast<double>(k) * p.text(k + 1), p.image(1));
  return std::max(p.image(2), text_sum);
}

/// Explicit encoding: texts keep their ids, images follow. F is every text set
/// of size at most k plus every single image.
inline GenericEnvironment text_image_to_generic(const TextImageProfile& p,
                                                std::size_t cap = kDefaultEnumerationCap) {
  const std::size_t n = p.agent_count();
  if (n > cap) throw InstanceTooLarge(n, cap);
  std::vector<double> values(p.text_values().begin(), p.text_values().end());
  values.insert(values.end(), p.image_values().begin(), p.image_values().end());
  std::vector<Coalition> feasible;
  const std::size_t nt = p.text_count();
  for (Coalition c = 0; c < (Coalition{1} << nt); ++c)
    if (static_cast<std::size_t>(std::popcount(c)) <= p.slots()) feasible.push_back(c);
  for (std::size_t i = 0; i < p.image_count(); ++i) feasible.push_back(Coalition{1} << (nt + i));
  return GenericEnvironment(std::move(values), std::move(feasible));
}

/// Coalition values w(S) = max over feasible X inside S of v(X), for every S,
/// in exact arithmetic, together with the efficient set used for tie-breaking.
class CoalitionTable {
 public:
  CoalitionTable(const GenericEnvironment& env, std::size_t cap) : n_(env.size()) {
    env.require_within(cap);
    exact_values_.reserve(n_);
    for (double v : env.values()) exact_values_.emplace_back(v);

    const std::size_t count = std::size_t{1} << n_;
    best_.assign(count, Rational(-1));
    for (Coalition c : env.feasible()) best_[c] = sum(c);
    for (std::size_t bit = 0; bit < n_; ++bit) {
      const Coalition b = Coalition{1} << bit;
      for (Coalition s = 0; s < count; ++s)
        if ((s & b) && best_[s ^ b] > best_[s]) best_[s] = best_[s ^ b];
    }
    // F is sorted lexicographically, so the first maximizer is the smallest one.
    const Rational& top = best_[env.full()];
    for (Coalition c : env.feasible()) {
      if (sum(c) == top) {
        efficient_ = c;
        break;
      }
    }
  }

  std::size_t size() const noexcept { return n_; }
  Coalition full() const noexcept { return static_cast<Coalition>((std::size_t{1} << n_) - 1); }
  const Rational& w(Coalition s) const { return best_[s]; }
  const Rational& welfare() const { return best_[full()]; }
  Coalition efficient_set() const noexcept { return efficient_; }
  const Rational& value(std::size_t agent) const { return exact_values_[agent]; }

  Rational sum(Coalition c) const {
    Rational s(0);
    for (std::size_t a : members(c)) s += exact_values_[a];
    return s;
  }

 private:
  std::size_t n_;
  std::vector<Rational> exact_values_;
  std::vector<Rational> best_;
  Coalition efficient_ = 0;
};

/// Minimum-revenue point of the core.
struct CoreSolution {
  Rational exact_revenue;
  double revenue = 0.0;
  Coalition efficient_set = 0;
  /// Imputation indexed 0..n: entry 0 is the auctioneer, entry i+1 is agent i.
  std::vector<double> utilities;
  /// Core outcome realizing the imputation: the efficient set, p_i = v_i - u_i.
  DeterministicOutcome outcome;
  std::size_t rows_generated = 0;
};

/// Exact CoreRev of a generic environment.
///
/// With u_0 eliminated through sum(u) = w(N), the core conditions become
/// u(T) <= w(N) - w(N \ T) for agent sets T, and CoreRev = w(N) - max sum(u).
/// Agents outside the efficient set X* get u_i <= 0 from T = {i}, so only X*
/// carries variables and only T inside X* carries binding rows. Rows are added
/// lazily: solve, scan all 2^|X*| rows for the most violated one, repeat.
inline CoreSolution solve_core(const GenericEnvironment& env,
                               std::size_t cap = kDefaultEnumerationCap) {
  const CoalitionTable table(env, cap);
  const Coalition full = table.full();
  const Coalition xstar = table.efficient_set();
  const std::vector<std::size_t> winners = members(xstar);
  const std::size_t m = winners.size();

  CoreSolution out;
  out.efficient_set = xstar;
  out.utilities.assign(env.size() + 1, 0.0);
  out.outcome.winners = winners;

  std::vector<Rational> u(m, Rational(0));
  if (m > 0) {
    const std::size_t subsets = std::size_t{1} << m;
    auto global = [&](std::size_t local) {
      Coalition c = 0;
      for (std::size_t i = 0; i < m; ++i)
        if (local & (std::size_t{1} << i)) c |= Coalition{1} << winners[i];
      return c;
    };
    std::vector<Rational> bound(subsets);
    for (std::size_t t = 1; t < subsets; ++t) {
      bound[t] = table.welfare() - table.w(full & ~global(t));
      // The origin (u_0 = w(N)) is always a core point; a negative bound would contradict it.
      if (bound[t] < 0) throw InvariantViolation("core LP: origin infeasible, core would be empty");
    }

    PackingSimplex<Rational> lp(m);
    lp.set_objective(std::vector<Rational>(m, Rational(1)));
    auto add = [&](std::size_t t) {
      std::vector<Rational> row(m, Rational(0));
      for (std::size_t i = 0; i < m; ++i)
        if (t & (std::size_t{1} << i)) row[i] = 1;
      lp.add_row(std::move(row), bound[t]);
    };
    for (std::size_t i = 0; i < m; ++i) add(std::size_t{1} << i);
    if (m > 1) add(subsets - 1);

    std::vector<Rational> partial(subsets);
    for (;;) {
      auto sol = lp.solve();
      if (!sol) throw InvariantViolation("core LP: relaxation unbounded");
      u = std::move(sol->x);
      partial[0] = 0;
      std::size_t worst = 0;
      Rational worst_gap(0);
      for (std::size_t t = 1; t < subsets; ++t) {
        const std::size_t low = static_cast<std::size_t>(std::countr_zero(t));
        partial[t] = partial[t & (t - 1)] + u[low];
        Rational gap = partial[t] - bound[t];
        if (gap > worst_gap) {
          worst_gap = std::move(gap);
          worst = t;
        }
      }
      if (worst == 0) break;
      add(worst);
    }
    out.rows_generated = lp.row_count();
  }

  Rational total(0);
  for (const auto& x : u) total += x;
  out.exact_revenue = table.welfare() - total;
  out.revenue = out.exact_revenue.get_d();
  out.utilities[0] = out.revenue;
  for (std::size_t i = 0; i < m; ++i) {
    out.utilities[winners[i] + 1] = u[i].get_d();
    out.outcome.payments[winners[i]] = Rational(table.value(winners[i]) - u[i]).get_d();
  }
  return out;
}

inline double core_revenue_generic(const GenericEnvironment& env,
                                   std::size_t cap = kDefaultEnumerationCap) {
  return solve_core(env, cap).revenue;
}

/// VCG: the lexicographically smallest welfare maximizer, each winner charged
/// w(N \ i) - w(N) + v_i.
inline DeterministicOutcome vcg(const GenericEnvironment& env,
                                std::size_t cap = kDefaultEnumerationCap) {
  const CoalitionTable table(env, cap);
  DeterministicOutcome out;
  out.winners = members(table.efficient_set());
  for (std::size_t i : out.winners) {
    const Rational price =
        table.w(table.full() & ~(Coalition{1} << i)) - table.welfare() + table.value(i);
    out.payments[i] = price.get_d();
  }
  return out;
}

/// Agent with the largest value, lowest id on ties.
inline std::size_t top_agent(const GenericEnvironment& env) {
  const auto& v = env.values();
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

/// Micali-Valiant benchmark: best welfare with the top agent excluded.
inline double mv_benchmark(const GenericEnvironment& env,
                           std::size_t cap = kDefaultEnumerationCap) {
  const CoalitionTable table(env, cap);
  return table.w(table.full() & ~(Coalition{1} << top_agent(env))).get_d();
}

/// A coalition that can profitably block an outcome.
///
/// With `with_auctioneer`, the agents of `members` outbid the winners they
/// would evict and `margin` is v(S \ X) - p(X \ S). Without it, `members` is a
/// single agent paying above its value and `margin` is p_i - v_i.
struct BlockingCoalition {
  std::vector<std::size_t> members;
  bool with_auctioneer = true;
  double margin = 0.0;
};

struct CoreCheckResult {
  bool is_core = true;
  std::optional<BlockingCoalition> blocking;
};

inline constexpr double kCoreTolerance = 1e-9;

/// Checks p_i <= v_i for every agent and v(S \ X) <= p(X \ S) for every S in F.
/// Reports the worst violation found.
inline CoreCheckResult is_core_outcome(const GenericEnvironment& env,
                                       const DeterministicOutcome& outcome,
                                       std::size_t cap = kDefaultEnumerationCap) {
  env.require_within(cap);
  for (std::size_t w : outcome.winners)
    if (w >= env.size()) throw InvalidInput("outcome: winner id out of range");
  for (const auto& [agent, pay] : outcome.payments) {
    if (agent >= env.size()) throw InvalidInput("outcome: payment for unknown agent");
    if (!outcome.wins(agent) && pay != 0.0)
      throw InvalidInput("outcome: payment charged to a non-winner");
  }
  const Coalition x = outcome.coalition();
  if (!env.is_feasible(x)) throw InvalidInput("outcome: winner set is not feasible");

  CoreCheckResult result;
  double worst_ir = kCoreTolerance;
  for (std::size_t i : outcome.winners) {
    const double excess = outcome.payment_of(i) - env.values()[i];
    if (excess > worst_ir) {
      worst_ir = excess;
      result.blocking = BlockingCoalition{{i}, false, excess};
    }
  }
  if (result.blocking) {
    result.is_core = false;
    return result;
  }

  auto paid = [&](Coalition c) {
    double s = 0.0;
    for (std::size_t a : members(c)) s += outcome.payment_of(a);
    return s;
  };
  double worst = kCoreTolerance;
  for (Coalition s : env.feasible()) {
    const double margin = env.value_of(s & ~x) - paid(x & ~s);
    if (margin > worst) {
      worst = margin;
      result.blocking = BlockingCoalition{members(s), true, margin};
    }
  }
  result.is_core = !result.blocking.has_value();
  return result;
}

/// CoreRev, VCG revenue and MV for one instance.
struct BenchmarkReport {
  double core_rev = 0.0;
  double vcg_rev = 0.0;
  double mv_rev = 0.0;
  std::map<std::string, std::string> notes;  // benchmark -> how it was computed
};

/// Throws InvariantViolation unless mv >= core >= vcg and core >= 0.
inline void check_benchmark_chain(const BenchmarkReport& r, double tol = 1e-9) {
  if (r.core_rev < -tol) throw InvariantViolation("benchmark chain: CoreRev is negative");
  if (r.mv_rev < r.core_rev - tol) throw InvariantViolation("benchmark chain: MV < CoreRev");
  if (r.core_rev < r.vcg_rev - tol) throw InvariantViolation("benchmark chain: CoreRev < VcgRev");
}

inline BenchmarkReport benchmark_report(const GenericEnvironment& env,
                                        std::size_t cap = kDefaultEnumerationCap) {
  BenchmarkReport r;
  r.core_rev = core_revenue_generic(env, cap);
  r.vcg_rev = vcg(env, cap).revenue();
  r.mv_rev = mv_benchmark(env, cap);
  r.notes = {{"coreRev", "lp-oracle"}, {"vcgRev", "enumeration"}, {"mvRev", "enumeration"}};
  check_benchmark_chain(r);
  return r;
}

/// VCG revenue of a Text-and-Image profile in closed form.
inline double vcg_revenue_text_image(const TextImageProfile& p) {
  const std::size_t k = p.slots();
  const double text_sum = p.top_k_text_sum();
  if (text_sum >= p.image(1)) {
    double total = 0.0;
    for (std::size_t j = 1; j <= k; ++j)
      total += std::max(p.text(k + 1), p.image(1) - text_sum + p.text(j));
    return total;
  }
  return std::max(text_sum, p.image(2));
}

/// MV of a Text-and-Image profile in closed form. The top agent is the
/// highest value overall; texts precede images on ties.
inline double mv_text_image(const TextImageProfile& p) {
  const std::size_t k = p.slots();
  const double text_sum = p.top_k_text_sum();
  const bool top_is_text = p.text_count() > 0 && p.text(1) >= p.image(1);
  if (top_is_text) return std::max(text_sum - p.text(1) + p.text(k + 1), p.image(1));
  return std::max(text_sum, p.image(2));
}

/// Closed forms for a Text-and-Image profile; `use_oracle` routes through the
/// explicit environment instead.
inline BenchmarkReport benchmark_report(const TextImageProfile& p, bool use_oracle = false,
                                        std::size_t cap = kDefaultEnumerationCap) {
  if (use_oracle) return benchmark_report(text_image_to_generic(p, cap), cap);
  BenchmarkReport r;
  r.core_rev = core_revenue_text_image(p);
  r.vcg_rev = vcg_revenue_text_image(p);
  r.mv_rev = mv_text_image(p);
  r.notes = {{"coreRev", "closed-form"}, {"vcgRev", "closed-form"}, {"mvRev", "closed-form"}};
  check_benchmark_chain(r);
  return r;
}

}  // namespace corebench
