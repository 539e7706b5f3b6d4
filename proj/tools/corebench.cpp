// corebench: run mechanisms, compute benchmarks, verify truthfulness and
// run the Monte-Carlo experiments from the command line.
//
// Exit status: 0 ok, 1 violation or invariant failure, 2 bad input,
// 3 enumeration cap exceeded.

#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "corebench.hpp"

namespace cb = corebench;
using cb::io::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitBadInput = 2;
constexpr int kExitTooLarge = 3;

constexpr std::size_t kMaxSweepK = std::size_t{1} << 24;

void emit(const std::optional<std::string>& path, const std::string& content) {
  if (path)
    cb::io::write_file(*path, content);
  else
    std::cout << content;
}

std::vector<std::size_t> parse_k_list(const std::string& raw) {
  std::vector<std::size_t> ks;
  std::size_t start = 0;
  while (start <= raw.size()) {
    const std::size_t end = std::min(raw.find(',', start), raw.size());
    const std::string tok = raw.substr(start, end - start);
    std::size_t pos = 0;
    unsigned long long k = 0;
    try {
      k = std::stoull(tok, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (tok.empty() || pos != tok.size() || tok[0] == '-')
      throw cb::InvalidInput("k: '" + tok + "' is not a positive integer");
    if (k == 0 || k > kMaxSweepK)
      throw cb::InvalidInput("k: " + tok + " outside [1, " + std::to_string(kMaxSweepK) + "]");
    ks.push_back(k);
    start = end + 1;
  }
  if (ks.empty()) throw cb::InvalidInput("k: list must not be empty");
  return ks;
}

struct RunArgs {
  std::string mechanism;
  std::string profile;
  std::uint64_t seed = 0;
  std::size_t realize = 0;
  std::optional<std::string> out;
};

int cmd_run(const RunArgs& a) {
  const cb::TextImageProfile p = cb::io::profile_from_json(cb::io::read_file(a.profile));
  json doc;
  if (a.mechanism == "rand") {
    const cb::RandomizedOutcome o = cb::randomized_text_image(p);
    doc = cb::io::to_json(o);
    if (a.realize > 0) {
      json draws = json::array();
      double sum = 0.0;
      double sum_sq = 0.0;
      for (std::size_t i = 0; i < a.realize; ++i) {
        const cb::LotteryRealization r = cb::realize_lottery(o, a.seed, i);
        for (const auto& [agent, pay] : r.payments) {
          if (pay > p.value_of(agent) + 1e-9)
            throw cb::InvariantViolation("realization " + std::to_string(i) +
                                         ": payment exceeds the winner's value");
        }
        const double rev = r.revenue();
        sum += rev;
        sum_sq += rev * rev;
        draws.push_back(cb::io::to_json(r));
      }
      const double n = static_cast<double>(a.realize);
      const double mean = sum / n;
      const double var = a.realize > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1)) : 0.0;
      doc["realizations"] = draws;
      doc["realizedMean"] = mean;
      doc["realizedStdError"] = std::sqrt(var / n);
    }
  } else if (a.mechanism == "det") {
    doc = cb::io::to_json(p, cb::deterministic_text_image(p));
  } else {
    doc = cb::io::to_json(p, cb::vcg_text_image(p));
  }
  doc["mechanism"] = a.mechanism;
  doc["seed"] = a.seed;
  emit(a.out, cb::io::dump(doc));
  return kExitOk;
}

struct BenchmarkArgs {
  std::optional<std::string> profile;
  std::optional<std::string> env;
  bool oracle = false;
  std::optional<std::size_t> cap;
  std::optional<std::string> out;
};

int cmd_benchmark(const BenchmarkArgs& a) {
  if (a.profile.has_value() == a.env.has_value())
    throw cb::InvalidInput("input: give exactly one of --profile and --env");
  const std::size_t cap = a.cap ? *a.cap : cb::enumeration_cap_from_env();
  if (cap < 1 || cap > cb::kMaxEnumerationCap)
    throw cb::InvalidInput("cap: must lie in [1, " + std::to_string(cb::kMaxEnumerationCap) + "]");
  cb::BenchmarkReport r;
  if (a.profile) {
    r = cb::benchmark_report(cb::io::profile_from_json(cb::io::read_file(*a.profile)), a.oracle, cap);
  } else {
    const cb::GenericEnvironment env = cb::io::environment_from_json(cb::io::read_file(*a.env));
    env.require_within(cap);
    r = cb::benchmark_report(env, cap);
  }
  emit(a.out, cb::io::dump(cb::io::to_json(r)));
  return kExitOk;
}

struct VerifyArgs {
  std::string mechanism;
  std::size_t trials = 200;
  std::uint64_t seed = 1;
  std::optional<std::string> out;
};

int cmd_verify(const VerifyArgs& a) {
  const cb::Mechanism m = cb::mechanism_by_name(a.mechanism);
  const cb::VerificationReport rep = cb::run_verification_suite(m, a.trials, a.seed);
  emit(a.out, cb::io::dump(cb::io::to_json(rep)));
  std::cerr << a.mechanism << ": " << a.trials << " profiles, " << rep.ic_violations.size()
            << " IC violations, " << rep.monotonicity_failures.size() << " monotonicity failures, "
            << rep.anonymity_failures.size() << " anonymity failures, "
            << rep.critical_value_mismatches.size() << " critical-value mismatches\n";
  return rep.clean() ? kExitOk : kExitViolation;
}

struct ExperimentArgs {
  std::string kind;
  std::string k_list;
  std::optional<std::size_t> samples;
  std::uint64_t seed = 0;
  std::string mechanism = "rand";
  std::string generator = "adversarial";
  std::string format = "csv";
  std::optional<std::string> out;
};

int cmd_experiment(const ExperimentArgs& a) {
  const std::vector<std::size_t> ks = parse_k_list(a.k_list);
  json config = {{"experiment", a.kind}, {"k", ks}, {"seed", a.seed}};
  json extra = json::array();
  std::vector<cb::SweepResult> rows;

  if (a.kind == "lower-bound") {
    const std::size_t samples = a.samples.value_or(10000);
    const cb::Mechanism m = cb::mechanism_by_name(a.mechanism);
    config["samples"] = samples;
    config["mechanism"] = a.mechanism;
    for (std::size_t k : ks) {
      const cb::LowerBoundConfig cfg{k, samples, a.seed};
      const cb::LowerBoundEstimate est = cb::lower_bound_estimate(cfg, m);
      rows.push_back(est.sweep);
      const cb::SampleStats& t = est.text_sum;
      extra.push_back({{"k", k},
                       {"imageSupport", cfg.image_support()},
                       {"meanTextSum", t.mean},
                       {"varTextSum", t.variance}});
    }
  } else if (a.kind == "ratio-sweep") {
    const std::size_t samples = a.samples.value_or(64);
    const cb::Mechanism m = cb::mechanism_by_name(a.mechanism);
    cb::ProfileGenerator gen;
    if (a.generator == "adversarial")
      gen = cb::adversarial_generator();
    else if (a.generator == "random")
      gen = cb::random_generator();
    else
      throw cb::InvalidInput("generator: expected adversarial or random");
    config["samples"] = samples;
    config["mechanism"] = a.mechanism;
    config["generator"] = a.generator;
    rows = cb::ratio_sweep(m, ks, gen, samples, a.seed);
  } else {
    const std::size_t samples = a.samples.value_or(10000);
    config["samples"] = samples;
    config["mechanism"] = "efficient-subset";
    for (std::size_t k : ks) {
      const cb::SubsetHardnessResult r = cb::efficient_subset_hardness(k, samples, a.seed);
      rows.push_back(r.sweep);
      extra.push_back({{"k", k},
                       {"imageValue", r.image_value},
                       {"imageEfficientFrequency", r.image_efficient_frequency},
                       {"coreToBaseline", r.core_to_baseline}});
    }
  }

  json results = json::array();
  for (const auto& r : rows) results.push_back(cb::io::to_json(r));
  json sidecar = {{"config", config}, {"results", results}};
  if (!extra.empty()) sidecar["details"] = extra;

  if (a.format == "json") {
    emit(a.out, cb::io::dump(sidecar));
  } else {
    emit(a.out, cb::io::to_csv(rows));
    if (a.out) cb::io::write_file(*a.out + ".json", cb::io::dump(sidecar));
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Core-competitive auctions for the Text-and-Image setting"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run a mechanism on a profile");
  run_cmd->add_option("--mechanism", run.mechanism, "det, rand or vcg")
      ->required()
      ->check(CLI::IsMember({"det", "rand", "vcg"}));
  run_cmd->add_option("--profile", run.profile, "Profile JSON")->required();
  run_cmd->add_option("--seed", run.seed, "Seed for lottery draws");
  run_cmd->add_option("--realize", run.realize, "Number of lottery realizations (rand only)");
  run_cmd->add_option("--out", run.out, "Output file (default stdout)");

  BenchmarkArgs bench;
  auto* bench_cmd = app.add_subcommand("benchmark", "CoreRev, VCG revenue and MV");
  bench_cmd->add_option("--profile", bench.profile, "Profile JSON");
  bench_cmd->add_option("--env", bench.env, "Generic environment JSON");
  bench_cmd->add_flag("--oracle", bench.oracle, "Use the LP oracle for profiles");
  bench_cmd->add_option("--cap", bench.cap, "Enumeration cap (default COREBENCH_CAP or 14)");
  bench_cmd->add_option("--out", bench.out, "Output file (default stdout)");

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "Property checks over random profiles");
  verify_cmd->add_option("--mechanism", verify.mechanism, "Mechanism name")->required();
  verify_cmd->add_option("--trials", verify.trials, "Number of random profiles");
  verify_cmd->add_option("--seed", verify.seed, "Seed");
  verify_cmd->add_option("--out", verify.out, "Report file (default stdout)");

  ExperimentArgs exp;
  auto* exp_cmd = app.add_subcommand("experiment", "Monte-Carlo experiments");
  exp_cmd->add_option("kind", exp.kind, "lower-bound, ratio-sweep or subset-hardness")
      ->required()
      ->check(CLI::IsMember({"lower-bound", "ratio-sweep", "subset-hardness"}));
  exp_cmd->add_option("--k", exp.k_list, "Comma-separated slot counts")->required();
  exp_cmd->add_option("--samples", exp.samples, "Draws (or grid points) per k");
  exp_cmd->add_option("--seed", exp.seed, "Seed");
  exp_cmd->add_option("--mechanism", exp.mechanism, "Mechanism name (default rand)");
  exp_cmd->add_option("--generator", exp.generator, "adversarial or random (ratio-sweep)");
  exp_cmd->add_option("--format", exp.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  exp_cmd->add_option("--out", exp.out, "Output file; CSV output gets a <out>.json sidecar");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitBadInput;
  }

  try {
    if (*run_cmd) return cmd_run(run);
    if (*bench_cmd) return cmd_benchmark(bench);
    if (*verify_cmd) return cmd_verify(verify);
    if (*exp_cmd) return cmd_experiment(exp);
  } catch (const cb::InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitBadInput;
  } catch (const cb::InstanceTooLarge& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitTooLarge;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitViolation;
  }
  return kExitBadInput;
}
