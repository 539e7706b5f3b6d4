#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "corebench.hpp"

using namespace corebench;
using io::json;

namespace {

json reparse(const json& j) { return io::parse(io::dump(j)); }

}  // namespace

TEST(Io, ProfileRoundTrip) {
  for (int t = 0; t < 100; ++t) {
    auto r = substream(51, "io", t);
    const auto p = random_test_profile(r);
    const auto q = io::profile_from_json(reparse(io::to_json(p)));
    EXPECT_EQ(q.slots(), p.slots());
    ASSERT_EQ(q.agent_count(), p.agent_count());
    for (std::size_t a = 0; a < p.agent_count(); ++a) EXPECT_EQ(q.value_of(a), p.value_of(a));
  }
}

TEST(Io, ProfileErrorsNameTheField) {
  auto message = [](const std::string& text) {
    try {
      io::profile_from_json(io::parse(text));
    } catch (const InvalidInput& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_EQ(message(R"({"text": [1]})").rfind("k:", 0), 0u);
  EXPECT_EQ(message(R"({"k": 0, "text": [1]})").rfind("k:", 0), 0u);
  EXPECT_EQ(message(R"({"k": 2.5, "text": [1]})").rfind("k:", 0), 0u);
  EXPECT_EQ(message(R"({"k": 2, "text": [1, "x"]})").rfind("text[1]", 0), 0u);
  EXPECT_EQ(message(R"({"k": 2, "image": [-1]})").rfind("image[0]", 0), 0u);
  EXPECT_EQ(message(R"({"k": 2, "text": [], "image": []})").rfind("text/image", 0), 0u);
  EXPECT_EQ(message("{not json").rfind("document", 0), 0u);
}

TEST(Io, EnvironmentRoundTrip) {
  const auto env = GenericEnvironment::from_lists({1, 2.5, 3}, {{0}, {1, 2}, {2}});
  const auto back = io::environment_from_json(reparse(io::to_json(env)));
  EXPECT_EQ(back.values(), env.values());
  EXPECT_EQ(back.feasible(), env.feasible());
  EXPECT_THROW(io::environment_from_json(io::parse(R"({"values": [1], "feasible": [[1]]})")),
               InvalidInput);
  EXPECT_THROW(io::environment_from_json(io::parse(R"({"values": [1], "feasible": [[-1]]})")),
               InvalidInput);
  EXPECT_THROW(io::environment_from_json(io::parse(R"({"values": [1]})")), InvalidInput);
}

TEST(Io, DeterministicOutcomeRoundTrip) {
  const auto p = TextImageProfile::create(4, {1, 0.5, 1.0 / 3, 0.25}, {1.0});
  const auto o = deterministic_text_image(p);
  const json j = io::to_json(p, o);
  EXPECT_EQ(j["kind"], "text");
  const auto back = io::deterministic_outcome_from_json(reparse(j));
  EXPECT_EQ(back.winners, o.winners);
  EXPECT_EQ(back.payments, o.payments);
  const auto img = TextImageProfile::create(2, {1, 1}, {2.5});
  EXPECT_EQ(io::to_json(img, deterministic_text_image(img))["kind"], "image");
  EXPECT_EQ(io::to_json(img, DeterministicOutcome{})["kind"], "none");
}

TEST(Io, RandomizedOutcomeRoundTrip) {
  std::vector<double> text(16);
  for (std::size_t i = 0; i < 16; ++i) text[i] = 1.0 / (i + 1);
  for (double image : {1.5, 2.5, 9.0}) {
    const auto o = randomized_text_image(TextImageProfile::create(16, text, {image}));
    const auto back = io::randomized_outcome_from_json(reparse(io::to_json(o)));
    EXPECT_EQ(back.kind, o.kind);
    EXPECT_EQ(back.probability, o.probability);
    EXPECT_EQ(back.win_probability, o.win_probability);
    EXPECT_EQ(back.expected_payment, o.expected_payment);
    EXPECT_EQ(back.text_set_size, o.text_set_size);
    const auto r = realize_lottery(o, 3, 1);
    const auto rb = io::realization_from_json(reparse(io::to_json(r)));
    EXPECT_EQ(rb.seed, r.seed);
    EXPECT_EQ(rb.index, r.index);
    EXPECT_EQ(rb.winners, r.winners);
    EXPECT_EQ(rb.payments, r.payments);
  }
  EXPECT_THROW(io::randomized_outcome_from_json(io::parse(R"({"kind": "both"})")), InvalidInput);
}

TEST(Io, BenchmarkReportRoundTrip) {
  const auto r = benchmark_report(TextImageProfile::create(4, {1, 0.5, 0.3, 0.2}, {1.7, 0.4}));
  const json j = io::to_json(r);
  EXPECT_TRUE(j.contains("coreRev"));
  EXPECT_TRUE(j.contains("vcgRev"));
  EXPECT_TRUE(j.contains("mvRev"));
  const auto back = io::benchmark_report_from_json(reparse(j));
  EXPECT_EQ(back.core_rev, r.core_rev);
  EXPECT_EQ(back.vcg_rev, r.vcg_rev);
  EXPECT_EQ(back.mv_rev, r.mv_rev);
  EXPECT_EQ(back.notes, r.notes);
}

TEST(Io, VerificationRecordsRoundTrip) {
  const ICViolation v{2, 1.25, 0.1, 0.3333333333333333};
  const auto vb = io::ic_violation_from_json(reparse(io::to_json(v)));
  EXPECT_EQ(vb.agent, v.agent);
  EXPECT_EQ(vb.utility_gain, v.utility_gain);

  for (double ratio : {1.5, std::numeric_limits<double>::infinity()}) {
    const RatioRecord r{7, 16, 2.0, 1.0 / 3, ratio};
    const auto rb = io::ratio_record_from_json(reparse(io::to_json(r)));
    EXPECT_EQ(rb.profile_id, 7u);
    EXPECT_EQ(rb.mechanism_revenue, r.mechanism_revenue);
    EXPECT_EQ(rb.ratio, r.ratio);
  }

  const auto rep = run_verification_suite(controls::first_price(), 3, 1);
  const json j = reparse(io::to_json(rep));
  EXPECT_EQ(j["clean"], false);
  EXPECT_EQ(j["icViolations"].size(), rep.ic_violations.size());
  EXPECT_EQ(j["icViolations"][0]["trial"], rep.ic_violations[0].first);
}

TEST(Io, SweepRoundTrips) {
  std::vector<SweepResult> rows = {
      {16, 100, 1.0 / 3, 0.01, 0.7, 0.02, 2.0000000000000009, 1.1},
      {64, 100, 2.5, 0.0, 0.0, 0.0, std::numeric_limits<double>::infinity(), 1.0}};
  const auto csv = io::to_csv(rows);
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "k,samples,mean_corerev,se_corerev,mean_revenue,se_revenue,worst_ratio");
  const auto back = io::sweep_from_csv(csv);
  ASSERT_EQ(back.size(), 2u);
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(back[i].k, rows[i].k);
    EXPECT_EQ(back[i].mean_core_rev, rows[i].mean_core_rev);
    EXPECT_EQ(back[i].worst_ratio, rows[i].worst_ratio);
  }
  for (const auto& r : rows) {
    const auto jb = io::sweep_result_from_json(reparse(io::to_json(r)));
    EXPECT_EQ(jb.mean_core_rev, r.mean_core_rev);
    EXPECT_EQ(jb.worst_ratio, r.worst_ratio);
    EXPECT_EQ(jb.mean_ratio, r.mean_ratio);
  }
  EXPECT_THROW(io::sweep_from_csv("wrong\n"), InvalidInput);
}
