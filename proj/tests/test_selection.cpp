#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "liveprint/error.hpp"
#include "liveprint/selection.hpp"

using namespace liveprint;

namespace {

std::vector<LabeledSample> dataset(std::uint64_t seed, int n, const std::string& sensor = "s") {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<LabeledSample> out;
  for (int i = 0; i < n; ++i) {
    LabeledSample s;
    s.id = sensor + std::to_string(i);
    s.sensor = sensor;
    s.label = i % 2 ? Label::Fake : Label::Real;
    for (int k = 0; k < kFeatureCount; ++k) s.features.values[k] = z(rng) + (s.label == Label::Real ? 0.15 * k : 0.0);
    out.push_back(s);
  }
  return out;
}

}  // namespace

TEST_CASE("all 1023 subsets are touched") {
  const auto d = dataset(1, 40);
  const SelectionReport r = exhaustive_select(d);
  CHECK(r.subsets_evaluated == 1023);
  CHECK(r.all.size() == 1023);
  CHECK(r.ladder.size() == 10);
  double min_ace = 100;
  for (const auto& s : r.all) min_ace = std::min(min_ace, s.result.ace);
  CHECK(r.optimum.result.ace == min_ace);
  CHECK(r.optimum.result.ace <= r.all.back().result.ace);  // the all-ten subset is last
  for (int k = 0; k < 10; ++k) CHECK(r.ladder[k].mask.cardinality() == k + 1);
}

TEST_CASE("fast search equals naive search") {
  const auto d = dataset(2, 24);
  const SelectionReport a = exhaustive_select(d), b = exhaustive_select_naive(d);
  REQUIRE(a.all.size() == b.all.size());
  for (std::size_t i = 0; i < a.all.size(); ++i) {
    CHECK(a.all[i].mask == b.all[i].mask);
    CHECK(a.all[i].result.false_accepts == b.all[i].result.false_accepts);
    CHECK(a.all[i].result.false_rejects == b.all[i].result.false_rejects);
  }
  CHECK(a.optimum.mask == b.optimum.mask);
  CHECK(render_selection_table(a) == render_selection_table(b));
}

TEST_CASE("three-feature toy set against brute force") {
  const auto d = dataset(3, 30);
  const SubsetMask cand = SubsetMask::from_bits(0b0000100101);
  const SelectionReport r = exhaustive_select(d, cand);
  CHECK(r.subsets_evaluated == 7);
  std::vector<std::pair<SubsetMask, EvaluationResult>> brute;
  for (std::uint16_t bits = 1; bits < 1024; ++bits) {
    if ((bits & ~cand.bits()) != 0) continue;
    brute.emplace_back(SubsetMask::from_bits(bits), loo_evaluate_naive(d, SubsetMask::from_bits(bits)));
  }
  REQUIRE(brute.size() == 7);
  for (std::size_t i = 0; i < 7; ++i) {
    CHECK(r.all[i].mask == brute[i].first);
    CHECK(r.all[i].result.ace == brute[i].second.ace);
  }
}

TEST_CASE("a perfectly separating feature wins alone") {
  auto d = dataset(4, 30);
  for (auto& s : d) s.features.values[0] = (s.label == Label::Real ? 0.0 : 10.0) + 0.001 * s.features.values[3];
  const SelectionReport r = exhaustive_select(d);
  CHECK(r.optimum.mask == SubsetMask::from_bits(1));
  CHECK(r.optimum.result.ace == 0.0);
}

TEST_CASE("ties break by cardinality then flag order") {
  const SubsetScore a{SubsetMask::parse("Q_E"), evaluation_from_counts(10, 10, 1, 1), false};
  const SubsetScore b{SubsetMask::parse("Q_OCL,Q_E"), evaluation_from_counts(10, 10, 1, 1), false};
  const SubsetScore c{SubsetMask::parse("Q_OCL"), evaluation_from_counts(10, 10, 2, 0), false};
  CHECK(ranks_before(a, b));
  CHECK(ranks_before(a, c));  // same ACE, same size, "0100000000" < "1000000000"
  CHECK_FALSE(ranks_before(c, a));
}

TEST_CASE("degenerate subsets are scored as chance") {
  auto d = dataset(5, 20);
  for (auto& s : d) s.features.values[4] = 0.5;
  const SelectionReport r = exhaustive_select(d);
  const SubsetScore& only_mean = r.all[(1 << 4) - 1];
  CHECK(only_mean.mask == SubsetMask::from_bits(1 << 4));
  CHECK(only_mean.degenerate);
  CHECK(only_mean.result.ace == 50.0);
}

TEST_CASE("table totals and grey cell") {
  const std::vector<EvaluationResult> rows{evaluation_from_counts(100, 100, 2, 1), evaluation_from_counts(100, 100, 12, 3)};
  const RateSummary t = total_row(rows);
  CHECK(t.far == doctest::Approx(7.0));
  CHECK(t.frr == doctest::Approx(2.0));
  CHECK(t.ace == doctest::Approx(4.5));
  const std::vector<double> own{1.83, 11.12, 6.73};
  CHECK(format_percent(grey_cell_aggregate(own)) == "6.56");
}

TEST_CASE("percent formatting rounds half away from zero") {
  CHECK(format_percent(1.835) == "1.84");
  CHECK(format_percent(1.825) == "1.83");
  CHECK(format_percent(0.0) == "0.00");
  CHECK(format_percent(100.0) == "100.00");
  CHECK(format_percent(6.5599999) == "6.56");
  CHECK(format_percent(2.5, 0) == "3");
}

TEST_CASE("cross-sensor report") {
  std::map<std::string, std::vector<LabeledSample>> ds{{"a", dataset(6, 30, "a")}};
  const std::vector<NamedSubset> subs{{"best a", SubsetMask::parse("Q_E,Q_STD"), "a"}};
  const CrossSensorReport r = cross_sensor_report(ds, subs);
  REQUIRE(r.tables.size() == 1);
  const auto& row = r.tables[0].rows.at(0).second;
  CHECK(r.tables[0].total.far == row.far);
  CHECK(r.tables[0].total.frr == row.frr);
  CHECK(r.tables[0].total.ace == row.ace);
  REQUIRE(r.grey_cell);
  CHECK(*r.grey_cell == row.ace);

  ds["b"] = dataset(7, 30, "b");
  const CrossSensorReport r2 = cross_sensor_report(ds, subs);
  CHECK_FALSE(r2.grey_cell);
  CHECK(r2.tables[0].rows.size() == 2);
  const std::string text = render_cross_sensor(r2);
  CHECK(text.find("TOTAL") != std::string::npos);
  const auto j = to_json(r2);
  CHECK(j["tables"].size() == 1);
  CHECK_THROWS_AS(cross_sensor_report({}, subs), Error);
}

TEST_CASE("selection table layout") {
  const SelectionReport r = exhaustive_select(dataset(8, 20));
  const std::string t = render_selection_table(r);
  int rows = 0, stars = 0;
  std::size_t pos = 0;
  while ((pos = t.find('\n', pos)) != std::string::npos) ++rows, ++pos;
  for (char c : t) stars += c == '*';
  CHECK(rows == 13);  // title, header, ten ladder rows, footer
  CHECK(stars == 2);  // optimum marker and the footer
  const auto j = to_json(r);
  CHECK(j["subsets_evaluated"] == 1023);
  CHECK(j["ladder"].size() == 10);
}

TEST_CASE("material ablation changes no byte") {
  auto d = dataset(9, 24);
  const std::string base = render_selection_table(exhaustive_select(d));
  for (std::size_t i = 0; i < d.size(); ++i) d[i].material = i % 2 ? "gelatin" : "silicone";
  CHECK(render_selection_table(exhaustive_select(d)) == base);
}
