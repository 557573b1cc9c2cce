#include "liveprint/selection.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>

#include "liveprint/error.hpp"

namespace liveprint {

namespace {

// ACE is proportional to fa * n_real + fr * n_fake within one dataset; the
// integer form keeps ties exact.
long long ace_key(const EvaluationResult& r) {
  return static_cast<long long>(r.false_accepts) * r.n_real + static_cast<long long>(r.false_rejects) * r.n_fake;
}

bool ace_less(const EvaluationResult& a, const EvaluationResult& b) {
  if (a.n_real == b.n_real && a.n_fake == b.n_fake) return ace_key(a) < ace_key(b);
  return a.ace < b.ace;
}

bool ace_equal(const EvaluationResult& a, const EvaluationResult& b) { return !ace_less(a, b) && !ace_less(b, a); }

SelectionReport run_selection(std::span<const LabeledSample> samples, const SubsetMask& candidates,
                              const std::function<EvaluationResult(const SubsetMask&)>& evaluate) {
  int n_real = 0;
  int n_fake = 0;
  for (const auto& s : samples) ++(s.label == Label::Real ? n_real : n_fake);

  SelectionReport report;
  if (!samples.empty()) report.sensor = samples.front().sensor;
  for (unsigned bits = 1; bits < (1U << kFeatureCount); ++bits) {
    if ((bits & ~static_cast<unsigned>(candidates.bits())) != 0) continue;
    SubsetScore score;
    score.mask = SubsetMask::from_bits(static_cast<std::uint16_t>(bits));
    try {
      score.result = evaluate(score.mask);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::ZeroVariance) throw;
      // No usable covariance: every decision falls to the tie rule (fake).
      score.degenerate = true;
      score.result = evaluation_from_counts(n_real, n_fake, 0, n_real);
    }
    report.all.push_back(score);
  }
  report.subsets_evaluated = static_cast<int>(report.all.size());

  report.ladder.assign(candidates.cardinality(), SubsetScore{});
  std::vector<bool> seen(candidates.cardinality(), false);
  for (const auto& s : report.all) {
    const int k = s.mask.cardinality() - 1;
    if (!seen[k] || ranks_before(s, report.ladder[k])) {
      report.ladder[k] = s;
      seen[k] = true;
    }
  }
  report.optimum = report.ladder.front();
  for (const auto& s : report.ladder)
    if (ranks_before(s, report.optimum)) report.optimum = s;
  return report;
}

}  // namespace

bool ranks_before(const SubsetScore& a, const SubsetScore& b) {
  if (!ace_equal(a.result, b.result)) return ace_less(a.result, b.result);
  if (a.mask.cardinality() != b.mask.cardinality()) return a.mask.cardinality() < b.mask.cardinality();
  return a.mask.flags() < b.mask.flags();
}

SelectionReport exhaustive_select(std::span<const LabeledSample> samples, const SubsetMask& candidates) {
  const LooStatistics stats(samples);
  return run_selection(samples, candidates, [&](const SubsetMask& m) { return stats.evaluate(m); });
}

SelectionReport exhaustive_select_naive(std::span<const LabeledSample> samples, const SubsetMask& candidates) {
  return run_selection(samples, candidates, [&](const SubsetMask& m) { return loo_evaluate_naive(samples, m); });
}

RateSummary total_row(std::span<const EvaluationResult> rows) {
  RateSummary t;
  if (rows.empty()) return t;
  for (const auto& r : rows) {
    t.far += r.far;
    t.frr += r.frr;
    t.ace += r.ace;
  }
  const double n = static_cast<double>(rows.size());
  t.far /= n;
  t.frr /= n;
  t.ace /= n;
  return t;
}

double grey_cell_aggregate(std::span<const double> own_subset_aces) {
  if (own_subset_aces.empty()) return 0.0;
  double sum = 0.0;
  for (double a : own_subset_aces) sum += a;
  return sum / static_cast<double>(own_subset_aces.size());
}

CrossSensorReport cross_sensor_report(const std::map<std::string, std::vector<LabeledSample>>& datasets,
                                      const std::vector<NamedSubset>& subsets) {
  if (datasets.empty()) throw Error(ErrorCode::TooFewSamples, "no dataset to evaluate");
  std::map<std::string, LooStatistics> stats;
  for (const auto& [sensor, samples] : datasets) stats.emplace(sensor, LooStatistics(samples));

  CrossSensorReport report;
  std::map<std::string, double> own_ace;
  for (const auto& subset : subsets) {
    SubsetTable table;
    table.subset = subset;
    std::vector<EvaluationResult> rows;
    for (const auto& [sensor, st] : stats) {
      const EvaluationResult r = st.evaluate(subset.mask);
      table.rows.emplace_back(sensor, r);
      rows.push_back(r);
      if (subset.own_sensor && *subset.own_sensor == sensor) own_ace[sensor] = r.ace;
    }
    table.total = total_row(rows);
    report.tables.push_back(std::move(table));
  }
  if (own_ace.size() == datasets.size()) {
    std::vector<double> aces;
    for (const auto& [sensor, ace] : own_ace) aces.push_back(ace);
    report.grey_cell = grey_cell_aggregate(aces);
  }
  return report;
}

std::string format_percent(double value, int precision) {
  const double scale = std::pow(10.0, precision);
  // The relative nudge keeps decimal halves such as 1.825 (stored slightly
  // below) rounding away from zero.
  double scaled = std::round(value * scale * (1.0 + 1e-12));
  if (scaled == 0.0) scaled = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, scaled / scale);
  return buf;
}

namespace {

std::string pad_left(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace

std::string render_selection_table(const SelectionReport& report, int precision) {
  std::ostringstream out;
  out << "Best feature subsets for " << report.sensor << " (" << report.subsets_evaluated << " subsets evaluated)\n";
  out << "# features";
  for (int i = 0; i < kFeatureCount; ++i) out << pad_left(std::string(feature_name(i)), 8);
  out << pad_left("ACE (%)", 10) << "\n";
  for (std::size_t k = 0; k < report.ladder.size(); ++k) {
    const SubsetScore& s = report.ladder[k];
    out << pad_left(std::to_string(k + 1), 10);
    for (int i = 0; i < kFeatureCount; ++i) out << pad_left(s.mask.contains(i) ? "1" : ".", 8);
    out << pad_left(format_percent(s.result.ace, precision), 10);
    if (s.mask == report.optimum.mask) out << "  *";
    out << "\n";
  }
  out << "* optimal subset: " << report.optimum.mask.names() << ", ACE "
      << format_percent(report.optimum.result.ace, precision) << "%\n";
  return out.str();
}

std::string render_cross_sensor(const CrossSensorReport& report, int precision) {
  std::ostringstream out;
  for (const auto& table : report.tables) {
    out << table.subset.name << ": " << table.subset.mask.names() << "\n";
    out << pad_right("", 14) << pad_left("FAR (%)", 10) << pad_left("FRR (%)", 10) << pad_left("ACE (%)", 10) << "\n";
    for (const auto& [sensor, r] : table.rows) {
      out << pad_right(sensor, 14) << pad_left(format_percent(r.far, precision), 10)
          << pad_left(format_percent(r.frr, precision), 10) << pad_left(format_percent(r.ace, precision), 10);
      if (table.subset.own_sensor && *table.subset.own_sensor == sensor) out << "  *";
      out << "\n";
    }
    out << pad_right("TOTAL", 14) << pad_left(format_percent(table.total.far, precision), 10)
        << pad_left(format_percent(table.total.frr, precision), 10)
        << pad_left(format_percent(table.total.ace, precision), 10) << "\n\n";
  }
  if (report.grey_cell) out << "Own-subset average ACE: " << format_percent(*report.grey_cell, precision) << "%\n";
  return out.str();
}

namespace {

nlohmann::json score_json(const SubsetScore& s) {
  return {{"features", s.mask.cardinality()},
          {"mask", s.mask.flags()},
          {"names", s.mask.names()},
          {"far", s.result.far},
          {"frr", s.result.frr},
          {"ace", s.result.ace},
          {"degenerate", s.degenerate}};
}

}  // namespace

nlohmann::json to_json(const SelectionReport& report) {
  nlohmann::json ladder = nlohmann::json::array();
  for (const auto& s : report.ladder) ladder.push_back(score_json(s));
  return {{"sensor", report.sensor},
          {"subsets_evaluated", report.subsets_evaluated},
          {"ladder", ladder},
          {"optimum", score_json(report.optimum)}};
}

nlohmann::json to_json(const CrossSensorReport& report) {
  nlohmann::json tables = nlohmann::json::array();
  for (const auto& t : report.tables) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& [sensor, r] : t.rows) {
      rows.push_back({{"sensor", sensor},
                      {"far", r.far},
                      {"frr", r.frr},
                      {"ace", r.ace},
                      {"n_real", r.n_real},
                      {"n_fake", r.n_fake}});
    }
    nlohmann::json table = {{"name", t.subset.name},
                            {"mask", t.subset.mask.flags()},
                            {"names", t.subset.mask.names()},
                            {"rows", rows},
                            {"total", {{"far", t.total.far}, {"frr", t.total.frr}, {"ace", t.total.ace}}}};
    table["own_sensor"] = t.subset.own_sensor ? nlohmann::json(*t.subset.own_sensor) : nlohmann::json(nullptr);
    tables.push_back(table);
  }
  nlohmann::json j = {{"tables", tables}};
  j["grey_cell_ace"] = report.grey_cell ? nlohmann::json(*report.grey_cell) : nlohmann::json(nullptr);
  return j;
}

}  // namespace liveprint
