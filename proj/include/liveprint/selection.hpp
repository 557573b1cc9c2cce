#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "liveprint/classifier.hpp"

namespace liveprint {

struct SubsetScore {
  SubsetMask mask = SubsetMask::all();
  EvaluationResult result;
  bool degenerate = false;  // covariance singular even after the ridge; scored as chance
};

/// Best subset per cardinality plus the overall optimum.
struct SelectionReport {
  std::string sensor;
  std::vector<SubsetScore> ladder;  // ladder[k - 1] is the best subset with k features
  SubsetScore optimum;
  std::vector<SubsetScore> all;     // every evaluated subset, ascending by mask bits
  int subsets_evaluated = 0;
};

/// True when a ranks before b: lower ACE, then fewer features, then the
/// lexicographically smaller flag string.
bool ranks_before(const SubsetScore& a, const SubsetScore& b);

/// Leave-one-out ACE of every non-empty subset of `candidates` (all ten
/// features by default).
SelectionReport exhaustive_select(std::span<const LabeledSample> samples,
                                  const SubsetMask& candidates = SubsetMask::all());
/// Reference implementation refitting every model from scratch.
SelectionReport exhaustive_select_naive(std::span<const LabeledSample> samples,
                                        const SubsetMask& candidates = SubsetMask::all());

struct RateSummary {
  double far = 0.0;
  double frr = 0.0;
  double ace = 0.0;
};

/// Unweighted column means over datasets.
RateSummary total_row(std::span<const EvaluationResult> rows);
/// Unweighted mean of each dataset's own-subset ACE.
double grey_cell_aggregate(std::span<const double> own_subset_aces);

struct NamedSubset {
  std::string name;
  SubsetMask mask = SubsetMask::all();
  std::optional<std::string> own_sensor;  // dataset whose optimum this subset is
};

struct SubsetTable {
  NamedSubset subset;
  std::vector<std::pair<std::string, EvaluationResult>> rows;  // sorted by sensor
  RateSummary total;
};

struct CrossSensorReport {
  std::vector<SubsetTable> tables;
  std::optional<double> grey_cell;  // present when every dataset has an own subset
};

CrossSensorReport cross_sensor_report(const std::map<std::string, std::vector<LabeledSample>>& datasets,
                                      const std::vector<NamedSubset>& subsets);

/// Two decimals, halves rounded away from zero.
std::string format_percent(double value, int precision = 2);

std::string render_selection_table(const SelectionReport& report, int precision = 2);
std::string render_cross_sensor(const CrossSensorReport& report, int precision = 2);
nlohmann::json to_json(const SelectionReport& report);
nlohmann::json to_json(const CrossSensorReport& report);

}  // namespace liveprint
