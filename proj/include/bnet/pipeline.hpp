#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bnet/serialize.hpp"
#include "bnet/table.hpp"

namespace bnet {

// Composite 0-30 coverage score: each component maps the states of one
// source column to a non-negative integer contribution.
struct CvricsComponent {
  std::string column;
  // Keyed by state label; states not listed contribute 0.
  std::vector<std::pair<std::string, int>> scores;

  int max_contribution() const;
};

struct CvricsSpec {
  std::vector<CvricsComponent> components;
  int range_low = 0;
  int range_high = 30;
};

// Throws InvalidArgument unless contributions are >= 0 and the maximum
// achievable sum equals the declared upper bound.
void validate_cvrics(const CvricsSpec& spec);
CvricsSpec cvrics_from_json(const Json& doc);
Json cvrics_to_json(const CvricsSpec& spec);

// Missing cells contribute 0. Throws MissingColumn.
std::vector<int> compute_cvrics(const DatasetTable& data, const CvricsSpec& spec);
// Appends the score as an ordered column named "cvrics" with states "0".."30".
void append_cvrics(DatasetTable& data, const CvricsSpec& spec);

// Half-open bins [edges[i], edges[i+1]). kMissing values are skipped.
// Throws UnsortedEdges, or ValueOutOfRange for a value outside every bin.
std::vector<std::size_t> histogram(std::span<const int> values, std::span<const int> edges);

struct SplitConfig {
  double train_fraction = 0.8;
  std::optional<std::string> stratify_on;
  std::uint64_t seed = 0;
};

// floor(n * fraction) rows (per stratum when stratified) go to train. Both
// parts keep the original row order. Throws DegenerateClass.
std::pair<DatasetTable, DatasetTable> train_test_split(const DatasetTable& data, const SplitConfig& config);

struct SmoteConfig {
  int k_neighbors = 5;
  double target_ratio = 1.0;
  std::uint64_t seed = 0;
  // Pins the interpolation weight; unset draws lambda ~ U[0,1).
  std::optional<double> fixed_lambda;
};

// Mixed distance: ordered columns add |rank difference| / (cardinality - 1),
// unordered columns add a 0/1 mismatch. `skip` is excluded.
double mixed_distance(const DatasetTable& data, std::size_t a, std::size_t b,
                      std::optional<std::size_t> skip = std::nullopt);

// Appends synthetic minority rows after the originals until
// minority/majority reaches target_ratio. Ordered columns interpolate the
// state rank and round to the nearest state; unordered columns take the
// neighbour's state with probability lambda (a fair coin marginally).
// Throws NonBinaryLabel, TooFewMinority, InvalidArgument on missing cells.
DatasetTable smote(const DatasetTable& data, const std::string& label, const SmoteConfig& config);

// Drops rows whose label is missing and imputes missing features with the
// column mode (lowest state on ties).
DatasetTable prepare_for_classification(const DatasetTable& data, const std::string& label);

// Re-encodes missing cells as an explicit "(missing)" state appended to the
// affected columns.
DatasetTable encode_missing_as_state(const DatasetTable& data);

}  // namespace bnet
