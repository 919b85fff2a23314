#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "bnet/serialize.hpp"

namespace bnet {

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

// score >= threshold predicts the positive class (label 1).
Confusion confusion_at(std::span<const double> scores, std::span<const int> labels, double threshold);

double accuracy(const Confusion& c);
double sensitivity(const Confusion& c);
double specificity(const Confusion& c);
double f1_score(const Confusion& c);

struct CurvePoint {
  double threshold;
  double x;
  double y;
};

// (false-positive rate, true-positive rate) at each distinct score, starting at (0, 0).
std::vector<CurvePoint> roc_curve(std::span<const double> scores, std::span<const int> labels);
// (recall, precision) at each distinct score.
std::vector<CurvePoint> pr_curve(std::span<const double> scores, std::span<const int> labels);

// Trapezoid over the ranked sweep; tied scores count one half.
double au_roc(std::span<const double> scores, std::span<const int> labels);
// Area under the step-wise interpolated precision envelope.
double au_prc(std::span<const double> scores, std::span<const int> labels);

struct MetricValue {
  double point = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

struct EvalConfig {
  double threshold = 0.5;
  int bootstrap = 1000;
  std::uint64_t seed = 0;
};

struct MetricsReport {
  MetricValue accuracy, f1, sensitivity, specificity, au_roc, au_prc;
  double threshold = 0.5;
  std::size_t n = 0;
  int bootstrap = 0;
  int bootstrap_used = 0;  // resamples with both classes present
  Confusion confusion;
  std::vector<CurvePoint> roc;
  std::vector<CurvePoint> pr;
};

// Percentile bootstrap 95% intervals, widened if needed so that
// ci_low <= point <= ci_high. Throws SingleClassLabels, InvalidArgument.
MetricsReport evaluate(std::span<const double> scores, std::span<const int> labels, const EvalConfig& config);

Json metrics_to_json(const MetricsReport& report);

}  // namespace bnet
