#include "bnet/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "bnet/error.hpp"
#include "bnet/random.hpp"

namespace bnet {

namespace {

void check_inputs(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) fail(ErrorKind::InvalidArgument, "scores and labels differ in length");
  for (int y : labels) {
    if (y != 0 && y != 1) fail(ErrorKind::InvalidArgument, "labels must be 0 or 1");
  }
  for (double s : scores) {
    if (std::isnan(s)) fail(ErrorKind::InvalidArgument, "score is NaN");
  }
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

// Per distinct score (descending): cumulative positives and negatives at or
// above that score.
struct Sweep {
  std::vector<double> threshold;
  std::vector<std::size_t> tp, fp;
  std::size_t positives = 0, negatives = 0;
};

Sweep sweep(std::span<const double> scores, std::span<const int> labels) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  Sweep s;
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    (labels[order[i]] == 1 ? tp : fp) += 1;
    if (i + 1 == order.size() || scores[order[i + 1]] != scores[order[i]]) {
      s.threshold.push_back(scores[order[i]]);
      s.tp.push_back(tp);
      s.fp.push_back(fp);
    }
  }
  s.positives = tp;
  s.negatives = fp;
  return s;
}

double auc_from_sweep(const Sweep& s) {
  // Twice the area in count units stays an exact integer.
  std::size_t area2 = 0, prev_tp = 0, prev_fp = 0;
  for (std::size_t k = 0; k < s.tp.size(); ++k) {
    area2 += (s.fp[k] - prev_fp) * (s.tp[k] + prev_tp);
    prev_tp = s.tp[k];
    prev_fp = s.fp[k];
  }
  return static_cast<double>(area2) / (2.0 * static_cast<double>(s.positives * s.negatives));
}

double prc_from_sweep(const Sweep& s) {
  const std::size_t k = s.tp.size();
  std::vector<double> precision(k);
  for (std::size_t i = 0; i < k; ++i) precision[i] = ratio(s.tp[i], s.tp[i] + s.fp[i]);
  for (std::size_t i = k; i-- > 1;) precision[i - 1] = std::max(precision[i - 1], precision[i]);
  double area = 0.0, prev_recall = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double recall = ratio(s.tp[i], s.positives);
    area += (recall - prev_recall) * precision[i];
    prev_recall = recall;
  }
  return area;
}

void require_both_classes(std::span<const int> labels) {
  const auto pos = std::count(labels.begin(), labels.end(), 1);
  if (pos == 0 || pos == static_cast<long>(labels.size())) {
    fail(ErrorKind::SingleClassLabels, "labels contain a single class");
  }
}

// Linear interpolation between order statistics (R type 7).
double percentile(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const double h = (values.size() - 1) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - lo) * (values[hi] - values[lo]);
}

}  // namespace

Confusion confusion_at(std::span<const double> scores, std::span<const int> labels, double threshold) {
  check_inputs(scores, labels);
  Confusion c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    if (labels[i] == 1) {
      (predicted ? c.tp : c.fn) += 1;
    } else {
      (predicted ? c.fp : c.tn) += 1;
    }
  }
  return c;
}

double accuracy(const Confusion& c) { return ratio(c.tp + c.tn, c.tp + c.tn + c.fp + c.fn); }
double sensitivity(const Confusion& c) { return ratio(c.tp, c.tp + c.fn); }
double specificity(const Confusion& c) { return ratio(c.tn, c.tn + c.fp); }
double f1_score(const Confusion& c) { return ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn); }

std::vector<CurvePoint> roc_curve(std::span<const double> scores, std::span<const int> labels) {
  check_inputs(scores, labels);
  require_both_classes(labels);
  const Sweep s = sweep(scores, labels);
  std::vector<CurvePoint> out{{std::numeric_limits<double>::infinity(), 0.0, 0.0}};
  for (std::size_t k = 0; k < s.tp.size(); ++k) {
    out.push_back({s.threshold[k], ratio(s.fp[k], s.negatives), ratio(s.tp[k], s.positives)});
  }
  return out;
}

std::vector<CurvePoint> pr_curve(std::span<const double> scores, std::span<const int> labels) {
  check_inputs(scores, labels);
  require_both_classes(labels);
  const Sweep s = sweep(scores, labels);
  std::vector<CurvePoint> out;
  for (std::size_t k = 0; k < s.tp.size(); ++k) {
    out.push_back({s.threshold[k], ratio(s.tp[k], s.positives), ratio(s.tp[k], s.tp[k] + s.fp[k])});
  }
  return out;
}

double au_roc(std::span<const double> scores, std::span<const int> labels) {
  check_inputs(scores, labels);
  require_both_classes(labels);
  return auc_from_sweep(sweep(scores, labels));
}

double au_prc(std::span<const double> scores, std::span<const int> labels) {
  check_inputs(scores, labels);
  require_both_classes(labels);
  return prc_from_sweep(sweep(scores, labels));
}

MetricsReport evaluate(std::span<const double> scores, std::span<const int> labels, const EvalConfig& config) {
  check_inputs(scores, labels);
  require_both_classes(labels);
  if (config.bootstrap < 1) fail(ErrorKind::InvalidArgument, "bootstrap count must be at least 1");

  auto compute = [&](std::span<const double> s, std::span<const int> y) {
    const Confusion c = confusion_at(s, y, config.threshold);
    const Sweep sw = sweep(s, y);
    return std::array<double, 6>{accuracy(c),     f1_score(c),       sensitivity(c),
                                 specificity(c), auc_from_sweep(sw), prc_from_sweep(sw)};
  };

  MetricsReport report;
  report.threshold = config.threshold;
  report.n = scores.size();
  report.bootstrap = config.bootstrap;
  report.confusion = confusion_at(scores, labels, config.threshold);
  report.roc = roc_curve(scores, labels);
  report.pr = pr_curve(scores, labels);
  const auto point = compute(scores, labels);

  std::array<std::vector<double>, 6> samples;
  const std::size_t n = scores.size();
  std::vector<double> bs(n);
  std::vector<int> by(n);
  for (int b = 0; b < config.bootstrap; ++b) {
    Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(b)));
    std::size_t pos = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = rng.below(n);
      bs[i] = scores[j];
      by[i] = labels[j];
      pos += static_cast<std::size_t>(labels[j]);
    }
    if (pos == 0 || pos == n) continue;
    const auto values = compute(bs, by);
    for (std::size_t m = 0; m < 6; ++m) samples[m].push_back(values[m]);
  }
  report.bootstrap_used = static_cast<int>(samples[0].size());

  std::array<MetricValue*, 6> slots{&report.accuracy,    &report.f1,     &report.sensitivity,
                                    &report.specificity, &report.au_roc, &report.au_prc};
  for (std::size_t m = 0; m < 6; ++m) {
    MetricValue& v = *slots[m];
    v.point = point[m];
    if (samples[m].empty()) {
      v.ci_low = v.ci_high = v.point;
    } else {
      v.ci_low = std::min(percentile(samples[m], 0.025), v.point);
      v.ci_high = std::max(percentile(samples[m], 0.975), v.point);
    }
  }
  return report;
}

Json metrics_to_json(const MetricsReport& report) {
  auto metric = [](const MetricValue& v) {
    return Json{{"value", v.point}, {"ci95", {v.ci_low, v.ci_high}}};
  };
  auto curve = [](const std::vector<CurvePoint>& points, const char* x, const char* y) {
    Json out = Json::array();
    for (const auto& p : points) {
      out.push_back({{"threshold", std::isinf(p.threshold) ? Json(nullptr) : Json(p.threshold)},
                     {x, p.x},
                     {y, p.y}});
    }
    return out;
  };
  Json doc;
  doc["n"] = report.n;
  doc["threshold"] = report.threshold;
  doc["bootstrap"] = report.bootstrap;
  doc["bootstrap_used"] = report.bootstrap_used;
  doc["confusion"] = {{"tp", report.confusion.tp},
                      {"fp", report.confusion.fp},
                      {"tn", report.confusion.tn},
                      {"fn", report.confusion.fn}};
  doc["accuracy"] = metric(report.accuracy);
  doc["f1"] = metric(report.f1);
  doc["sensitivity"] = metric(report.sensitivity);
  doc["specificity"] = metric(report.specificity);
  doc["au_roc"] = metric(report.au_roc);
  doc["au_prc"] = metric(report.au_prc);
  doc["roc"] = curve(report.roc, "fpr", "tpr");
  doc["pr"] = curve(report.pr, "recall", "precision");
  return doc;
}

}  // namespace bnet
