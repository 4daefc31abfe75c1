#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace driftscan {

struct evaluation_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct GroundTruth {
  std::vector<std::size_t> changes;  // strictly increasing trace indices
  std::size_t epsilon = 0;

  void validate() const {
    for (std::size_t i = 0; i + 1 < changes.size(); ++i) {
      if (changes[i + 1] <= changes[i])
        throw evaluation_error("true change indices must be strictly increasing");
      if (changes[i + 1] - changes[i] < 2 * epsilon)
        throw evaluation_error(
            "epsilon " + std::to_string(epsilon) +
            " makes neighborhoods overlap (gap " +
            std::to_string(changes[i + 1] - changes[i]) + ")");
    }
  }
};

struct EvalResult {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f_score = 0.0;
  std::vector<std::size_t> delays;       // per TP, |detected - true|
  std::optional<double> mean_delay;      // absent when tp = 0
};

inline double fscore(std::size_t tp, std::size_t fp, std::size_t fn) {
  if (tp == 0) return 0.0;
  const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  return 2.0 * precision * recall / (precision + recall);
}

/// Greedy in-order matching: a detection inside an unclaimed neighborhood
/// [c - eps, c + eps] is the TP for that change; duplicates and detections
/// outside every neighborhood are FPs; unmatched changes are FNs.
inline EvalResult classify(const std::vector<std::size_t>& detections,
                           const GroundTruth& truth) {
  truth.validate();
  if (!std::is_sorted(detections.begin(), detections.end()))
    throw evaluation_error("detections must be sorted ascending");

  EvalResult result;
  std::vector<bool> claimed(truth.changes.size(), false);
  for (const std::size_t d : detections) {
    bool matched = false;
    for (std::size_t c = 0; c < truth.changes.size() && !matched; ++c) {
      const std::size_t center = truth.changes[c];
      const std::size_t lo = center >= truth.epsilon ? center - truth.epsilon : 0;
      const std::size_t hi = center + truth.epsilon;
      if (d < lo || d > hi || claimed[c]) continue;
      claimed[c] = true;
      matched = true;
      result.delays.push_back(d >= center ? d - center : center - d);
    }
    if (matched) ++result.tp;
    else ++result.fp;
  }
  for (bool c : claimed)
    if (!c) ++result.fn;

  result.precision = result.tp + result.fp == 0
                         ? 0.0
                         : static_cast<double>(result.tp) /
                               static_cast<double>(result.tp + result.fp);
  result.recall = result.tp + result.fn == 0
                      ? 0.0
                      : static_cast<double>(result.tp) /
                            static_cast<double>(result.tp + result.fn);
  result.f_score = fscore(result.tp, result.fp, result.fn);
  if (result.tp > 0) {
    double sum = 0.0;
    for (std::size_t d : result.delays) sum += static_cast<double>(d);
    result.mean_delay = sum / static_cast<double>(result.tp);
  }
  return result;
}

// ---- JSON / CSV -------------------------------------------------------------

inline nlohmann::json truth_to_json(const GroundTruth& truth) {
  return nlohmann::json{{"changes", truth.changes}, {"epsilon", truth.epsilon}};
}

inline GroundTruth truth_from_json(const nlohmann::json& j) {
  GroundTruth truth;
  truth.changes = j.at("changes").get<std::vector<std::size_t>>();
  truth.epsilon = j.at("epsilon").get<std::size_t>();
  return truth;
}

inline nlohmann::json result_to_json(const EvalResult& r) {
  nlohmann::json j{{"tp", r.tp},
                   {"fp", r.fp},
                   {"fn", r.fn},
                   {"precision", r.precision},
                   {"recall", r.recall},
                   {"fscore", r.f_score},
                   {"delays", r.delays}};
  if (r.mean_delay) j["mean_delay"] = *r.mean_delay;
  else j["mean_delay"] = nullptr;
  return j;
}

inline std::string result_csv_row(const std::string& log,
                                  const std::string& pattern, std::size_t n,
                                  const EvalResult& r) {
  std::string row = log + "," + pattern + "," + std::to_string(n) + "," +
                    std::to_string(r.tp) + "," + std::to_string(r.fp) + "," +
                    std::to_string(r.fn) + "," + std::to_string(r.precision) +
                    "," + std::to_string(r.recall) + "," +
                    std::to_string(r.f_score) + ",";
  row += r.mean_delay ? std::to_string(*r.mean_delay) : std::string("");
  return row;
}

}  // namespace driftscan
