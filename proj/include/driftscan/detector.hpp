#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "driftscan/conformance.hpp"
#include "driftscan/discovery.hpp"
#include "driftscan/event_log.hpp"
#include "driftscan/petri_net.hpp"
#include "driftscan/stats.hpp"

namespace driftscan {

struct detector_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DetectorConfig {
  std::size_t window_size = 100;
  double p_threshold = 0.05;
  std::size_t replay_budget = kDefaultReplayBudget;

  void validate() const {
    if (window_size < 4)
      throw detector_error("window size must be at least 4");
    if (p_threshold <= 0.0 || p_threshold >= 1.0)
      throw detector_error("p threshold must lie in (0, 1)");
    if (replay_budget == 0) throw detector_error("replay budget must be positive");
  }
};

struct SeriesPoint {
  std::size_t window_start = 0;
  double fitness = 0.0;
  double precision = 0.0;
  bool cand_fitness = false;
  bool cand_precision = false;
};

struct DriftReport {
  DetectorConfig config;
  std::vector<std::size_t> drift_indices;
  std::vector<SeriesPoint> series;
};

/// One window's drift-candidate verdict: a regression over the last n/2
/// measurements shows a significant slope, or the series has plateaued
/// while the previous window was already a candidate.
inline bool identify_drift(std::size_t n, const std::vector<double>& data,
                           const std::vector<bool>& prior_flags,
                           double p_threshold = 0.05) {
  if (2 * data.size() <= n) return false;
  const std::size_t span = n / 2;
  const RegressionResult reg =
      slope_test(std::span<const double>(data).last(span));
  const bool m_neg = reg.slope < 0.0 && reg.p_value < p_threshold;
  const bool m_pos = reg.slope > 0.0 && reg.p_value < p_threshold;
  if (m_neg || m_pos) return true;
  return !prior_flags.empty() && prior_flags.back();
}

/// Drift is confirmed when the last n windows were all candidates on
/// either metric.
inline bool confirm_drift(std::size_t n, const std::vector<bool>& flags_fitness,
                          const std::vector<bool>& flags_precision) {
  auto streak = [n](const std::vector<bool>& flags) {
    if (flags.size() < n) return false;
    for (std::size_t i = flags.size() - n; i < flags.size(); ++i)
      if (!flags[i]) return false;
    return true;
  };
  return streak(flags_fitness) || streak(flags_precision);
}

/// Detect sudden control-flow drifts: discover a reference model from the
/// current window, track RT fitness and PC precision while sliding, flag
/// candidate windows by regression, and confirm after n consecutive
/// candidates. On confirmation the reference is rediscovered and all
/// series restart.
inline DriftReport detect(const EventLog& log, const DetectorConfig& config) {
  config.validate();
  const std::size_t n = config.window_size;
  if (log.size() <= n)
    throw detector_error("log has " + std::to_string(log.size()) +
                         " traces; need more than the window size " +
                         std::to_string(n));

  DriftReport report;
  report.config = config;

  std::size_t i = 0;
  while (i <= log.size() - n) {
    std::vector<double> fitness_series, precision_series;
    std::vector<bool> cand_fitness, cand_precision;

    const PetriNet reference = discover(window_at(log, i, n));
    const OlpSet olp = extract_olp(reference);
    ReplayCache cache;

    while (i <= log.size() - n &&
           !confirm_drift(n, cand_fitness, cand_precision)) {
      const SlidingWindow window = window_at(log, i, n);
      const double fitness =
          rt_fitness(window, reference, config.replay_budget, &cache);
      const double precision = pc_precision(window, olp);
      fitness_series.push_back(fitness);
      precision_series.push_back(precision);

      const bool cf = identify_drift(n, fitness_series, cand_fitness,
                                     config.p_threshold);
      const bool cp = identify_drift(n, precision_series, cand_precision,
                                     config.p_threshold);
      cand_fitness.push_back(cf);
      cand_precision.push_back(cp);
      report.series.push_back(SeriesPoint{i, fitness, precision, cf, cp});

      ++i;
    }

    if (confirm_drift(n, cand_fitness, cand_precision)) {
      report.drift_indices.push_back(i);
    }
  }
  return report;
}

// ---- report serialization --------------------------------------------------

inline nlohmann::json report_to_json(const DriftReport& report) {
  nlohmann::json series = nlohmann::json::array();
  for (const SeriesPoint& p : report.series) {
    series.push_back({{"window_start", p.window_start},
                      {"fitness", p.fitness},
                      {"precision", p.precision},
                      {"cand_fitness", p.cand_fitness},
                      {"cand_precision", p.cand_precision}});
  }
  return nlohmann::json{
      {"config",
       {{"window_size", report.config.window_size},
        {"p_threshold", report.config.p_threshold},
        {"replay_budget", report.config.replay_budget}}},
      {"drift_indices", report.drift_indices},
      {"series", series}};
}

inline DriftReport report_from_json(const nlohmann::json& j) {
  DriftReport report;
  report.config.window_size = j.at("config").at("window_size").get<std::size_t>();
  report.config.p_threshold = j.at("config").at("p_threshold").get<double>();
  report.config.replay_budget =
      j.at("config").at("replay_budget").get<std::size_t>();
  report.drift_indices =
      j.at("drift_indices").get<std::vector<std::size_t>>();
  for (const auto& p : j.at("series")) {
    report.series.push_back(SeriesPoint{
        p.at("window_start").get<std::size_t>(), p.at("fitness").get<double>(),
        p.at("precision").get<double>(), p.at("cand_fitness").get<bool>(),
        p.at("cand_precision").get<bool>()});
  }
  return report;
}

inline void write_series_csv(std::ostream& out, const DriftReport& report) {
  out << "window_start,fitness,precision\n";
  for (const SeriesPoint& p : report.series) {
    out << p.window_start << ',' << p.fitness << ',' << p.precision << '\n';
  }
}

}  // namespace driftscan
