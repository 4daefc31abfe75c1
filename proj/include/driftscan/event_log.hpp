#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

namespace driftscan {

struct parse_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct bounds_error : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct Event {
  std::string activity;
  std::string case_id;
  std::optional<std::int64_t> timestamp_ms;

  friend bool operator==(const Event&, const Event&) = default;
};

struct Trace {
  std::string id;
  std::vector<Event> events;

  friend bool operator==(const Trace&, const Trace&) = default;
};

struct EventLog {
  std::vector<Trace> traces;

  std::size_t size() const { return traces.size(); }
  bool empty() const { return traces.empty(); }

  friend bool operator==(const EventLog&, const EventLog&) = default;
};

/// Read-only view of the n traces starting at index i.
class SlidingWindow {
 public:
  SlidingWindow(const EventLog& log, std::size_t start, std::size_t n)
      : log_(&log), start_(start), n_(n) {
    if (n == 0) throw bounds_error("window size must be >= 1");
    if (start + n > log.size())
      throw bounds_error("window [" + std::to_string(start) + ", " +
                         std::to_string(start + n) + ") out of range for log of " +
                         std::to_string(log.size()) + " traces");
  }

  std::size_t start_index() const { return start_; }
  std::size_t size() const { return n_; }

  const Trace& operator[](std::size_t i) const { return log_->traces[start_ + i]; }

  const Trace* begin() const { return log_->traces.data() + start_; }
  const Trace* end() const { return log_->traces.data() + start_ + n_; }

 private:
  const EventLog* log_;
  std::size_t start_;
  std::size_t n_;
};

inline SlidingWindow window_at(const EventLog& log, std::size_t i, std::size_t n) {
  return SlidingWindow(log, i, n);
}

using ActivityPair = std::pair<std::string, std::string>;
using DfrSet = std::set<ActivityPair>;

/// Directly-follows relations: all pairs (a, b) where b immediately
/// follows a in some trace of the window.
inline DfrSet extract_dfr(const SlidingWindow& window) {
  DfrSet dfr;
  for (const Trace& trace : window) {
    for (std::size_t i = 0; i + 1 < trace.events.size(); ++i) {
      dfr.emplace(trace.events[i].activity, trace.events[i + 1].activity);
    }
  }
  return dfr;
}

enum class LogFormat { xes, csv };

namespace detail {

// ---- RFC 3339 timestamps ----------------------------------------------

inline std::int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  const int era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153u * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097LL + static_cast<int>(doe) - 719468;
}

inline void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
  m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
  y = static_cast<int>(yy + (m <= 2));
}

inline std::int64_t parse_rfc3339_ms(const std::string& s) {
  int y, mo, d, h, mi;
  double sec;
  int consumed = 0;
  if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%lf%n", &y, &mo, &d, &h, &mi,
                  &sec, &consumed) != 6) {
    throw parse_error("invalid RFC 3339 timestamp: " + s);
  }
  std::int64_t offset_min = 0;
  std::string rest = s.substr(static_cast<std::size_t>(consumed));
  if (!rest.empty() && rest != "Z" && rest != "z") {
    int oh, om;
    char sign;
    if (std::sscanf(rest.c_str(), "%c%2d:%2d", &sign, &oh, &om) != 3 ||
        (sign != '+' && sign != '-')) {
      throw parse_error("invalid RFC 3339 offset: " + s);
    }
    offset_min = (sign == '-' ? -1 : 1) * (oh * 60LL + om);
  }
  const std::int64_t days = days_from_civil(y, mo, d);
  const double ms = (days * 86400.0 + h * 3600.0 + mi * 60.0 + sec) * 1000.0 -
                    static_cast<double>(offset_min) * 60000.0;
  return static_cast<std::int64_t>(ms >= 0 ? ms + 0.5 : ms - 0.5);
}

inline std::string format_rfc3339_ms(std::int64_t ms) {
  std::int64_t days = ms / 86400000;
  std::int64_t rem = ms % 86400000;
  if (rem < 0) {
    rem += 86400000;
    days -= 1;
  }
  int y, mo, d;
  civil_from_days(days, y, mo, d);
  const int h = static_cast<int>(rem / 3600000);
  const int mi = static_cast<int>(rem / 60000 % 60);
  const int s = static_cast<int>(rem / 1000 % 60);
  const int milli = static_cast<int>(rem % 1000);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", y, mo, d,
                h, mi, s, milli);
  return buf;
}

// ---- CSV (RFC 4180) ----------------------------------------------------

inline std::vector<std::string> split_csv_row(const std::string& line,
                                              std::size_t line_no) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      if (!cur.empty())
        throw parse_error("line " + std::to_string(line_no) +
                          ": quote inside unquoted field");
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (quoted)
    throw parse_error("line " + std::to_string(line_no) + ": unterminated quote");
  fields.push_back(std::move(cur));
  return fields;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

inline void synthesize_timestamps(EventLog& log) {
  std::int64_t counter = 0;
  for (Trace& trace : log.traces) {
    for (Event& ev : trace.events) {
      if (!ev.timestamp_ms) ev.timestamp_ms = counter;
      ++counter;
    }
  }
}

}  // namespace detail

inline EventLog parse_log_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw parse_error("empty CSV input");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = detail::split_csv_row(line, line_no);
  int idx_case = -1, idx_act = -1, idx_ts = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "case_id") idx_case = static_cast<int>(i);
    else if (header[i] == "activity") idx_act = static_cast<int>(i);
    else if (header[i] == "timestamp") idx_ts = static_cast<int>(i);
  }
  if (idx_case < 0 || idx_act < 0)
    throw parse_error("CSV header must contain case_id and activity columns");

  EventLog log;
  std::unordered_map<std::string, std::size_t> trace_index;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = detail::split_csv_row(line, line_no);
    if (fields.size() < header.size())
      throw parse_error("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(header.size()) + " fields, got " +
                        std::to_string(fields.size()));
    Event ev;
    ev.case_id = fields[static_cast<std::size_t>(idx_case)];
    ev.activity = fields[static_cast<std::size_t>(idx_act)];
    if (ev.activity.empty())
      throw parse_error("line " + std::to_string(line_no) + ": empty activity");
    if (idx_ts >= 0 && !fields[static_cast<std::size_t>(idx_ts)].empty()) {
      try {
        ev.timestamp_ms = std::stoll(fields[static_cast<std::size_t>(idx_ts)]);
      } catch (const std::exception&) {
        throw parse_error("line " + std::to_string(line_no) +
                          ": timestamp is not an integer");
      }
    }
    auto [it, inserted] = trace_index.try_emplace(ev.case_id, log.traces.size());
    if (inserted) log.traces.push_back(Trace{ev.case_id, {}});
    log.traces[it->second].events.push_back(std::move(ev));
  }
  if (log.traces.empty()) throw parse_error("CSV contains no events");
  detail::synthesize_timestamps(log);
  return log;
}

inline EventLog parse_log_xes(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree doc;
  try {
    pt::read_xml(in, doc);
  } catch (const pt::xml_parser_error& e) {
    throw parse_error(std::string("malformed XES: ") + e.what());
  }
  const auto log_node = doc.get_child_optional("log");
  if (!log_node) throw parse_error("XES: missing <log> root element");

  EventLog log;
  for (const auto& [tag, trace_node] : *log_node) {
    if (tag != "trace") continue;
    Trace trace;
    for (const auto& [child_tag, child] : trace_node) {
      if (child_tag == "string") {
        if (child.get<std::string>("<xmlattr>.key", "") == "concept:name")
          trace.id = child.get<std::string>("<xmlattr>.value", "");
      } else if (child_tag == "event") {
        Event ev;
        for (const auto& [attr_tag, attr] : child) {
          const auto key = attr.get<std::string>("<xmlattr>.key", "");
          if (attr_tag == "string" && key == "concept:name") {
            ev.activity = attr.get<std::string>("<xmlattr>.value", "");
          } else if (attr_tag == "date" && key == "time:timestamp") {
            ev.timestamp_ms = detail::parse_rfc3339_ms(
                attr.get<std::string>("<xmlattr>.value", ""));
          }
        }
        if (ev.activity.empty())
          throw parse_error("XES: <event> without concept:name in trace '" +
                            trace.id + "'");
        ev.case_id = trace.id;
        trace.events.push_back(std::move(ev));
      }
    }
    log.traces.push_back(std::move(trace));
  }
  if (log.traces.empty()) throw parse_error("XES contains no traces");
  if (std::all_of(log.traces.begin(), log.traces.end(),
                  [](const Trace& t) { return t.id.empty(); })) {
    for (std::size_t i = 0; i < log.traces.size(); ++i)
      log.traces[i].id = "t" + std::to_string(i);
  }
  for (Trace& trace : log.traces)
    for (Event& ev : trace.events) ev.case_id = trace.id;
  detail::synthesize_timestamps(log);
  return log;
}

inline EventLog parse_log(std::istream& in, LogFormat format) {
  return format == LogFormat::csv ? parse_log_csv(in) : parse_log_xes(in);
}

inline void write_log_csv(std::ostream& out, const EventLog& log) {
  out << "case_id,activity,timestamp\n";
  for (const Trace& trace : log.traces) {
    for (const Event& ev : trace.events) {
      out << detail::csv_escape(ev.case_id) << ',' << detail::csv_escape(ev.activity)
          << ',';
      if (ev.timestamp_ms) out << *ev.timestamp_ms;
      out << '\n';
    }
  }
}

inline void write_log_xes(std::ostream& out, const EventLog& log) {
  namespace pt = boost::property_tree;
  pt::ptree doc;
  pt::ptree& log_node = doc.add_child("log", pt::ptree());
  log_node.put("<xmlattr>.xes.version", "1.0");
  for (const Trace& trace : log.traces) {
    pt::ptree trace_node;
    pt::ptree id_attr;
    id_attr.put("<xmlattr>.key", "concept:name");
    id_attr.put("<xmlattr>.value", trace.id);
    trace_node.add_child("string", id_attr);
    for (const Event& ev : trace.events) {
      pt::ptree ev_node;
      pt::ptree act_attr;
      act_attr.put("<xmlattr>.key", "concept:name");
      act_attr.put("<xmlattr>.value", ev.activity);
      ev_node.add_child("string", act_attr);
      if (ev.timestamp_ms) {
        pt::ptree ts_attr;
        ts_attr.put("<xmlattr>.key", "time:timestamp");
        ts_attr.put("<xmlattr>.value", detail::format_rfc3339_ms(*ev.timestamp_ms));
        ev_node.add_child("date", ts_attr);
      }
      trace_node.add_child("event", ev_node);
    }
    log_node.add_child("trace", trace_node);
  }
  pt::write_xml(out, doc,
                pt::xml_writer_settings<std::string>(' ', 2));
}

inline void write_log(std::ostream& out, const EventLog& log, LogFormat format) {
  if (format == LogFormat::csv) write_log_csv(out, log);
  else write_log_xes(out, log);
}

inline EventLog load_log(const std::string& path,
                         std::optional<LogFormat> format = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open log file: " + path);
  LogFormat fmt;
  if (format) {
    fmt = *format;
  } else if (path.size() >= 4 && path.substr(path.size() - 4) == ".csv") {
    fmt = LogFormat::csv;
  } else {
    fmt = LogFormat::xes;
  }
  return parse_log(in, fmt);
}

inline void save_log(const std::string& path, const EventLog& log,
                     LogFormat format) {
  std::ofstream out(path);
  if (!out) throw parse_error("cannot open for writing: " + path);
  write_log(out, log, format);
}

}  // namespace driftscan
