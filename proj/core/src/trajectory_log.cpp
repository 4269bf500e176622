#include "hydrodyn/trajectory_log.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hydrodyn/errors.hpp"

namespace hydrodyn {

namespace {

std::vector<std::string> canonical_header() {
  std::vector<std::string> cols;
  cols.emplace_back("t");
  for (std::size_t j = 0; j < kNumJoints; ++j) {
    cols.push_back("q_" + std::to_string(j));
    cols.push_back("q_des_" + std::to_string(j));
    cols.push_back("qd_" + std::to_string(j));
    cols.push_back("tau_" + std::to_string(j));
  }
  return cols;
}

void append_value(std::string& out, double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof(buf), "%.17g", v);
  out.append(buf, static_cast<std::size_t>(n));
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

double parse_field(const std::string& field, std::size_t line_no) {
  const char* begin = field.data();
  const char* end = begin + field.size();
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw CsvError("line " + std::to_string(line_no) +
                   ": malformed numeric field '" + field + "'");
  }
  return value;
}

}  // namespace

void TrajectoryLog::reserve(std::size_t n) {
  t.reserve(n);
  for (auto& s : joints) {
    s.q.reserve(n);
    s.q_des.reserve(n);
    s.qd.reserve(n);
    s.tau.reserve(n);
  }
}

void TrajectoryLog::push_row(double time,
                             const std::array<JointSnapshot, kNumJoints>& row) {
  t.push_back(time);
  for (std::size_t j = 0; j < kNumJoints; ++j) {
    joints[j].q.push_back(row[j].q);
    joints[j].q_des.push_back(row[j].q_des);
    joints[j].qd.push_back(row[j].qd);
    joints[j].tau.push_back(row[j].tau);
  }
}

void write_trajectory_csv(const TrajectoryLog& log, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CsvError("cannot open for write: " + path);

  std::string line;
  const auto header = canonical_header();
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) line += ',';
    line += header[i];
  }
  if (log.reference) line += ",ref";
  line += '\n';
  out << line;

  for (std::size_t i = 0; i < log.size(); ++i) {
    line.clear();
    append_value(line, log.t[i]);
    for (std::size_t j = 0; j < kNumJoints; ++j) {
      const JointSeries& s = log.joints[j];
      line += ',';
      append_value(line, s.q[i]);
      line += ',';
      append_value(line, s.q_des[i]);
      line += ',';
      append_value(line, s.qd[i]);
      line += ',';
      append_value(line, s.tau[i]);
    }
    if (log.reference) {
      line += ',';
      append_value(line, (*log.reference)[i]);
    }
    line += '\n';
    out << line;
  }
  if (!out) throw CsvError("write failed: " + path);
}

TrajectoryLog parse_trajectory_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError("cannot open: " + path);

  std::string line;
  if (!std::getline(in, line)) throw CsvError("empty file: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const auto expected = canonical_header();
  const auto fields = split_csv(line);
  bool has_ref = false;
  if (fields.size() == expected.size() + 1 && fields.back() == "ref") {
    has_ref = true;
  } else if (fields.size() != expected.size()) {
    throw CsvError("header has " + std::to_string(fields.size()) +
                   " columns, expected " + std::to_string(expected.size()) +
                   " (or +1 trailing 'ref')");
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (fields[i] != expected[i]) {
      throw CsvError("header column " + std::to_string(i + 1) + " is '" +
                     fields[i] + "', expected '" + expected[i] + "'");
    }
  }

  TrajectoryLog log;
  if (has_ref) log.reference.emplace();

  const std::size_t n_cols = expected.size() + (has_ref ? 1 : 0);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;

    const auto row = split_csv(line);
    if (row.size() != n_cols) {
      throw CsvError("line " + std::to_string(line_no) + ": has " +
                     std::to_string(row.size()) + " fields, expected " +
                     std::to_string(n_cols));
    }

    const double time = parse_field(row[0], line_no);
    if (!log.t.empty() && time <= log.t.back()) {
      throw CsvError("line " + std::to_string(line_no) +
                     ": non-monotonic timestamp");
    }
    log.t.push_back(time);

    std::size_t col = 1;
    for (std::size_t j = 0; j < kNumJoints; ++j) {
      JointSeries& s = log.joints[j];
      s.q.push_back(parse_field(row[col++], line_no));
      s.q_des.push_back(parse_field(row[col++], line_no));
      s.qd.push_back(parse_field(row[col++], line_no));
      s.tau.push_back(parse_field(row[col++], line_no));
    }
    if (has_ref) log.reference->push_back(parse_field(row[col], line_no));
  }
  return log;
}

}  // namespace hydrodyn
