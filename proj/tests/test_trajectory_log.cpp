#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "hydrodyn/errors.hpp"
#include "hydrodyn/trajectory_log.hpp"

using namespace hydrodyn;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / name;
}

TrajectoryLog random_log(std::size_t rows, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-100.0, 100.0);
  TrajectoryLog log;
  log.reserve(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    std::array<JointSnapshot, kNumJoints> row;
    for (auto& s : row) s = {uni(rng), uni(rng), uni(rng), uni(rng)};
    log.push_row(static_cast<double>(i) * kLogDt, row);
  }
  return log;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("csv write/parse round trip is value-identical") {
  TrajectoryLog log = random_log(50, 21);
  const auto path = temp_file("rt_log.csv");
  write_trajectory_csv(log, path.string());
  const TrajectoryLog back = parse_trajectory_csv(path.string());

  REQUIRE(back.size() == log.size());
  for (std::size_t i = 0; i < log.size(); ++i) {
    CHECK(back.t[i] == log.t[i]);
    for (std::size_t j = 0; j < kNumJoints; ++j) {
      CHECK(back.joints[j].q[i] == log.joints[j].q[i]);
      CHECK(back.joints[j].q_des[i] == log.joints[j].q_des[i]);
      CHECK(back.joints[j].qd[i] == log.joints[j].qd[i]);
      CHECK(back.joints[j].tau[i] == log.joints[j].tau[i]);
    }
  }
  CHECK(!back.reference.has_value());
  fs::remove(path);
}

TEST_CASE("reference column survives the round trip") {
  TrajectoryLog log = random_log(20, 22);
  log.reference.emplace(log.size(), 1.25);
  const auto path = temp_file("rt_ref_log.csv");
  write_trajectory_csv(log, path.string());
  const TrajectoryLog back = parse_trajectory_csv(path.string());
  REQUIRE(back.reference.has_value());
  CHECK(back.reference->at(7) == 1.25);
  fs::remove(path);
}

TEST_CASE("shuffled header is a schema error") {
  TrajectoryLog log = random_log(3, 23);
  const auto path = temp_file("bad_header.csv");
  write_trajectory_csv(log, path.string());

  std::string text = read_file(path);
  const auto pos = text.find("q_0,q_des_0");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 11, "q_des_0,q_0");
  std::ofstream(path) << text;

  CHECK_THROWS_AS(parse_trajectory_csv(path.string()), CsvError);
  fs::remove(path);
}

TEST_CASE("missing column is a schema error naming the count") {
  const auto path = temp_file("short_header.csv");
  std::ofstream(path) << "t,q_0\n0,1\n";
  try {
    parse_trajectory_csv(path.string());
    FAIL("expected CsvError");
  } catch (const CsvError& e) {
    CHECK(std::string(e.what()).find("49") != std::string::npos);
  }
  fs::remove(path);
}

TEST_CASE("NaN field is rejected with its line number") {
  TrajectoryLog log = random_log(40, 24);
  const auto path = temp_file("nan_log.csv");
  write_trajectory_csv(log, path.string());

  // line 37 = header + row 36
  std::string text = read_file(path);
  std::size_t line_start = 0;
  for (int line = 1; line < 37; ++line) {
    line_start = text.find('\n', line_start) + 1;
  }
  const std::size_t comma = text.find(',', line_start);
  const std::size_t next_comma = text.find(',', comma + 1);
  text.replace(comma + 1, next_comma - comma - 1, "NaN");
  std::ofstream(path) << text;

  try {
    parse_trajectory_csv(path.string());
    FAIL("expected CsvError");
  } catch (const CsvError& e) {
    CHECK(std::string(e.what()).find("line 37") != std::string::npos);
  }
  fs::remove(path);
}

TEST_CASE("non-monotonic timestamps are rejected with the line") {
  TrajectoryLog log = random_log(10, 25);
  log.t[5] = log.t[4];  // duplicate timestamp
  const auto path = temp_file("nonmono_log.csv");
  write_trajectory_csv(log, path.string());
  try {
    parse_trajectory_csv(path.string());
    FAIL("expected CsvError");
  } catch (const CsvError& e) {
    CHECK(std::string(e.what()).find("non-monotonic") != std::string::npos);
    CHECK(std::string(e.what()).find("line 7") != std::string::npos);
  }
  fs::remove(path);
}

TEST_CASE("malformed numeric names the line") {
  TrajectoryLog log = random_log(5, 26);
  const auto path = temp_file("garbled_log.csv");
  write_trajectory_csv(log, path.string());
  std::string text = read_file(path);
  const auto pos = text.rfind(',');
  text.replace(pos + 1, text.find('\n', pos) - pos - 1, "12x4");
  std::ofstream(path) << text;
  try {
    parse_trajectory_csv(path.string());
    FAIL("expected CsvError");
  } catch (const CsvError& e) {
    CHECK(std::string(e.what()).find("line 6") != std::string::npos);
  }
  fs::remove(path);
}
