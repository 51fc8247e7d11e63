#include "mfb/csv.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace mfb {

std::string format_number(double value) {
  if (value == 0.0) return "0";  // folds -0 as well
  char buf[400];
  // Plain decimals for the magnitudes budgets and regrets live in; the
  // shortest round-trip form otherwise.
  const double mag = std::fabs(value);
  auto res = mag >= 1e-6 && mag < 1e15 ? std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed)
                                       : std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

double parse_number(const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw std::runtime_error("not a number: '" + text + "'");
  return v;
}

namespace {

constexpr const char* kRunsHeader =
    "run_id,seed,method,budget,regret,lf_calls,hf_calls,continuation_calls,coverage_held";

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

Count parse_count(const std::string& text) {
  Count v = 0;
  const char* end = text.data() + text.size();
  auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw std::runtime_error("not a count: '" + text + "'");
  return v;
}

}  // namespace

void write_runs_csv(std::ostream& out, const std::vector<RunRow>& rows) {
  out << kRunsHeader << '\n';
  for (const auto& r : rows) {
    out << r.run_id << ',' << r.seed << ',' << r.method << ',' << format_number(r.budget) << ','
        << format_number(r.regret) << ',' << r.low_calls << ',' << r.high_calls << ',' << r.continuation_calls << ','
        << (r.coverage_held ? 1 : 0) << '\n';
  }
}

void write_summary_csv(std::ostream& out, const SummaryStats& stats) {
  out << "method,budget,mean,se\n";
  for (const auto& m : stats.methods) {
    out << m.method << ',' << format_number(m.budget) << ',' << format_number(m.mean) << ',' << format_number(m.se)
        << '\n';
  }
}

void write_paired_csv(std::ostream& out, const SummaryStats& stats) {
  out << "method_a,method_b,budget,mean_diff,ci_lo,ci_hi\n";
  for (const auto& p : stats.paired) {
    out << p.method_a << ',' << p.method_b << ',' << format_number(p.budget) << ',' << format_number(p.mean_diff)
        << ',' << format_number(p.ci_lo) << ',' << format_number(p.ci_hi) << '\n';
  }
}

std::vector<RunRow> read_runs_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kRunsHeader) throw std::runtime_error("runs.csv: unexpected header");
  std::vector<RunRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 9) {
      throw std::runtime_error("runs.csv line " + std::to_string(lineno) + ": expected 9 fields");
    }
    RunRow r;
    r.run_id = cells[0];
    r.seed = parse_count(cells[1]);
    r.method = cells[2];
    r.budget = parse_number(cells[3]);
    r.regret = parse_number(cells[4]);
    r.low_calls = parse_count(cells[5]);
    r.high_calls = parse_count(cells[6]);
    r.continuation_calls = parse_count(cells[7]);
    if (cells[8] != "0" && cells[8] != "1") {
      throw std::runtime_error("runs.csv line " + std::to_string(lineno) + ": coverage_held must be 0 or 1");
    }
    r.coverage_held = cells[8] == "1";
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_outputs(const std::string& dir, const std::vector<RunRow>& rows, const SummaryStats& stats) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());

  auto emit = [&](const char* name, auto&& writer) {
    const fs::path path = fs::path(dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    writer(out);
    out.flush();
    if (!out) throw std::runtime_error("error while writing " + path.string());
  };
  emit("runs.csv", [&](std::ostream& o) { write_runs_csv(o, rows); });
  emit("summary.csv", [&](std::ostream& o) { write_summary_csv(o, stats); });
  emit("paired.csv", [&](std::ostream& o) { write_paired_csv(o, stats); });
}

}  // namespace mfb
