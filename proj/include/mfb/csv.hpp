#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mfb/experiment.hpp"

namespace mfb {

/// Shortest decimal that round-trips to the same double ('.' separator,
/// no grouping, locale independent).
std::string format_number(double value);
double parse_number(const std::string& text);

void write_runs_csv(std::ostream& out, const std::vector<RunRow>& rows);
void write_summary_csv(std::ostream& out, const SummaryStats& stats);
void write_paired_csv(std::ostream& out, const SummaryStats& stats);

/// Inverse of write_runs_csv. Throws std::runtime_error on a malformed file.
std::vector<RunRow> read_runs_csv(std::istream& in);

/// Writes runs.csv, summary.csv and paired.csv into `dir`, creating it if
/// needed. Throws std::runtime_error if a file cannot be written.
void write_outputs(const std::string& dir, const std::vector<RunRow>& rows, const SummaryStats& stats);

}  // namespace mfb
