#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "surprise/tables.hpp"

namespace surprise {

enum class OutputFormat { tsv, json };

// '#'-prefixed TSV header carrying tool version, subcommand, seed and flags;
// identical invocations must produce byte-identical reports, so nothing
// time- or host-dependent belongs here.
std::string report_header(const std::string& command, std::uint64_t seed,
                          const std::vector<std::string>& flags);

// statistics print with two decimals, matching the reference tables
std::string format_statistic(double value);
// p-values keep four significant figures, switching to scientific when small
std::string format_p(double p);

std::string test_result_tsv(const TestResult& result);
std::string test_result_json(const TestResult& result);

void write_output(const std::string& path, const std::string& content);  // "-" = stdout

}  // namespace surprise
