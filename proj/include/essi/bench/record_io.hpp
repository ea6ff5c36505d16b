#pragma once

#include "essi/bo.hpp"

#include <filesystem>
#include <string>

namespace essi::bench {

inline constexpr int kRecordFormatVersion = 1;

/// Line-oriented CSV: '#'-prefixed header lines (format version, column
/// list, config as JSON, digests, status), then one row per evaluation:
/// iteration, worker_slot, x_1..x_d, f, f_min_so_far, t_acq_ms, t_fit_ms.
/// `config_json` is stored verbatim on the config header line.
std::string format_run_record(const RunRecord &record, const std::string &config_json = "{}");

/// Parses the output of format_run_record. Query and fantasy traces are not
/// stored and come back empty.
RunRecord parse_run_record(const std::string &text);

void write_run_record(const RunRecord &record, const std::filesystem::path &path,
                      const std::string &config_json = "{}");
RunRecord read_run_record(const std::filesystem::path &path);

std::string run_status_name(RunStatus status);

}  // namespace essi::bench
