#include "essi/bench/record_io.hpp"

#include <charconv>
#include <fstream>
#include <json.hpp>
#include <sstream>

namespace essi::bench {

namespace {

using nlohmann::json;

std::string number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_number(const std::string &s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::runtime_error("run record: bad number '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string &line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  return out;
}

RunStatus parse_status(const std::string &s) {
  if (s == "complete") return RunStatus::complete;
  if (s == "aborted") return RunStatus::aborted;
  throw std::runtime_error("run record: unknown status '" + s + "'");
}

}  // namespace

std::string run_status_name(RunStatus status) { return status == RunStatus::complete ? "complete" : "aborted"; }

std::string format_run_record(const RunRecord &record, const std::string &config_json) {
  std::ostringstream out;
  std::string columns = "iteration,worker_slot";
  for (Eigen::Index j = 1; j <= record.dim; ++j) columns += ",x_" + std::to_string(j);
  columns += ",f,f_min_so_far,t_acq_ms,t_fit_ms";

  const json meta = {{"algorithm", record.algorithm}, {"problem", record.problem}, {"dim", record.dim},
                     {"n_init", record.n_init},       {"q", record.q},             {"seed", record.seed},
                     {"config_digest", record.config_digest}, {"failure", record.failure}};
  out << "# essi-run-record " << kRecordFormatVersion << '\n';
  out << "# columns: " << columns << '\n';
  out << "# run: " << meta.dump() << '\n';
  out << "# config: " << config_json << '\n';
  out << "# status: " << run_status_name(record.status) << '\n';
  out << "# digest: " << record.digest() << '\n';
  out << columns << '\n';

  double running = std::numeric_limits<double>::infinity();
  for (const auto &e : record.evaluations) {
    running = std::min(running, e.f);
    const IterationTiming timing = e.iteration < record.timings.size() ? record.timings[e.iteration] : IterationTiming{};
    out << e.iteration << ',' << e.worker_slot;
    for (Eigen::Index j = 0; j < e.x.size(); ++j) out << ',' << number(e.x[j]);
    out << ',' << number(e.f) << ',' << number(running) << ',' << number(timing.acquisition_ms) << ','
        << number(timing.fit_ms) << '\n';
  }
  return out.str();
}

RunRecord parse_run_record(const std::string &text) {
  std::istringstream in(text);
  std::string line;
  RunRecord record;
  std::optional<std::string> stored_digest;
  bool have_version = false;
  bool have_run = false;
  bool have_columns_row = false;

  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto colon = line.find(':');
      if (line.rfind("# essi-run-record ", 0) == 0) {
        const int version = std::stoi(line.substr(18));
        if (version != kRecordFormatVersion)
          throw std::runtime_error("run record: unsupported format version " + std::to_string(version));
        have_version = true;
      } else if (colon != std::string::npos) {
        const std::string key = line.substr(2, colon - 2);
        const std::string value = line.substr(colon + 2);
        if (key == "run") {
          const json meta = json::parse(value);
          record.algorithm = meta.at("algorithm").get<std::string>();
          record.problem = meta.at("problem").get<std::string>();
          record.dim = meta.at("dim").get<Eigen::Index>();
          record.n_init = meta.at("n_init").get<Eigen::Index>();
          record.q = meta.at("q").get<std::size_t>();
          record.seed = meta.at("seed").get<Seed>();
          record.config_digest = meta.at("config_digest").get<std::string>();
          record.failure = meta.at("failure").get<std::string>();
          have_run = true;
        } else if (key == "status") {
          record.status = parse_status(value);
        } else if (key == "digest") {
          stored_digest = value;
        }
      }
      continue;
    }
    if (!have_version || !have_run) throw std::runtime_error("run record: missing header");
    if (!have_columns_row) {
      have_columns_row = true;
      continue;
    }
    const auto cells = split(line);
    const auto d = static_cast<std::size_t>(record.dim);
    if (cells.size() != d + 6)
      throw std::runtime_error("run record: expected " + std::to_string(d + 6) + " columns, got " +
                               std::to_string(cells.size()));
    Evaluation e;
    e.iteration = std::stoull(cells[0]);
    e.worker_slot = std::stoull(cells[1]);
    e.x.resize(record.dim);
    for (std::size_t j = 0; j < d; ++j) e.x[static_cast<Eigen::Index>(j)] = parse_number(cells[2 + j]);
    e.f = parse_number(cells[2 + d]);
    const double f_min = parse_number(cells[3 + d]);
    const IterationTiming timing{parse_number(cells[4 + d]), parse_number(cells[5 + d])};
    if (record.incumbent_trace.size() < e.iteration + 1) {
      record.incumbent_trace.resize(e.iteration + 1, f_min);
      record.timings.resize(e.iteration + 1, timing);
    }
    record.incumbent_trace[e.iteration] = f_min;
    record.evaluations.push_back(std::move(e));
  }
  if (!have_version || !have_run) throw std::runtime_error("run record: missing header");
  if (stored_digest && *stored_digest != record.digest())
    throw std::runtime_error("run record: digest mismatch (stored " + *stored_digest + ", recomputed " +
                             record.digest() + ")");
  return record;
}

void write_run_record(const RunRecord &record, const std::filesystem::path &path, const std::string &config_json) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << format_run_record(record, config_json);
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

RunRecord read_run_record(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_run_record(text.str());
}

}  // namespace essi::bench
