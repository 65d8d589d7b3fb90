#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "tiltmin/config.hpp"

namespace tiltmin {

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

/// Ordered `key = value` report plus flat tables for plotting.
class Report {
 public:
  void set(std::string key, std::string value);
  void set(std::string key, double value);
  void set(std::string key, const Vector& value);
  void set_int(std::string key, long long value);
  void set_bool(std::string key, bool value);
  Table& table(std::string name, std::vector<std::string> columns);

  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
  const std::vector<Table>& tables() const { return tables_; }
  std::string text() const;

  /// Writes report.txt and one <name>.csv per table into `dir`.
  void write(const std::filesystem::path& dir) const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::vector<Table> tables_;
};

std::string table_csv(const Table& t);

/// Recovers the embedded config from report text (the `config.` lines).
std::vector<Assignment> embedded_config(const std::string& report_text, const std::string& source);

struct RunOutcome {
  int exit_code = 0;
  Report report;
};

/// Runs the configured experiment. Runtime errors are captured into a partial
/// report with exit code 1; MULTIPLE_FOUND (or a non-empty sweep) gives 2.
RunOutcome run_experiment(const ExperimentConfig& config, int jobs);

/// Entry point behind the `tiltmin` executable.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tiltmin
