#pragma once

// Run configuration, snapshot files, run manifest and golden comparison.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kapila/cases.hpp"

namespace kapila {

inline constexpr const char* kVersion = "1.0.0";

/// Snapshot or golden files whose shapes differ.
class ShapeMismatchError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::string case_id = "3";
  int nx = 0;
  int ny = 0;
  bool full_domain = false;
  std::optional<double> cfl;
  std::optional<double> kappa;
  std::optional<double> c_im;
  std::optional<double> t_end;
  std::vector<double> snapshot_times;  // empty: the case defaults
  std::string output_dir = "out";
  int workers = 1;
  std::string format = "csv";

  void validate() const;
};

/// Flat key = value text; '#' starts a comment.  Unknown keys are errors.
RunConfig parse_run_config(const std::string& text, RunConfig base = {});
RunConfig load_run_config(const std::string& path, RunConfig base = {});

/// Case spec with the config overrides applied.
ProblemSpec resolve_spec(const RunConfig& config);

struct SnapshotData {
  std::map<std::string, std::string> header;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  double time() const;
  std::size_t column(const std::string& name) const;
};

std::vector<std::string> snapshot_columns(bool two_d);

/// Write the current state of `solver` as a snapshot.
void write_snapshot(const std::string& path, const Solver& solver, const ProblemSpec& spec);
SnapshotData read_snapshot(const std::string& path);
SnapshotData parse_snapshot(const std::string& text);

struct FieldDiff {
  std::string field;
  double l1 = 0.0;    // mean absolute difference
  double linf = 0.0;  // max absolute difference
  bool pass = true;
};

struct CompareReport {
  std::vector<FieldDiff> fields;
  bool pass = true;
};

struct CompareTolerance {
  double l1 = 1e-6;
  double linf = 1e-6;
};

CompareReport compare_snapshots(const SnapshotData& a, const SnapshotData& b,
                                const CompareTolerance& tol);
CompareReport compare_golden(const std::string& snapshot, const std::string& golden,
                             const CompareTolerance& tol);

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitSolverFailure = 1;
inline constexpr int kExitConfigError = 2;

struct RunResult {
  int exit_code = kExitOk;
  std::string message;
  std::vector<std::string> snapshots;
  std::string manifest;
};

/// Simulate, writing snapshots and manifest.json into config.output_dir.
/// On solver failure the last good state is dumped to failure_dump.csv.
RunResult run(const RunConfig& config);

}  // namespace kapila
