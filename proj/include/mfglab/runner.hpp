#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mfglab/scenario.hpp"

// Scenario execution: dispatches a validated Scenario to the solver
// modules and writes diagnostics.csv (time series, shortest round-trip
// number formatting), final_state.json (fields with grid metadata), and
// manifest.json (reproducibility record with content digests). All files
// are written atomically (temp + rename). Identical scenario and seed
// reproduce byte-identical CSV content.

namespace mfg {

struct FileRecord {
  std::string name;
  std::size_t bytes = 0;
  /// FNV-1a 64 over the file's bytes, as 16 hex digits.
  std::string fnv1a64;
};

struct RunManifest {
  std::string scenario_name;
  std::string kind;
  std::string directory;
  std::string artifact_version;
  std::string rng_algorithm;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::size_t>> grids;
  double wall_seconds = 0.0;
  /// False when the run failed; `error` then carries the context.
  bool complete = false;
  std::string error;
  std::vector<FileRecord> files;
};

struct SweepRun {
  double value = 0.0;
  bool ok = false;
  std::string directory;
  std::string error;
  RunManifest manifest;
};

struct SweepResult {
  std::vector<SweepRun> runs;
  bool partial_failure = false;
  std::string aggregate_path;
};

/// Shortest round-trip decimal representation.
std::string format_double(double v);

std::string fnv1a64_hex(const std::string& bytes);

/// Runs one scenario into its output directory. Module errors are
/// rethrown with scenario context after a manifest flagging the partial
/// run has been written.
RunManifest run_scenario(const Scenario& s);

/// Independent runs of `base` with `axis` set to each value, executed by
/// a worker pool into run_### subdirectories, plus an aggregate CSV
/// joining the axis to each run's final diagnostics row. Failed runs are
/// recorded and skipped. An empty value list is a no-op with an empty
/// aggregate.
SweepResult sweep(const Scenario& base, const std::string& axis,
                  const std::vector<double>& values);

}  // namespace mfg
