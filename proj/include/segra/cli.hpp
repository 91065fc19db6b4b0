#pragma once

#include <cstdint>
#include <string>

#include "segra/discount.hpp"
#include "segra/types.hpp"

namespace segra {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNotConverged = 3;
inline constexpr int kExitNoCandidates = 4;

struct RunConfig {
  int d = 0;
  Real tau = 0.9;
  int k = 10;
  DiscountKind discount = DiscountKind::Uniform;
  Real tol = 1e-8;
  long max_iter = 0;  // 0 = auto
  std::uint64_t seed = 42;
  std::string algorithm = "heu";  // heu | bsl1 | bsl2 | rnd | brute
  int threads = 0;                // 0 = hardware concurrency
  std::size_t guard = 2000;
  std::string out_dir = ".";
  std::size_t cache_cap = 0;
  bool no_timing = false;  // zero wall_time_ms columns for byte-stable output
  bool dump_z = false;

  std::string labels_path;
  std::string relevance_path;
  std::string graph_path;
  std::string edges_path;  // gadget input
  int samples = 20;        // verify
  long trials = 100000;    // verify

  void validate() const;  // throws ConfigError on out-of-range values
  int resolved_threads() const;
};

// Ingest relevance + labels, write graph dump, remap sidecar and validation
// report under out_dir. Returns kExitValidation when validation fails.
int run_build(const RunConfig& config);

// Run the selected algorithm; writes trace.csv, distribution files and
// summary.json under out_dir.
int run_optimize(const RunConfig& config);

// Cross-check the iterative solver, the closed-form per-op decrease and the
// Monte-Carlo walker against each other on the given graph.
int run_verify(const RunConfig& config);

// Build the vertex-cover gadget from an undirected edge list, run k-rewiring
// and report the final segregation against the 2.75 / 2.5 cover thresholds.
int run_gadget(const RunConfig& config);

}  // namespace segra
