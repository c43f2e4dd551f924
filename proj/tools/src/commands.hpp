#pragma once

#include <filesystem>
#include <ostream>

#include "config.hpp"

namespace posmom::cli {

/// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitSolverFailure = 2;
inline constexpr int kExitUsage = 64;

/// Runs one job and writes its outputs under config.output_dir.
int run(const RunConfig& config, std::ostream& log);

/// Errors of run A against reference run B (final snapshot of each
/// fields.csv) into `output_dir`/errors.csv. B may be finer than A by an
/// integer factor per axis; it is block-averaged onto A's mesh.
int compare(const std::filesystem::path& run_a, const std::filesystem::path& run_b,
            const std::filesystem::path& output_dir, std::ostream& log);

/// Cartesian product over sweep.M, sweep.nx, sweep.kn; one run per point in
/// a subdirectory of output.dir, summarized in sweep.csv.
int sweep(const Config& base, std::ostream& log);

}  // namespace posmom::cli
