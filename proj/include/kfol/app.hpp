// Command dispatch, table and mesh writers for the command-line tool.
#pragma once

#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "kfol/config.hpp"
#include "kfol/foliation.hpp"
#include "kfol/verify.hpp"

namespace kfol {

enum ExitCode : int { kExitOk = 0, kExitInvalidConfig = 1, kExitSolverAbort = 2, kExitVerificationFailed = 3 };

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Writes to a temporary sibling first and renames it over path.
void write_atomic(const std::string& path, const std::string& content);

/// k,t,det_min,det_max,dist_min,dist_max,area,volume with %.12g fields.
std::string leaves_csv(const std::vector<LeafRecord>& rows);

/// ASCII PLY in ball-model coordinates; quads follow the chart grid and wrap
/// in theta.
std::string mesh_ply(const BasePlaneChart& chart, const std::vector<MinkVector>& points);

/// Start graph of a continuation: the Fuchsian leaf at k_start plus the
/// configured perturbation, which vanishes to fourth order at both rims.
FermiGraph start_graph(const RunConfig& cfg);

int run_config(const RunConfig& cfg, std::ostream& out, std::ostream& err);
/// Loads, validates and runs; every failure is mapped to an exit code.
int run_file(const std::string& path, std::ostream& out, std::ostream& err);
int run_verify(const std::string& suite, const VerifyOptions& opt, const std::string& report, std::ostream& out,
               std::ostream& err);

}  // namespace kfol
