// Run configuration: "[section]" headers, "key = value" lines, '#' comments.
#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "kfol/continuation.hpp"
#include "kfol/surfcalc.hpp"

namespace kfol {

/// Parse or validation failure; the message carries "file:line: ".
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Command { Sweep, Continue, Flow, ExportMesh, WedgeCheck, Verify };
enum class CoreKind { Plane, Wedge };
enum class MeshLeaf { Core, Start, Final };

struct RunConfig {
    Command command = Command::Sweep;

    CoreKind core = CoreKind::Plane;
    double bend_angle = 0.0;

    BasePlaneChart chart;

    double k_start = 0.25;
    double k_end = 0.5;
    double k_step = 0.0;  // 0: just the two end points
    double dt = 1e-2;
    double tol_det = 1e-4;
    ForcingMode forcing = ForcingMode::DetNormalized;
    DetLaw det_law = DetLaw::FromMode;
    bool exact_path = true;  // sweep only

    double perturb_amplitude = 0.0;
    int perturb_frequency = 1;

    std::vector<double> a0{0.5, 0.0, 0.0, 0.5};  // row-major
    double t_max = 2.0;
    double t_step = 0.1;

    std::vector<double> wedge_distances{0.1, 0.5, 1.0, 2.0};

    std::string suite;
    MeshLeaf mesh_leaf = MeshLeaf::Start;

    std::string csv;
    std::string mesh;  // prefix, ".ply" is appended
    std::string report;

    /// k_start, k_start + k_step, ... up to k_end, always ending at k_end.
    std::vector<double> k_list() const;
};

RunConfig parse_config(const std::string& text, const std::string& source = "config");
RunConfig load_config(const std::string& path);

}  // namespace kfol
