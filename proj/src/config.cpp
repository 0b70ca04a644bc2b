#include "kfol/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "kfol/verify.hpp"

namespace kfol {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Parser {
    std::string source;
    std::map<std::string, int> lines;  // "section.key" -> line

    [[noreturn]] void fail(int line, const std::string& msg) const {
        if (line > 0) throw ConfigError(source + ":" + std::to_string(line) + ": " + msg);
        throw ConfigError(source + ": " + msg);
    }
    [[noreturn]] void fail_key(const std::string& key, const std::string& msg) const {
        const auto it = lines.find(key);
        fail(it == lines.end() ? 0 : it->second, key + ": " + msg);
    }

    double number(const std::string& v, int line) const {
        double x = 0.0;
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
        if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(x))
            fail(line, "expected a number, got '" + v + "'");
        return x;
    }

    int integer(const std::string& v, int line) const {
        int x = 0;
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
        if (ec != std::errc() || ptr != v.data() + v.size()) fail(line, "expected an integer, got '" + v + "'");
        return x;
    }

    std::vector<double> numbers(const std::string& v, int line) const {
        std::vector<double> out;
        std::string item;
        std::istringstream in(v);
        while (std::getline(in, item, ',')) out.push_back(number(trim(item), line));
        if (out.empty()) fail(line, "expected a comma-separated list of numbers");
        return out;
    }

    template <class E>
    E choice(const std::string& v, int line, const std::map<std::string, E>& options) const {
        const auto it = options.find(v);
        if (it != options.end()) return it->second;
        std::string names;
        for (const auto& [name, e] : options) names += (names.empty() ? "" : ", ") + name;
        fail(line, "unknown value '" + v + "', expected one of: " + names);
    }
};

}  // namespace

std::vector<double> RunConfig::k_list() const {
    std::vector<double> ks{k_start};
    if (k_step > 0.0)
        for (int i = 1;; ++i) {
            const double k = k_start + i * k_step;
            if (k >= k_end - 1e-12) break;
            ks.push_back(k);
        }
    ks.push_back(k_end);
    return ks;
}

RunConfig parse_config(const std::string& text, const std::string& source) {
    RunConfig c;
    Parser p{source, {}};
    double rho_min = c.chart.rho_min, rho_max = c.chart.rho_max;
    int n_rho = c.chart.n_rho, n_theta = c.chart.n_theta;

    using Setter = std::function<void(const std::string&, int)>;
    const std::map<std::string, Setter> keys{
        {"run.command",
         [&](const std::string& v, int l) {
             c.command = p.choice<Command>(v, l, {{"sweep", Command::Sweep}, {"continue", Command::Continue},
                                                  {"flow", Command::Flow}, {"export-mesh", Command::ExportMesh},
                                                  {"wedge-check", Command::WedgeCheck}, {"verify", Command::Verify}});
         }},
        {"core.type",
         [&](const std::string& v, int l) {
             c.core = p.choice<CoreKind>(v, l, {{"plane", CoreKind::Plane}, {"wedge", CoreKind::Wedge}});
         }},
        {"core.bend_angle", [&](const std::string& v, int l) { c.bend_angle = p.number(v, l); }},
        {"chart.rho_min", [&](const std::string& v, int l) { rho_min = p.number(v, l); }},
        {"chart.rho_max", [&](const std::string& v, int l) { rho_max = p.number(v, l); }},
        {"chart.n_rho", [&](const std::string& v, int l) { n_rho = p.integer(v, l); }},
        {"chart.n_theta", [&](const std::string& v, int l) { n_theta = p.integer(v, l); }},
        {"leaves.k_start", [&](const std::string& v, int l) { c.k_start = p.number(v, l); }},
        {"leaves.k_end", [&](const std::string& v, int l) { c.k_end = p.number(v, l); }},
        {"leaves.k_step", [&](const std::string& v, int l) { c.k_step = p.number(v, l); }},
        {"leaves.path",
         [&](const std::string& v, int l) {
             c.exact_path = p.choice<bool>(v, l, {{"exact", true}, {"continued", false}});
         }},
        {"solver.dt", [&](const std::string& v, int l) { c.dt = p.number(v, l); }},
        {"solver.tol_det", [&](const std::string& v, int l) { c.tol_det = p.number(v, l); }},
        {"solver.forcing",
         [&](const std::string& v, int l) {
             c.forcing = p.choice<ForcingMode>(
                 v, l, {{"paper-literal", ForcingMode::PaperLiteral}, {"det-normalized", ForcingMode::DetNormalized}});
         }},
        {"solver.det_law",
         [&](const std::string& v, int l) {
             c.det_law = p.choice<DetLaw>(
                 v, l, {{"mode", DetLaw::FromMode}, {"k+t", DetLaw::KPlusT}, {"k*exp(t)", DetLaw::KExpT}, {"off", DetLaw::Off}});
         }},
        {"perturbation.amplitude", [&](const std::string& v, int l) { c.perturb_amplitude = p.number(v, l); }},
        {"perturbation.frequency", [&](const std::string& v, int l) { c.perturb_frequency = p.integer(v, l); }},
        {"flow.a0", [&](const std::string& v, int l) { c.a0 = p.numbers(v, l); }},
        {"flow.t_max", [&](const std::string& v, int l) { c.t_max = p.number(v, l); }},
        {"flow.t_step", [&](const std::string& v, int l) { c.t_step = p.number(v, l); }},
        {"wedge.distances", [&](const std::string& v, int l) { c.wedge_distances = p.numbers(v, l); }},
        {"verify.suite", [&](const std::string& v, int) { c.suite = v; }},
        {"mesh.leaf",
         [&](const std::string& v, int l) {
             c.mesh_leaf = p.choice<MeshLeaf>(v, l, {{"core", MeshLeaf::Core}, {"start", MeshLeaf::Start},
                                                     {"final", MeshLeaf::Final}});
         }},
        {"outputs.csv", [&](const std::string& v, int) { c.csv = v; }},
        {"outputs.mesh", [&](const std::string& v, int) { c.mesh = v; }},
        {"outputs.report", [&](const std::string& v, int) { c.report = v; }},
    };

    std::istringstream in(text);
    std::string raw, section;
    for (int line = 1; std::getline(in, raw); ++line) {
        const std::string s = trim(raw.substr(0, raw.find('#')));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') p.fail(line, "unterminated section header");
            section = trim(s.substr(1, s.size() - 2));
            if (section.empty()) p.fail(line, "empty section name");
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) p.fail(line, "expected 'key = value'");
        if (section.empty()) p.fail(line, "key outside of any [section]");
        const std::string key = section + "." + trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        const auto it = keys.find(key);
        if (it == keys.end()) p.fail(line, "unknown key '" + key + "'");
        if (p.lines.count(key)) p.fail(line, "duplicate key '" + key + "'");
        if (value.empty()) p.fail(line, "empty value for '" + key + "'");
        p.lines[key] = line;
        it->second(value, line);
    }

    if (!(rho_min > 0.0)) p.fail_key("chart.rho_min", "must be positive");
    if (!(rho_max > rho_min)) p.fail_key("chart.rho_max", "must exceed rho_min");
    if (n_rho < 5) p.fail_key("chart.n_rho", "must be at least 5");
    if (n_theta < 8) p.fail_key("chart.n_theta", "must be at least 8");
    c.chart = BasePlaneChart(rho_min, rho_max, n_rho, n_theta);

    if (!(c.k_start > 0.0 && c.k_start < 1.0)) p.fail_key("leaves.k_start", "must lie in (0, 1)");
    if (!(c.k_end > 0.0 && c.k_end < 1.0)) p.fail_key("leaves.k_end", "must lie in (0, 1)");
    if (!(c.k_end > c.k_start)) p.fail_key("leaves.k_end", "must exceed k_start");
    if (c.k_step < 0.0) p.fail_key("leaves.k_step", "must not be negative");
    if (!(c.dt > 0.0)) p.fail_key("solver.dt", "must be positive");
    if (!(c.tol_det > 0.0)) p.fail_key("solver.tol_det", "must be positive");
    if (c.core == CoreKind::Wedge && !(c.bend_angle >= 0.0 && c.bend_angle < M_PI))
        p.fail_key("core.bend_angle", "must lie in [0, pi)");
    if (c.perturb_frequency < 0) p.fail_key("perturbation.frequency", "must not be negative");
    if (c.a0.size() == 2) c.a0 = {c.a0[0], 0.0, 0.0, c.a0[1]};
    if (c.a0.size() != 4) p.fail_key("flow.a0", "expected 2 (diagonal) or 4 (row-major) entries");
    if (std::abs(c.a0[1] - c.a0[2]) > 1e-12) p.fail_key("flow.a0", "must be symmetric");
    {
        const double tr = c.a0[0] + c.a0[3], det = c.a0[0] * c.a0[3] - c.a0[1] * c.a0[2];
        if (!(tr > 0.0 && det > 0.0)) p.fail_key("flow.a0", "must be positive definite");
    }
    if (!(c.t_max > 0.0)) p.fail_key("flow.t_max", "must be positive");
    if (!(c.t_step > 0.0)) p.fail_key("flow.t_step", "must be positive");
    for (double d : c.wedge_distances)
        if (!(d > 0.0)) p.fail_key("wedge.distances", "distances must be positive");

    switch (c.command) {
        case Command::Sweep:
        case Command::Continue:
        case Command::Flow:
            if (c.csv.empty()) p.fail_key("outputs.csv", "required by this command");
            break;
        case Command::ExportMesh:
            if (c.mesh.empty()) p.fail_key("outputs.mesh", "required by this command");
            break;
        case Command::WedgeCheck:
            if (c.core != CoreKind::Wedge) p.fail_key("core.type", "wedge-check needs a wedge core");
            break;
        case Command::Verify:
            if (!is_suite(c.suite)) p.fail_key("verify.suite", "unknown suite '" + c.suite + "'");
            break;
    }
    if (c.core == CoreKind::Wedge && (c.command == Command::Sweep || c.command == Command::Continue ||
                                      c.command == Command::ExportMesh))
        p.fail_key("core.type", "leaves over a wedge core are not graphs over the chart");
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path);
}

}  // namespace kfol
