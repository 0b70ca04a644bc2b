#include <doctest.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include <unistd.h>

#include "kfol/app.hpp"

using namespace kfol;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("kfol_cli_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const std::string& p, const std::string& s) { std::ofstream(p) << s; }

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const TempDir& dir, const std::string& config) {
    const std::string path = dir.file("run.ini");
    spit(path, config);
    std::ostringstream out, err;
    const int code = run_file(path, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::vector<double>> read_csv(const std::string& path, std::string* header = nullptr) {
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    if (header) *header = line;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

TEST_CASE("config parsing") {
    const RunConfig c = parse_config(
        "# sweep\n[run]\ncommand = sweep   # trailing comment\n[chart]\nn_rho = 20\nn_theta = 24\n"
        "[leaves]\nk_start = 0.1\nk_end = 0.5\nk_step = 0.1\n[outputs]\ncsv = out.csv\n");
    CHECK(c.command == Command::Sweep);
    CHECK(c.chart.n_rho == 20);
    CHECK(c.chart.n_theta == 24);
    const std::vector<double> ks = c.k_list();
    REQUIRE(ks.size() == 5);
    CHECK(ks.back() == 0.5);

    auto error_of = [](const std::string& text) {
        try {
            parse_config(text, "cfg");
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string("no error");
    };
    CHECK(error_of("[run]\ncommand = sweep\nbogus = 1\n").rfind("cfg:3:", 0) == 0);
    CHECK(error_of("[run]\ncommand sweep\n").rfind("cfg:2:", 0) == 0);
    CHECK(error_of("command = sweep\n").rfind("cfg:1:", 0) == 0);
    CHECK(error_of("[chart]\nn_rho = 1e2\n").rfind("cfg:2:", 0) == 0);
    CHECK(error_of("[solver]\ndt = fast\n").rfind("cfg:2:", 0) == 0);
    CHECK(error_of("[solver]\ndt = 0.1\ndt = 0.2\n").rfind("cfg:3:", 0) == 0);
    CHECK(error_of("[run]\ncommand = dance\n").rfind("cfg:2:", 0) == 0);
    CHECK(error_of("[run\n").rfind("cfg:1:", 0) == 0);
    CHECK(error_of("[run]\ncommand = sweep\n[outputs]\ncsv = a.csv\n[leaves]\nk_start = 0.5\nk_end = 0.4\n")
              .rfind("cfg:7:", 0) == 0);
    CHECK(error_of("[run]\ncommand = sweep\n").find("outputs.csv") != std::string::npos);
    CHECK(error_of("[run]\ncommand = verify\n[verify]\nsuite = everything\n").rfind("cfg:4:", 0) == 0);
    CHECK(error_of("[flow]\na0 = 0.5, 0.1, 0.2, 0.5\n").rfind("cfg:2:", 0) == 0);
}

TEST_CASE("sweep writes the leaf table") {
    TempDir dir;
    const Run r = run(dir,
                      "[run]\ncommand = sweep\n[chart]\nn_rho = 24\nn_theta = 24\n[leaves]\nk_start = 0.05\n"
                      "k_end = 0.95\nk_step = 0.1\n[outputs]\ncsv = " + dir.file("sweep.csv") + "\n");
    REQUIRE(r.code == kExitOk);
    const std::string text = slurp(dir.file("sweep.csv"));
    CHECK(text.back() == '\n');
    std::string header;
    const auto rows = read_csv(dir.file("sweep.csv"), &header);
    CHECK(header == "k,t,det_min,det_max,dist_min,dist_max,area,volume");
    REQUIRE(rows.size() == 10);
    for (const auto& row : rows) {
        REQUIRE(row.size() == 8);
        CHECK(std::abs(row[4] - std::atanh(std::sqrt(row[0]))) <= 1e-8);
    }
    CHECK_FALSE(fs::exists(dir.file("sweep.csv.tmp")));
}

TEST_CASE("invalid curvature range") {
    TempDir dir;
    const Run r = run(dir, "[run]\ncommand = sweep\n[leaves]\nk_start = 0.5\nk_end = 0.5\n[outputs]\ncsv = " +
                               dir.file("x.csv") + "\n");
    CHECK(r.code == kExitInvalidConfig);
    CHECK(r.err.find("run.ini:5:") != std::string::npos);
    CHECK_FALSE(fs::exists(dir.file("x.csv")));
}

TEST_CASE("paper-literal forcing against the k + t law aborts") {
    TempDir dir;
    const Run r = run(dir,
                      "[run]\ncommand = continue\n[chart]\nn_rho = 16\nn_theta = 16\n[solver]\n"
                      "forcing = paper-literal\ndet_law = k+t\n[outputs]\ncsv = " + dir.file("c.csv") + "\n");
    CHECK(r.code == kExitSolverAbort);
    CHECK(r.err.find("determinant law") != std::string::npos);
    CHECK_FALSE(fs::exists(dir.file("c.csv")));
    CHECK_FALSE(fs::exists(dir.file("c.csv.tmp")));
}

TEST_CASE("continue writes checkpoint rows") {
    TempDir dir;
    const Run r = run(dir,
                      "[run]\ncommand = continue\n[chart]\nn_rho = 16\nn_theta = 16\n[leaves]\nk_start = 0.25\n"
                      "k_end = 0.35\nk_step = 0.05\n[perturbation]\namplitude = 0.01\nfrequency = 2\n[outputs]\ncsv = " +
                          dir.file("c.csv") + "\nmesh = " + dir.file("leaf") + "\n");
    REQUIRE(r.code == kExitOk);
    const auto rows = read_csv(dir.file("c.csv"));
    REQUIRE(rows.size() == 3);
    CHECK(rows[1][0] == doctest::Approx(0.3));
    CHECK(rows[2][1] == doctest::Approx(0.1));
    for (const auto& row : rows) CHECK(row[3] - row[2] <= 1e-4);
    CHECK(fs::exists(dir.file("leaf.ply")));
}

TEST_CASE("flow table") {
    TempDir dir;
    auto flow = [&](const std::string& a0) {
        const Run r = run(dir, "[run]\ncommand = flow\n[flow]\na0 = " + a0 + "\nt_max = 2\nt_step = 0.1\n[outputs]\ncsv = " +
                                   dir.file("f.csv") + "\n");
        REQUIRE(r.code == kExitOk);
        std::string header;
        const auto rows = read_csv(dir.file("f.csv"), &header);
        CHECK(header == "t,lambda1_closed,lambda2_closed,lambda1_rk4,lambda2_rk4,max_gap,det_closed");
        REQUIRE(rows.size() == 21);
        for (const auto& row : rows) CHECK(row[5] <= 1e-8);
        return rows;
    };
    const auto half = flow("0.5, 0.5");
    CHECK(half.back()[1] == doctest::Approx(std::tanh(std::atanh(0.5) + 2)).epsilon(1e-12));
    CHECK(half.back()[1] == doctest::Approx(0.98786).epsilon(1e-5));
    for (const auto& row : flow("1, 1")) {
        CHECK(row[1] == 1.0);
        CHECK(row[4] == 1.0);
    }
    const auto mixed = flow("0.5, 2.0");
    for (std::size_t i = 1; i < mixed.size(); ++i) {
        CHECK(std::abs(mixed[i][6] - 1.0) <= std::abs(mixed[i - 1][6] - 1.0) + 1e-12);
    }
    CHECK(std::abs(mixed.back()[6] - 1.0) <= 1e-12);
}

TEST_CASE("mesh export") {
    TempDir dir;
    const std::string cfg = "[run]\ncommand = export-mesh\n[chart]\nn_rho = 12\nn_theta = 16\n[mesh]\nleaf = core\n"
                            "[outputs]\nmesh = " + dir.file("m") + "\n";
    REQUIRE(run(dir, cfg).code == kExitOk);
    const std::string first = slurp(dir.file("m.ply"));
    REQUIRE(run(dir, cfg).code == kExitOk);
    CHECK(slurp(dir.file("m.ply")) == first);

    std::istringstream in(first);
    std::string line;
    int vertices = 0, faces = 0;
    while (std::getline(in, line) && line != "end_header") {
        std::sscanf(line.c_str(), "element vertex %d", &vertices);
        std::sscanf(line.c_str(), "element face %d", &faces);
    }
    CHECK(vertices == 12 * 16);
    CHECK(faces == 11 * 16);
    const BasePlaneChart chart(0.1, 1.0, 12, 16);
    for (int v = 0; v < vertices; ++v) {
        double x, y, z;
        std::getline(in, line);
        REQUIRE(std::sscanf(line.c_str(), "%lf %lf %lf", &x, &y, &z) == 3);
        const double t = std::tanh(chart.rho(v / 16) / 2);
        CHECK(std::abs(x * x + y * y + z * z - t * t) <= 1e-8);
    }
    std::getline(in, line);
    CHECK(line == "4 0 16 17 1");

    const Run bad = run(dir, "[run]\ncommand = export-mesh\n[outputs]\nmesh = " + dir.file("no/such/dir/m") + "\n");
    CHECK(bad.code == kExitInvalidConfig);
}

TEST_CASE("wedge check and wedge sweep") {
    TempDir dir;
    const Run ok = run(dir, "[run]\ncommand = wedge-check\n[core]\ntype = wedge\nbend_angle = 1.2\n[outputs]\nreport = " +
                                dir.file("w.txt") + "\n");
    CHECK(ok.code == kExitOk);
    CHECK(slurp(dir.file("w.txt")).find("PASS") != std::string::npos);
    const Run sweep = run(dir, "[run]\ncommand = sweep\n[core]\ntype = wedge\nbend_angle = 1.2\n[outputs]\ncsv = " +
                                   dir.file("s.csv") + "\n");
    CHECK(sweep.code == kExitInvalidConfig);
}

TEST_CASE("verify") {
    TempDir dir;
    std::ostringstream out, err;
    CHECK(run_verify("everything", {}, "", out, err) == kExitInvalidConfig);

    const auto t0 = std::chrono::steady_clock::now();
    CHECK(run_verify("riccati", {}, dir.file("r.txt"), out, err) == kExitOk);
    CHECK(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() <= 10.0);
    const std::regex line(R"(^\S+ \S+ \S+ (PASS|FAIL)$)");
    std::istringstream report(slurp(dir.file("r.txt")));
    std::string l;
    int n = 0;
    while (std::getline(report, l)) {
        CHECK(std::regex_match(l, line));
        ++n;
    }
    CHECK(n >= 2);

    // A step far too large for the perturbed run trips the dispersion bound.
    const Run big = run(dir, "[run]\ncommand = verify\n[verify]\nsuite = continuation\n[solver]\ndt = 0.5\n"
                             "[outputs]\nreport = " + dir.file("c.txt") + "\n");
    CHECK(big.code == kExitVerificationFailed);
    const std::string rep = slurp(dir.file("c.txt"));
    CHECK(rep.find("det_dispersion") != std::string::npos);
    const auto pos = rep.find("det_dispersion");
    CHECK(rep.substr(pos, rep.find('\n', pos) - pos).find("FAIL") != std::string::npos);
}
