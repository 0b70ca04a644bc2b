// Runs every acceptance criterion and prints one PASS/FAIL line per criterion,
// followed by its individual checks. Exit status is non-zero on any failure.
#include <cstdio>

#include "kfol/verify.hpp"

int main() {
    using namespace kfol;
    int failed = 0, total = 0;
    for (const std::string& suite : suite_names()) {
        for (const Criterion& c : run_suite(suite)) {
            ++total;
            if (!c.pass()) ++failed;
            std::printf("%s criterion %2d  %-50s %7.2fs\n", c.pass() ? "PASS" : "FAIL", c.id, c.title.c_str(),
                        c.seconds);
            for (const Check& k : c.checks)
                std::printf("      %-40s measured %-12.6g bound %-12.6g %s\n", k.name.c_str(), k.measured, k.bound,
                            k.pass ? "ok" : "VIOLATED");
            std::fflush(stdout);
        }
    }
    std::printf("%d/%d criteria passed\n", total - failed, total);
    return failed == 0 ? 0 : 1;
}
