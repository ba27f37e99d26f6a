// One line per acceptance criterion, full-size runs. Exit status 1 if any fails.
#include "msr/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>

int main(int argc, char** argv) {
    msr::CheckOptions o;
    if (const char* j = std::getenv("MSR_JOBS")) o.jobs = std::max(1, std::atoi(j));
    int first = 1, last = 10;
    if (argc == 2) first = last = std::atoi(argv[1]);
    int failed = 0;
    for (int id = first; id <= last; ++id) {
        auto t0 = std::chrono::steady_clock::now();
        msr::CheckResult r;
        try {
            r = msr::run_check(id, o);
        } catch (const std::exception& e) {
            r.criterion = id;
            r.name = "exception";
            r.pass = false;
            r.detail = e.what();
        }
        double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %d: %s %s: %s (%.1fs)\n", id, r.pass ? "PASS" : "FAIL", r.name.c_str(),
                    r.detail.c_str(), sec);
        std::fflush(stdout);
        if (!r.pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
