// Runs the 13 acceptance criteria and prints one PASS/FAIL line for each.
// Usage: acceptance [--only 3,7] [--jobs N] [--out dir]

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "phikit/harness.hpp"

int main(int argc, char** argv) {
    using namespace phikit;
    SuiteConfig cfg;
    std::vector<int> ids;
    std::string out;
    for (int i = 1; i < argc; ++i) {
        std::string a = argv[i];
        if (a == "--only" && i + 1 < argc) {
            std::stringstream ss(argv[++i]);
            std::string tok;
            while (std::getline(ss, tok, ',')) ids.push_back(std::stoi(tok));
        } else if (a == "--jobs" && i + 1 < argc) {
            cfg.jobs = std::stoi(argv[++i]);
        } else if (a == "--out" && i + 1 < argc) {
            out = argv[++i];
        } else {
            std::fprintf(stderr, "unknown argument %s\n", a.c_str());
            return 2;
        }
    }
    if (ids.empty())
        for (int i = 1; i <= 13; ++i) ids.push_back(i);

    SuiteReport rep;
    rep.suite = "acceptance";
    rep.seed = cfg.seed;
    bool all = true;
    for (int id : ids) {
        CriterionResult r = check_criterion(id, cfg, rep);
        all &= r.pass;
        std::printf("%s criterion %2d (%s): %s [%.1fs]\n", r.pass ? "PASS" : "FAIL", r.id, r.title.c_str(),
                    r.summary.c_str(), r.seconds);
        std::fflush(stdout);
    }
    if (!out.empty()) write_report(rep, out);
    std::printf("%s\n", all ? "ALL PASS" : "SOME CRITERIA FAILED");
    return all ? 0 : 1;
}
