// One line per acceptance criterion; exit status 0 iff all pass.
#include "isect/suite.hpp"

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sys/wait.h>

using namespace isect;

namespace {

std::string capture(const std::string& args, int& code)
{
    std::string cmd = std::string(ARTIFACT_BIN) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) {
        code = -1;
        return {};
    }
    std::string out;
    char buf[4096];
    while (std::size_t k = fread(buf, 1, sizeof buf, p)) out.append(buf, k);
    int status = pclose(p);
    code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return out;
}

bool line(int id, bool pass, const std::string& what)
{
    std::cout << (pass ? "PASS" : "FAIL") << "  C" << id << "  " << what << std::endl;
    return pass;
}

}  // namespace

int main()
{
    SuiteOptions o;
    bool all = true;
    for (int id = 1; id <= suite_size; ++id) {
        auto t0 = std::chrono::steady_clock::now();
        auto r = run_criterion(id, o);
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool pass = r.pass;
        // the two corpus-wide equalities also carry a time limit
        if (id <= 2 && secs >= 60) pass = false;
        char timing[32];
        std::snprintf(timing, sizeof timing, "%.2f s", secs);
        all = line(id, pass, r.name + " (" + std::to_string(r.checked) + " checked, " + timing + ")") && all;
        for (auto& f : r.failures) std::cout << "        " << f << std::endl;
    }

    int c1, c2, c3, c4;
    std::string seed = std::to_string(o.seed);
    std::string a = capture("test --seed " + seed + " --json", c1);
    std::string b = capture("test --seed " + seed + " --json --jobs 4", c2);
    std::string corpus = std::string("@") + CORPUS_DIR + "/lambda.txt";
    std::string va = capture("verify " + corpus + " --json", c3);
    std::string vb = capture("verify " + corpus + " --json --jobs 4", c4);
    bool same = c1 == 0 && c2 == 0 && c3 == 0 && c4 == 0 && !a.empty() && a == b && !va.empty() && va == vb;
    all = line(10, same, "CLI test and corpus verify are byte-identical across runs and worker counts (" + std::to_string(a.size() + va.size()) +
                             " bytes compared)") &&
          all;
    return all ? 0 : 1;
}
