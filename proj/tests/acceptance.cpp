#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "hdyn/acceptance.hpp"

#ifndef HDYN_DATA_DIR
#define HDYN_DATA_DIR "data"
#endif

using namespace hdyn;

namespace {

std::string render(const std::vector<CriterionResult>& rs) {
    std::string s;
    for (const auto& r : rs) s += acceptance::format_line(r) + "\n";
    return s;
}

} // namespace

int main() {
    std::ostringstream log;
    auto first = acceptance::run_all(HDYN_DATA_DIR, log);
    std::cerr << log.str();
    // rerun in process: caches are warm, so this compares the deterministic parts of the report
    std::ostringstream log2;
    auto second = acceptance::run_all(HDYN_DATA_DIR, log2);
    CriterionResult det{11, "repeated runs give identical reports", render(first) == render(second),
                        "two consecutive in-process runs compared byte for byte"};
    first.push_back(det);
    bool all = true;
    for (const auto& r : first) {
        std::cout << acceptance::format_line(r) << "\n";
        all = all && r.pass;
    }
    return all ? 0 : 1;
}
