#include "schrodlab/acceptance.hpp"

#include <cstdlib>
#include <iostream>

// One line per criterion; exit status is nonzero if any criterion fails.
int main(int argc, char** argv) {
    schrodlab::AcceptanceOptions opt;
    for (int i = 1; i < argc; ++i) opt.only.push_back(std::atoi(argv[i]));
    bool all = true;
    schrodlab::run_acceptance(opt, [&](const schrodlab::CriterionResult& r) {
        std::cout << schrodlab::format_line(r) << std::endl;
        all = all && r.pass;
    });
    std::cout << (all ? "acceptance: all criteria pass" : "acceptance: FAILED") << std::endl;
    return all ? 0 : 1;
}
