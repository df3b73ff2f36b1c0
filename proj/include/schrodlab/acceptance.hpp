#pragma once

#include "schrodlab/io.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace schrodlab {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    std::string detail; // measured values against their tolerances
    double seconds = 0.0;
    json data;
};

struct AcceptanceOptions {
    std::uint64_t seed = 20240531;
    std::vector<int> only; // empty: all eight
};

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt,
                                            const std::function<void(const CriterionResult&)>& on_result = {});

// "criterion 3 PASS  kernel decay ... (12.3 s)"
std::string format_line(const CriterionResult& r);

} // namespace schrodlab
