#pragma once

#include <string>
#include <vector>

namespace gkdv {

struct CriterionResult {
    int id;
    std::string name;
    bool pass;
    std::string detail;  // measured vs tolerance
};

// fast = skips the long PDE experiments (criteria 9-11).
std::vector<CriterionResult> run_acceptance(bool fast);

}  // namespace gkdv
