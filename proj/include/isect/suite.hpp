#ifndef ISECT_SUITE_HPP
#define ISECT_SUITE_HPP

#include "isect/oracle.hpp"

namespace isect {

struct SuiteOptions {
    std::uint64_t seed = 17;
    int jobs = 1;
    int lambda_terms = 100;
    int ls_terms = 100;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    long checked = 0;
    std::vector<std::string> failures;   // first few offending terms with a reason
};

// property criteria 1..9; the reproducibility criterion needs the CLI and lives in the acceptance binary
constexpr int suite_size = 9;
CriterionResult run_criterion(int id, const SuiteOptions& o);
std::vector<CriterionResult> run_suite(const SuiteOptions& o);
nlohmann::json suite_json(const std::vector<CriterionResult>& rs, const SuiteOptions& o);

}  // namespace isect

#endif
