// acceptance.hpp: the numbered acceptance checks, shared by the test binary
// and `spinboson reproduce`. Budgets, seeds and tolerances are fixed here.

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace spinboson {

struct CriterionResult {
    int id{0};
    std::string title;
    bool passed{false};
    std::string measured;
    std::string threshold;
    double seconds{0.0};
    double time_limit{0.0};
    std::vector<std::string> notes;  // extra data lines, never part of pass/fail
};

inline constexpr std::uint64_t kAcceptanceSeed = 20240611;
inline constexpr int kCriterionCount = 11;

struct AcceptanceOptions {
    std::uint64_t seed{kAcceptanceSeed};
    unsigned threads{0};
    std::vector<int> only;  // empty: all criteria
    std::function<void(const CriterionResult&)> on_result;
};

CriterionResult run_criterion(int id, const AcceptanceOptions& opts);
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts);

// "criterion  4  PASS  <title>: <measured> (need <threshold>) [12.3 s]"
std::string format_result(const CriterionResult& r);

}  // namespace spinboson
