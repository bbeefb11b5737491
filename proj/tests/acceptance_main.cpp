// Acceptance suite: runs every verification criterion at its pinned scale and
// prints one pass/fail line per criterion. Exit status 0 iff all pass.

#include <iostream>

#include "semisup/verify.hpp"

int main() {
    semisup::VerifyOptions opts;  // pinned: 2e5 trials, fixed seed
    const auto results = semisup::run_verify_suite("all", opts);
    const bool all_pass = semisup::print_check_results(std::cout, results);
    std::cout << (all_pass ? "ACCEPTANCE: all criteria passed" : "ACCEPTANCE: FAILURES above") << "\n";
    return all_pass ? 0 : 1;
}
