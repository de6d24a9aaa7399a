// Acceptance suite: one pass/fail line per criterion, nonzero exit on failure.
#include <iostream>

#include "mgn/calculator.hpp"
#include "mgn/selftest.hpp"

int main() {
    mgn::Calculator calc;
    const int failures = mgn::run_acceptance(calc, std::cout);
    if (failures) {
        std::cout << failures << " criterion check(s) failed\n";
        return 1;
    }
    std::cout << "all acceptance criteria passed\n";
    return 0;
}
