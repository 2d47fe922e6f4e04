// Runs the acceptance criteria at their default thresholds, one line per criterion.
#include <iostream>

#include "fraccal/acceptance.hpp"

int main()
{
    const auto results = fraccal::run_acceptance(fraccal::ExperimentConfig{}, std::cout);
    int failed         = 0;
    for (const auto& r : results)
    {
        failed += r.passed ? 0 : 1;
    }
    std::cout << (results.size() - static_cast<std::size_t>(failed)) << " of " << results.size() << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
