#pragma once

#include <ostream>

namespace symindex {

// Fast built-in consistency battery: closed-form symbols, functionals, index
// recovery, sampler laws, the deterministic flow, COGARCH, RNG reproducibility.
// Prints one line per check and returns the number of failures.
int run_selftest(std::ostream& out);

}  // namespace symindex
