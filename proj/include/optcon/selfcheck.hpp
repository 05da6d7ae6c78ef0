#pragma once

#include <ostream>

namespace optcon {

// Built-in numerical verification suites: state-truncation accuracy, the
// separability identity behind the delayed-feedback view, and gradient
// correctness/ceilings for the level shares.  Returns the number of failed
// suites (0 = everything holds).  quick trims the instance counts.
int run_self_check(bool quick, std::ostream& out);

}  // namespace optcon
