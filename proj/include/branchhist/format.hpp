#pragma once

#include <string>

namespace branchhist {

// Shortest decimal text that reads back to the same double. Integral values
// keep a trailing ".0" so they still look like reals ("1.0", not "1").
std::string format_real(double x);

// printf("%.17g"): the canonical float form of family documents.
std::string format_canonical(double x);

}  // namespace branchhist
