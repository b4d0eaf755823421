#pragma once

#include <ostream>

namespace orcast::cli {

/// Entry point shared by the executable and the tests. Failures print one line
/// `error kind=<kind> message="<text>"` to `err` and return the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace orcast::cli
