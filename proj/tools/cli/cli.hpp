#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nvcr::cli {

/// Runs the nvcr command line. `args` excludes the program name. Results go
/// to `out` unless --output is given; diagnostics go to `err`.
/// Exit codes: 0 success, 1 numerical or I/O failure, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nvcr::cli
