#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace postsel::cli {

/// Entry point shared by the executable and the tests; args exclude argv[0].
/// Returns 0 on success, 2 for invalid input, 3 for numerical failure, 4 for I/O errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace postsel::cli
