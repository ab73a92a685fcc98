#pragma once

#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace seclab::cli {

enum ExitCode : int { exit_ok = 0, exit_failure = 1, exit_usage = 2, exit_data = 3 };

class usage_error : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Parses "2,3,4", "1..10" or mixtures such as "1..3,5".
[[nodiscard]] std::vector<int> parse_int_list(std::string_view text);

/// Runs one command line (without the program name) and returns the exit code.
int run(std::vector<std::string> const &args, std::ostream &out, std::ostream &err);

}  // namespace seclab::cli
