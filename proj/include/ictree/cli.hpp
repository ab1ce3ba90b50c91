#pragma once

#include <string>
#include <vector>

namespace ictree::cli {

// Entry point of the command-line tool. Errors print one machine-parsable
// `E_<CODE>: message` line to stderr and return nonzero; output files are
// written only after the command fully succeeded.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);  // args without the program name

}  // namespace ictree::cli
