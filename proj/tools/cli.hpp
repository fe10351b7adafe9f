#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace chaoskit::cli {

/// Runs one command line. 0 on success, 1 on I/O errors, 2 on usage and
/// domain errors (with a JSON error object on `err`).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace chaoskit::cli
