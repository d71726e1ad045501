#pragma once

#include "courtvec/error.hpp"

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace courtvec::cli {

enum ExitCode : int { ok = 0, usage = 1, data_error = 2, runtime_error = 3 };

/// Runs one command line (without the program name). `@path` arguments are replaced
/// by the whitespace-separated arguments read from that file.
int run(std::vector<std::string> args, std::ostream& out, std::ostream& err);

int exit_code_for(ErrorKind kind);

/// Expands `@file` arguments; quotes group words and `#` starts a comment line.
std::vector<std::string> expand_response_files(const std::vector<std::string>& args);

/// Writes through a sibling temp file and renames it over `path` once complete.
void write_atomically(const std::string& path, const std::function<void(std::ostream&)>& fill);

}  // namespace courtvec::cli
