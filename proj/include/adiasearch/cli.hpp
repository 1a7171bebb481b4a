#ifndef ADIASEARCH_CLI_HPP
#define ADIASEARCH_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

#include "adiasearch/error.hpp"

namespace adiasearch::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitValidation = 3;
inline constexpr int kExitBound = 4;
inline constexpr int kExitInvariant = 5;

int exit_code_for(ErrorKind kind);

/// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, char** argv);

} // namespace adiasearch::cli

#endif
