#ifndef PJD_CLI_HPP
#define PJD_CLI_HPP

#include <string>
#include <vector>

#include "pjd/poly.hpp"

namespace pjd::cli {

/// Entry point shared by the binary and the test suite. Returns the process
/// exit code: 0 success, 2 configuration/validation failure, 1 internal
/// error. Never throws, never aborts.
int run(const std::vector<std::string>& args);

/// Parse a polynomial expression such as "1 + 2*x^2 - 0.5*x1*x2" into `dim`
/// variables ("x" is an alias for "x1").
Poly parse_poly(const std::string& text, int dim);

inline constexpr const char* kVersion = "0.1.0";

} // namespace pjd::cli

#endif
