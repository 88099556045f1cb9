#ifndef OMVCDR_CLI_HPP
#define OMVCDR_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace omvcdr::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitSolver = 3;

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// λ = 2^-5, 2^-4, …, 2^5.
std::vector<double> default_lambda_grid();

}  // namespace omvcdr::cli

#endif  // OMVCDR_CLI_HPP
