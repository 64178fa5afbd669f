#ifndef ERGM_CLI_HPP
#define ERGM_CLI_HPP

#include <iosfwd>
#include <string>
#include <vector>

namespace ergm::cli {

/// Runs one subcommand (fit, simulate, gof, enumerate, scan, mask). `args`
/// excludes the program name. Failures print `<token>: <message>` on `err`
/// and return nonzero.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ergm::cli

#endif  // ERGM_CLI_HPP
