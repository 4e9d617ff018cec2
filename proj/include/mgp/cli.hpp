#ifndef MGP_CLI_HPP
#define MGP_CLI_HPP

#include <iosfwd>

namespace mgp {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitIo = 2,
    kExitNumerical = 3,
};

/// Entry point of the `mgp` tool; subcommands generate, cluster, train,
/// predict and bench. Reports go to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mgp

#endif  // MGP_CLI_HPP
