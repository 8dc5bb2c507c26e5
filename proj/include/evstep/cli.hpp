#pragma once

namespace evstep {

/// Entry point for the `evstep` command-line tool. Returns the process exit
/// code: 0 on success, 1 when a verification subcommand finds a violation,
/// 2 on usage or configuration errors.
int cli_main(int argc, char** argv);

}  // namespace evstep
