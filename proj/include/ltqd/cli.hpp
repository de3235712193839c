#pragma once

namespace ltqd {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;      // malformed config / bad parameters
inline constexpr int kExitNumerical = 3;   // refused or failed numerics
inline constexpr int kExitVerify = 4;      // a verification check failed

// Entry point behind main(): subcommands spectrum | evolve | sweep | verify,
// each taking --config <path> and --out <path> (--out optional for verify);
// --self-check enables step-halving integrator validation.
int run_cli(int argc, char** argv);

}  // namespace ltqd
