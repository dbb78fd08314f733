// SPDX-License-Identifier: Apache-2.0

#ifndef NCB_CLI_HPP
#define NCB_CLI_HPP

namespace ncb {

/// Exit codes: 0 ok, 1 a checked property failed, 2 input error, 3 solver failure.
int run_cli(int argc, char** argv);

}  // namespace ncb

#endif  // NCB_CLI_HPP
