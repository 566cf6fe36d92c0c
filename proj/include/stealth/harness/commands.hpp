#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stealth::harness {

/// Entry point for the stealthsim CLI: run, replay, serve, validate.
/// Failures print one line `error: <code>: <message>` to err and return nonzero.
int execute_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stealth::harness
