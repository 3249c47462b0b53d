#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace branchhist {

// Exit statuses of the command-line tool.
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int invalid = 1;
inline constexpr int inconsistent = 2;
inline constexpr int trans_branch = 3;
inline constexpr int usage = 64;
inline constexpr int data = 65;
inline constexpr int file = 66;
inline constexpr int internal = 70;
}  // namespace exit_code

// Runs the tool on `args` (program name excluded). Never throws.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace branchhist
