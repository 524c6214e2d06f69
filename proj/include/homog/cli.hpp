#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace homog {

// Exit codes: 0 ok, 1 input error, 2 drifty graph (analysis emitted in
// centered mode), 3 simulation precondition failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace homog
