#ifndef KUCB_CLI_HPP
#define KUCB_CLI_HPP

#include <string>
#include <vector>

namespace kucb::cli {

// Exit codes: 0 = pass, 1 = suite assertion failure, 2 = configuration error.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

}  // namespace kucb::cli

#endif
