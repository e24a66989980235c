#include "kucb/cli.hpp"

int main(int argc, char** argv) { return kucb::cli::run(argc, argv); }
