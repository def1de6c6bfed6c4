#include "starpulse/cli.hpp"

int main(int argc, char** argv) { return starpulse::cli::run(argc, argv); }
