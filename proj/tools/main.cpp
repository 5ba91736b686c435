#include "cli.hpp"

int main(int argc, char** argv) { return qpmix::cli::run({argv, argv + argc}); }
