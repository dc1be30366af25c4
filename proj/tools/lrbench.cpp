#include "lrbench/cli.hpp"

int main(int argc, char** argv) { return lrbench::run_cli(argc, argv); }
