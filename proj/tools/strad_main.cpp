#include "strad/cli.hpp"

int main(int argc, char** argv) { return strad::run_cli(argc, argv); }
