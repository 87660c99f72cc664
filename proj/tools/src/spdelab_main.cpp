#include "spdelab/cli.hpp"

int main(int argc, char** argv) { return spdelab::run_cli(argc, argv); }
