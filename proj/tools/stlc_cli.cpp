#include "stlc/cli.hpp"

int main(int argc, char** argv) { return stlc::run_cli(argc, argv); }
