#include "nlsfloer/cli.hpp"

int main(int argc, char** argv) { return nlsfloer::run_cli(argc, argv); }
