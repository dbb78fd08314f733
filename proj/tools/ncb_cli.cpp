#include "ncb/cli.hpp"

int main(int argc, char** argv) { return ncb::run_cli(argc, argv); }
