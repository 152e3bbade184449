#include "hotspot/cli.hpp"

int main(int argc, char** argv) { return hotspot::run_cli(argc, argv); }
