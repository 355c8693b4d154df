#include "optcal/cli.hpp"

int main(int argc, char** argv) { return optcal::cli_main(argc, argv); }
