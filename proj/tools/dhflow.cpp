#include "dhflow/cli/commands.hpp"

int main(int argc, char** argv) { return dhflow::cli::run_cli(argc, argv); }
