#include "mjost_cli/commands.hpp"

int main(int argc, char** argv) { return mjost::cli::main_entry(argc, argv); }
