#include "firm/cli/commands.hpp"

int main(int argc, char** argv) { return firm::cli::run(argc, argv); }
