#include "bose_ldp_cli/cli.hpp"

int main(int argc, char** argv) { return bose_ldp::cli::run(argc, argv); }
