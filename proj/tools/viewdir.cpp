#include "viewdir/cli.hpp"

int main(int argc, char** argv) { return viewdir::run_cli(argc, argv); }
