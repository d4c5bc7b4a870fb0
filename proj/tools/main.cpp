#include "kantsolve/cli.hpp"

int main(int argc, char** argv) { return kantsolve::run_main(argc, argv); }
