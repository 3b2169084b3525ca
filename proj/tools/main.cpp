#include "iideval/cli.hpp"

int main(int argc, char** argv) { return iideval::run_main(argc, argv); }
