#include "orbitlin/dsl.hpp"

int main(int argc, char** argv) { return ofl::run_cli(argc, argv); }
