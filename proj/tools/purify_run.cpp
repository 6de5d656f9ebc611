#include "purify/experiments.hpp"

int main(int argc, char** argv) { return purify::run_cli(argc, argv); }
