#include "spincharge/cli.hpp"

int main(int argc, char** argv) { return spincharge::run(argc, argv); }
