#include "qbattery/cli.hpp"

int main(int argc, char** argv) { return qbattery::cli::run(argc, argv); }
