#include "constel/cli.hpp"

int main(int argc, char** argv) { return constel::cli::run(argc, argv); }
