#include "kantorov/cli.hpp"

int main(int argc, char** argv) { return kantorov::cli::run(argc, argv); }
