#include "adiasearch/cli.hpp"

int main(int argc, char** argv) { return adiasearch::cli::run(argc, argv); }
