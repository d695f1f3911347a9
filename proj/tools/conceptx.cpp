#include "conceptx/cli.hpp"

int main(int argc, char** argv) { return conceptx::cli::run(argc, argv); }
