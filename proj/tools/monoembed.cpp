#include "monoembed/cli.hpp"

int main(int argc, char** argv) { return monoembed::cli::run(argc, argv); }
