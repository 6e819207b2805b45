#include "isodelta_cli.hpp"

int main(int argc, char** argv) { return isodelta::cli::run(argc, argv); }
