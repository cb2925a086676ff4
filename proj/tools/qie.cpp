#include "qie/cli.hpp"

int main(int argc, char** argv) { return qie::cli::run(argc, argv); }
