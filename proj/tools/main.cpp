#include "cli.hpp"

int main(int argc, char** argv) { return fsdp::cli::run(argc, argv); }
