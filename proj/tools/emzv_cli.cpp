#include "emzv/cli.hpp"

int main(int argc, char** argv) { return emzv::cli::run(argc, argv, std::cout, std::cerr); }
