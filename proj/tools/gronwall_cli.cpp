#include "app.hpp"

#include <iostream>

int main(int argc, char** argv) { return gronwall::app::cli_main(argc, argv, std::cout, std::cerr); }
