#include <iostream>

#include "dtcm/app/commands.hpp"

int main(int argc, char** argv) { return dtcm::app::run_cli(argc, argv, std::cout, std::cerr); }
