#include <iostream>

#include "vervaat/cli.hpp"

int main(int argc, char** argv) { return vervaat::parse_and_dispatch(argc, argv, std::cout, std::cerr); }
