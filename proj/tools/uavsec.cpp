#include <iostream>

#include "uavsec/harness.hpp"

int main(int argc, char** argv) { return uavsec::harness::run(argc, argv, std::cout, std::cerr); }
