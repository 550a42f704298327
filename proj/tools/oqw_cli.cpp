#include "oqw/harness.hpp"

#include <iostream>

int main(int argc, char** argv) {
    return oqw::harness::main_entry(argc, argv, std::cout, std::cerr);
}
