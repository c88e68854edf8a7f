#include <iostream>

#include "cardionn/app.hpp"

int main(int argc, char** argv) { return cardionn::app::run(argc, argv, std::cout, std::cerr); }
