#include "commands.hpp"

int main(int argc, char** argv) { return isolab::run_command(argc, argv); }
