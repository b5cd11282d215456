#include <svicov/cli.hpp>

int main(int argc, char** argv) { return svicov::run_cli(argc, argv); }
