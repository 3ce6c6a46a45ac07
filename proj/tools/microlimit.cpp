#include "microlimit/cli.hpp"

int main(int argc, char** argv) { return microlimit::run_cli(argc, argv); }
