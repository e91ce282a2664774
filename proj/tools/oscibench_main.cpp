#include "oscibench/cli.hpp"

int main(int argc, char** argv) { return oscibench::run_cli(argc, argv); }
