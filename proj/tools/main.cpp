#include "sobnn/cli.hpp"

int main(int argc, char** argv) { return sobnn::run_cli(argc, argv); }
