#include "cwseed/cli.hpp"

int main(int argc, char** argv) { return cwseed::cli_main(argc, argv); }
