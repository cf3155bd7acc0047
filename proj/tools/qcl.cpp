#include "qcl/cli.hpp"

int main(int argc, char** argv) { return qcl::cli::dispatch(argc, argv); }
