#include "cli.hpp"

int main(int argc, char** argv) { return circbias::cli::dispatch(argc, argv); }
