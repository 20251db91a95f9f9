#include "cli_app.hpp"

int main(int argc, char **argv) { return roofent::cli::run_cli(argc, argv); }
