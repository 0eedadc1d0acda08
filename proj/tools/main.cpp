#include "cli_app.hpp"

int main(int argc, char** argv) { return sdbbm::cli::main_entry(argc, argv); }
