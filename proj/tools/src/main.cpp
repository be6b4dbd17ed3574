#include "pba_app/analysis.hpp"

int main(int argc, char** argv) { return pba::app::cli_main(argc, argv); }
