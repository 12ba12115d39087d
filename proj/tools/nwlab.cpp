#include <nwlab/cli.hpp>

int main( int argc, char** argv ) { return nwlab::cli_dispatch( argc, argv ); }
