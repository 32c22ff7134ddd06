#include "fairsched/cli.hpp"

int main(int argc, char** argv) { return fairsched::run_cli(argc, argv); }
