#include "mirviz/cli.hpp"

int main(int argc, char** argv) { return mirviz::cli::run(argc, argv); }
