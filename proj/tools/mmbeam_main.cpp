// SPDX-License-Identifier: Apache-2.0

#include "mmbeam/cli.hpp"

int main(int argc, char **argv) { return mmbeam::run_cli(argc, argv); }
