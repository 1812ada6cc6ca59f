// Copyright 2026 The signmask Authors
// SPDX-License-Identifier: Apache-2.0

#include "signmask/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return signmask::cli::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
