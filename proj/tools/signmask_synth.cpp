// Copyright 2026 The signmask Authors
// SPDX-License-Identifier: Apache-2.0

// Writes a synthetic raw corpus (keypoints, segments, meta, manifest) for smoke runs.

#include "synthetic.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv)
{
    CLI::App app{"Generate a synthetic signing corpus"};
    std::string out;
    int count = 10;
    std::uint64_t seed = 0;
    app.add_option("--out", out, "output directory")->required();
    app.add_option("--count", count, "number of clips")->check(CLI::Range(1, 100000));
    app.add_option("--seed", seed, "corpus seed");
    CLI11_PARSE(app, argc, argv);
    try {
        const auto manifest = signmask::synth::write_corpus(out, signmask::synth::make_corpus(count, seed));
        std::cout << manifest.string() << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
