// Copyright 2026 The signmask Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace signmask::cli {

enum ExitCode : int {
    kSuccess = 0,
    kClipFailure = 1,  ///< some clip failed and --strict was given
    kUsage = 2,
};

/// One manifest line: `{"clip_id", "keypoints", "segments", "meta"[, "frames"]}`
/// with paths relative to the manifest's directory.
struct ManifestEntry {
    std::string clip_id;
    std::filesystem::path keypoints;
    std::filesystem::path segments;
    std::filesystem::path meta;
    std::optional<std::filesystem::path> frames;
};

/// Paths in the result are resolved against the manifest directory.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

/// Writes entries with paths relative to the manifest's directory.
void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries);

/// Runs `count` tasks on up to `jobs` threads; task i runs exactly once.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& task);

/// Full command line, args[0] being the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace signmask::cli
