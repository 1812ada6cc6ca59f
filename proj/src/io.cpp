// Copyright 2026 The signmask Authors
// SPDX-License-Identifier: Apache-2.0

#include "signmask/io.hpp"

#include "signmask/error.hpp"

#include <atomic>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace signmask {

std::string read_text_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path)
{
    const std::string text = read_text_file(path);
    return {text.begin(), text.end()};
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes)
{
    static std::atomic<std::uint64_t> counter{0};
    auto temp = path;
    temp += ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter.fetch_add(1));
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(ErrorCode::Io, "cannot create " + temp.string());
        }
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            std::error_code ignored;
            std::filesystem::remove(temp, ignored);
            throw Error(ErrorCode::Io, "short write to " + temp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(temp, path, ec);
    if (ec) {
        std::filesystem::remove(temp, ec);
        throw Error(ErrorCode::Io, "cannot rename onto " + path.string());
    }
}

void write_file_atomic(const std::filesystem::path& path, std::string_view text)
{
    write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string_view ByteReader::bytes(std::size_t count)
{
    if (remaining() < count) {
        throw Error(ErrorCode::SchemaViolation, "truncated binary document");
    }
    std::string_view out(reinterpret_cast<const char*>(data_.data() + pos_), count);
    pos_ += count;
    return out;
}

std::uint64_t ByteReader::get(int width)
{
    if (remaining() < static_cast<std::size_t>(width)) {
        throw Error(ErrorCode::SchemaViolation, "truncated binary document");
    }
    std::uint64_t value = 0;
    for (int i = 0; i < width; ++i) {
        value |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
    }
    pos_ += width;
    return value;
}

}  // namespace signmask
