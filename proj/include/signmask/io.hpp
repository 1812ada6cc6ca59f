// Copyright 2026 The signmask Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace signmask {

std::string read_text_file(const std::filesystem::path& path);
std::vector<std::uint8_t> read_binary_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never observe a truncated file.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

/// Little-endian encoder for the binary formats.
class ByteWriter {
public:
    void bytes(std::string_view raw) { buffer_.insert(buffer_.end(), raw.begin(), raw.end()); }
    void u8(std::uint8_t v) { buffer_.push_back(v); }
    void u16(std::uint16_t v) { put(v, 2); }
    void u32(std::uint32_t v) { put(v, 4); }
    void u64(std::uint64_t v) { put(v, 8); }

    std::vector<std::uint8_t>& buffer() noexcept { return buffer_; }
    std::vector<std::uint8_t> take() noexcept { return std::move(buffer_); }

private:
    void put(std::uint64_t v, int width)
    {
        for (int i = 0; i < width; ++i) {
            buffer_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }

    std::vector<std::uint8_t> buffer_;
};

/// Little-endian decoder; every read past the end throws SchemaViolation.
class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

    std::string_view bytes(std::size_t count);
    std::uint8_t u8() { return static_cast<std::uint8_t>(get(1)); }
    std::uint16_t u16() { return static_cast<std::uint16_t>(get(2)); }
    std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
    std::uint64_t u64() { return get(8); }

    std::size_t remaining() const noexcept { return data_.size() - pos_; }
    std::span<const std::uint8_t> rest() const noexcept { return data_.subspan(pos_); }

private:
    std::uint64_t get(int width);

    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

}  // namespace signmask
