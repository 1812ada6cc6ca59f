// Copyright 2026 The signmask Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <iterator>
#include <vector>

namespace signmask {

using TokenIndex = std::uint32_t;

/// Sorted, duplicate-free set of token indices.
class TokenSet {
public:
    using const_iterator = std::vector<TokenIndex>::const_iterator;

    TokenSet() = default;
    TokenSet(std::initializer_list<TokenIndex> items) : TokenSet(std::vector<TokenIndex>(items)) {}
    explicit TokenSet(std::vector<TokenIndex> items) : items_(std::move(items))
    {
        std::sort(items_.begin(), items_.end());
        items_.erase(std::unique(items_.begin(), items_.end()), items_.end());
    }

    /// Adopts an already sorted, duplicate-free vector without re-sorting.
    static TokenSet from_sorted(std::vector<TokenIndex> items)
    {
        TokenSet set;
        set.items_ = std::move(items);
        return set;
    }

    std::size_t size() const noexcept { return items_.size(); }
    bool empty() const noexcept { return items_.empty(); }
    const_iterator begin() const noexcept { return items_.begin(); }
    const_iterator end() const noexcept { return items_.end(); }
    const std::vector<TokenIndex>& values() const noexcept { return items_; }

    bool contains(TokenIndex index) const
    {
        return std::binary_search(items_.begin(), items_.end(), index);
    }

    TokenSet operator|(const TokenSet& other) const
    {
        std::vector<TokenIndex> out;
        out.reserve(items_.size() + other.items_.size());
        std::set_union(begin(), end(), other.begin(), other.end(), std::back_inserter(out));
        return from_sorted(std::move(out));
    }

    TokenSet operator&(const TokenSet& other) const
    {
        std::vector<TokenIndex> out;
        std::set_intersection(begin(), end(), other.begin(), other.end(), std::back_inserter(out));
        return from_sorted(std::move(out));
    }

    TokenSet operator-(const TokenSet& other) const
    {
        std::vector<TokenIndex> out;
        std::set_difference(begin(), end(), other.begin(), other.end(), std::back_inserter(out));
        return from_sorted(std::move(out));
    }

    bool is_subset_of(const TokenSet& other) const
    {
        return std::includes(other.begin(), other.end(), begin(), end());
    }

    friend bool operator==(const TokenSet&, const TokenSet&) = default;

private:
    std::vector<TokenIndex> items_;
};

}  // namespace signmask
