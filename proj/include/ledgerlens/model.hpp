/*
 * Copyright 2026 The LedgerLens Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <ledgerlens/error.hpp>

namespace ledgerlens {

/// UTC instant at second precision.
using Timestamp = std::chrono::sys_seconds;

/// Parses "YYYY-MM-DDTHH:MM:SSZ" (a "+00:00" suffix is also accepted).
/// Throws error{invalid_argument} for anything else, including non-UTC offsets.
Timestamp parse_rfc3339(std::string_view text);
std::string format_rfc3339(Timestamp ts);

/// Opaque, case-sensitive account identifier: 1..256 chars, no surrounding whitespace.
class Address {
public:
    static constexpr std::size_t max_size = 256;

    explicit Address(std::string value);

    const std::string &str() const noexcept { return value_; }

    friend auto operator<=>(const Address &, const Address &) = default;
    friend bool operator==(const Address &, const Address &) = default;

private:
    std::string value_;
};

class ChannelId {
public:
    explicit ChannelId(std::string value);

    const std::string &str() const noexcept { return value_; }

    friend auto operator<=>(const ChannelId &, const ChannelId &) = default;
    friend bool operator==(const ChannelId &, const ChannelId &) = default;

private:
    std::string value_;
};

bool is_hex256(std::string_view text) noexcept;

/// 64-char lowercase hex digest. The tag keeps tx ids and block hashes apart.
template <typename Tag>
class Hex256 {
public:
    explicit Hex256(std::string value) : value_(std::move(value))
    {
        if (!is_hex256(value_))
            throw error(errc::invalid_argument, "expected 64 lowercase hex chars, got '" + value_ + "'");
    }

    static Hex256 zero() { return Hex256(std::string(64, '0')); }

    const std::string &str() const noexcept { return value_; }

    friend auto operator<=>(const Hex256 &, const Hex256 &) = default;
    friend bool operator==(const Hex256 &, const Hex256 &) = default;

private:
    std::string value_;
};

using TxId = Hex256<struct tx_id_tag>;
using BlockHash = Hex256<struct block_hash_tag>;

enum class TxModel { utxo, account };

std::string_view to_string(TxModel model) noexcept;

struct InputRef {
    TxId source_tx;
    uint32_t output_index;

    friend bool operator==(const InputRef &, const InputRef &) = default;
};

struct Output {
    Address address;
    uint64_t value;

    friend bool operator==(const Output &, const Output &) = default;
};

struct Transfer {
    Address from;
    Address to;
    uint64_t value;
    uint64_t nonce;

    friend bool operator==(const Transfer &, const Transfer &) = default;
};

struct ParsedTransaction {
    TxId id;
    TxModel model;
    uint64_t block_height = 0;
    uint32_t tx_index = 0;
    Timestamp timestamp;
    ChannelId channel;
    std::optional<std::string> contract;
    std::vector<InputRef> inputs;
    std::vector<Output> outputs;
    std::optional<Transfer> transfer;
    std::vector<Address> signers;

    friend bool operator==(const ParsedTransaction &, const ParsedTransaction &) = default;
};

struct ParsedBlock {
    uint64_t height = 0;
    BlockHash hash;
    BlockHash prev_hash;
    Timestamp timestamp;
    ChannelId channel;
    std::vector<ParsedTransaction> txs;

    friend bool operator==(const ParsedBlock &, const ParsedBlock &) = default;
};

/// Spent output -> spending input.
struct TxEdge {
    TxId source_tx;
    uint32_t output_index;
    TxId target_tx;
    uint32_t input_index;
    uint64_t value;
    Address owner;
    Timestamp timestamp;

    friend bool operator==(const TxEdge &, const TxEdge &) = default;
};

/// Directed value movement between two accounts. Self-transfers are legal.
struct Interaction {
    Address from;
    Address to;
    uint64_t value;
    Timestamp timestamp;
    TxId tx;
    ChannelId channel;
    std::optional<std::string> contract;

    friend bool operator==(const Interaction &, const Interaction &) = default;
};

struct DanglingInput {
    TxId target_tx;
    uint32_t input_index;
    TxId missing_source;
    uint32_t missing_index;

    friend bool operator==(const DanglingInput &, const DanglingInput &) = default;
};

struct DoubleSpend {
    TxId target_tx;
    uint32_t input_index;
    TxId source_tx;
    uint32_t output_index;

    friend bool operator==(const DoubleSpend &, const DoubleSpend &) = default;
};

/// Checks the model-discriminated field constraints; throws error{model_violation}.
void validate(const ParsedTransaction &tx);

/// Lowercase hex SHA-256 of the given bytes.
TxId derive_tx_id(std::span<const std::byte> canonical_bytes);
TxId derive_tx_id(std::string_view canonical_bytes);

std::string sha256_hex(std::string_view bytes);

/// Every address a transaction mentions directly (signers, outputs, transfer
/// endpoints). Input owners are only known after linking.
std::vector<Address> mentioned_addresses(const ParsedTransaction &tx);

}  // namespace ledgerlens

template <>
struct std::hash<ledgerlens::Address> {
    std::size_t operator()(const ledgerlens::Address &a) const noexcept { return std::hash<std::string>{}(a.str()); }
};

template <>
struct std::hash<ledgerlens::ChannelId> {
    std::size_t operator()(const ledgerlens::ChannelId &c) const noexcept { return std::hash<std::string>{}(c.str()); }
};

template <typename Tag>
struct std::hash<ledgerlens::Hex256<Tag>> {
    std::size_t operator()(const ledgerlens::Hex256<Tag> &h) const noexcept
    {
        // already uniformly distributed
        std::size_t v = 0;
        for (std::size_t i = 0; i < 16; ++i) {
            const char c = h.str()[i];
            v = (v << 4) | static_cast<std::size_t>(c <= '9' ? c - '0' : c - 'a' + 10);
        }
        return v;
    }
};
