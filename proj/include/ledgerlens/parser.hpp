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

#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include <ledgerlens/model.hpp>

// Block dump reader. One JSON object per line:
//
//   block:   {"height", "hash", "prev_hash", "timestamp", "channel", "txs": [...]}
//   utxo:    {"model": "utxo", "id"?, "contract"?, "inputs": [{"tx", "index"}],
//             "outputs": [{"address", "value"}], "signers": [...]}
//   account: {"model": "account", "id"?, "contract"?, "from", "to", "value", "nonce"}
//
// A missing tx id is the SHA-256 of the tx object serialized with sorted keys
// and no whitespace.

namespace ledgerlens::parser {

enum class ParseMode { strict, lenient };

struct ParseIssue {
    int64_t height = -1;  // -1 when the record was too broken to tell
    errc kind;
    std::string detail;
};

struct ParseReport {
    std::size_t blocks_ok = 0;
    std::size_t blocks_rejected = 0;
    /// Records skipped because the caller already holds that exact block.
    std::size_t blocks_duplicate = 0;
    std::size_t txs_ok = 0;
    std::vector<ParseIssue> errors;
};

struct ChainTip {
    uint64_t height;
    BlockHash hash;
    Timestamp timestamp;
};

using TxIdSet = std::unordered_set<TxId>;

/// Parses and validates one block record against the last accepted block of
/// its channel (nullptr for genesis). Ids of the block's txs are added to
/// `seen` only on success. Throws error{malformed_record | chain_mismatch |
/// duplicate_tx_id | model_violation}.
ParsedBlock parse_block(std::string_view record, const ChainTip *prev, ParseMode mode, TxIdSet &seen);
ParsedBlock parse_block(const nlohmann::json &record, const ChainTip *prev, ParseMode mode, TxIdSet &seen);
inline ParsedBlock parse_block(const std::string &record, const ChainTip *prev, ParseMode mode, TxIdSet &seen)
{
    return parse_block(std::string_view(record), prev, mode, seen);
}

struct StreamOptions {
    /// Per-channel chain anchors, e.g. the tips of an existing store.
    std::map<ChannelId, ChainTip> anchors;
    /// Tx ids that already exist outside this stream.
    std::function<bool(const TxId &)> known_tx;
    /// Returns true if (channel, height, hash) is already held by the caller;
    /// such records are counted in blocks_duplicate and otherwise ignored.
    std::function<bool(const ChannelId &, uint64_t, const BlockHash &)> known_block;
};

struct ParseResult {
    std::vector<ParsedBlock> blocks;
    ParseReport report;
};

/// Strict stops at the first rejected record. Lenient records the error and
/// moves on; descendants of a rejected block fail linkage and are rejected too.
/// Throws error{io} if the stream goes bad.
ParseResult parse_stream(std::istream &source, ParseMode mode, const StreamOptions &options = {});
ParseResult parse_string(std::string_view dump, ParseMode mode, const StreamOptions &options = {});

std::string canonical_bytes(const nlohmann::json &tx_object);

nlohmann::json to_json(const ParsedTransaction &tx);
nlohmann::json to_json(const ParsedBlock &block);

/// Dump-format line (without trailing newline) that parses back to `block`.
std::string to_dump_line(const ParsedBlock &block);

}  // namespace ledgerlens::parser
