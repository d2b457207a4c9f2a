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

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include <ledgerlens/model.hpp>
#include <ledgerlens/parser.hpp>
#include <ledgerlens/store.hpp>

namespace ledgerlens::support {

using Outs = std::vector<std::pair<std::string, uint64_t>>;
using Ins = std::vector<std::pair<TxId, uint32_t>>;

nlohmann::json utxo_tx(const Ins &inputs, const Outs &outputs, std::optional<std::string> contract = {},
    std::vector<std::string> signers = {});
nlohmann::json account_tx(const std::string &from, const std::string &to, uint64_t value, uint64_t nonce,
    std::optional<std::string> contract = {});

/// Id a tx object gets when it carries none.
TxId id_of(const nlohmann::json &tx);

Timestamp at(const char *rfc3339);

/// Appends well-linked blocks to one channel's dump.
class ChainBuilder {
public:
    explicit ChainBuilder(std::string channel, Timestamp start = at("2021-03-01T00:00:00Z"),
        std::chrono::seconds step = std::chrono::seconds{600});

    /// Returns the block's dump line (no newline).
    std::string add(const std::vector<nlohmann::json> &txs);
    /// Adds a block at an explicit timestamp.
    std::string add_at(Timestamp ts, const std::vector<nlohmann::json> &txs);

    const std::string &dump() const noexcept { return dump_; }
    uint64_t next_height() const noexcept { return height_; }

private:
    std::string channel_;
    Timestamp next_;
    std::chrono::seconds step_;
    uint64_t height_ = 0;
    std::string prev_ = std::string(64, '0');
    std::string dump_;
};

/// Tx1 -> Tx3 <- Tx2, Tx3 -> Tx4 -> Tx5. Tx1 pays a:10, Tx2 pays b:20,
/// Tx3 pays c:30, Tx4 pays d:25, Tx5 pays e:25.
struct FiveTx {
    std::string dump;
    TxId tx1, tx2, tx3, tx4, tx5;
};
FiveTx five_tx();

/// Strict parse against the store's tips, then ingest. Throws on any parse error.
store::StoreSnapshot ingest_dump(store::Store &store, std::string_view dump);
std::unique_ptr<store::Store> store_from_dump(std::string_view dump);

}  // namespace ledgerlens::support
