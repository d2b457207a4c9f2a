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
#include "fixtures.hpp"

#include <stdexcept>

namespace ledgerlens::support {

using nlohmann::json;

json utxo_tx(const Ins &inputs, const Outs &outputs, std::optional<std::string> contract, std::vector<std::string> signers)
{
    json tx = {{"model", "utxo"}, {"inputs", json::array()}, {"outputs", json::array()}, {"signers", signers}};
    for (const auto &[id, index] : inputs)
        tx["inputs"].push_back({{"tx", id.str()}, {"index", index}});
    for (const auto &[address, value] : outputs)
        tx["outputs"].push_back({{"address", address}, {"value", value}});
    if (contract)
        tx["contract"] = *contract;
    return tx;
}

json account_tx(const std::string &from, const std::string &to, uint64_t value, uint64_t nonce,
    std::optional<std::string> contract)
{
    json tx = {{"model", "account"}, {"from", from}, {"to", to}, {"value", value}, {"nonce", nonce}};
    if (contract)
        tx["contract"] = *contract;
    return tx;
}

TxId id_of(const json &tx)
{
    return derive_tx_id(parser::canonical_bytes(tx));
}

Timestamp at(const char *rfc3339)
{
    return parse_rfc3339(rfc3339);
}

ChainBuilder::ChainBuilder(std::string channel, Timestamp start, std::chrono::seconds step)
    : channel_(std::move(channel)), next_(start), step_(step)
{
}

std::string ChainBuilder::add(const std::vector<json> &txs)
{
    return add_at(next_, txs);
}

std::string ChainBuilder::add_at(Timestamp ts, const std::vector<json> &txs)
{
    const auto hash = sha256_hex(channel_ + "/" + std::to_string(height_) + "/" + prev_);
    const json block = {
        {"height", height_},
        {"hash", hash},
        {"prev_hash", prev_},
        {"timestamp", format_rfc3339(ts)},
        {"channel", channel_},
        {"txs", txs},
    };
    ++height_;
    prev_ = hash;
    next_ = ts + step_;
    auto line = block.dump();
    dump_ += line + "\n";
    return line;
}

FiveTx five_tx()
{
    ChainBuilder chain("demo");
    const auto t1 = utxo_tx({}, {{"a", 10}});
    const auto t2 = utxo_tx({}, {{"b", 20}});
    const auto id1 = id_of(t1);
    const auto id2 = id_of(t2);
    const auto t3 = utxo_tx({{id1, 0}, {id2, 0}}, {{"c", 30}}, "transfer", {"a", "b"});
    const auto id3 = id_of(t3);
    const auto t4 = utxo_tx({{id3, 0}}, {{"d", 25}}, "transfer", {"c"});
    const auto id4 = id_of(t4);
    const auto t5 = utxo_tx({{id4, 0}}, {{"e", 25}}, std::nullopt, {"d"});
    chain.add({t1, t2});
    chain.add({t3});
    chain.add({t4});
    chain.add({t5});
    return FiveTx{chain.dump(), id1, id2, id3, id4, id_of(t5)};
}

store::StoreSnapshot ingest_dump(store::Store &store, std::string_view dump)
{
    const auto snap = store.snapshot();
    parser::StreamOptions options;
    for (const auto &t : snap->info().tips)
        options.anchors.emplace(t.channel, parser::ChainTip{t.height, t.hash, t.timestamp});
    options.known_tx = [&](const TxId &id) { return snap->find_tx(id) != nullptr; };
    options.known_block = [&](const ChannelId &c, uint64_t h, const BlockHash &hash) {
        try {
            return snap->block_by_height(c, h).hash == hash;
        } catch (const error &) {
            return false;
        }
    };
    auto parsed = parser::parse_string(dump, parser::ParseMode::strict, options);
    if (!parsed.report.errors.empty())
        throw error(parsed.report.errors.front().kind, parsed.report.errors.front().detail);
    return store.ingest(std::move(parsed.blocks));
}

std::unique_ptr<store::Store> store_from_dump(std::string_view dump)
{
    auto store = store::Store::in_memory();
    ingest_dump(*store, dump);
    return store;
}

}  // namespace ledgerlens::support
