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
#include <ledgerlens/parser.hpp>

#include <array>
#include <istream>
#include <limits>
#include <sstream>

namespace ledgerlens::parser {

using nlohmann::json;

namespace {

[[noreturn]] void malformed(const std::string &detail)
{
    throw error(errc::malformed_record, detail);
}

const json &field(const json &obj, const char *key, const char *where)
{
    const auto it = obj.find(key);
    if (it == obj.end())
        malformed(std::string(where) + ": missing field '" + key + "'");
    return *it;
}

std::string string_field(const json &obj, const char *key, const char *where)
{
    const auto &v = field(obj, key, where);
    if (!v.is_string())
        malformed(std::string(where) + ": field '" + key + "' must be a string");
    return v.get<std::string>();
}

uint64_t uint_value(const json &v, const char *key, const char *where, uint64_t max = std::numeric_limits<uint64_t>::max())
{
    if (v.is_number_unsigned()) {
        const auto x = v.get<uint64_t>();
        if (x > max)
            malformed(std::string(where) + ": field '" + key + "' out of range");
        return x;
    }
    if (v.is_number_integer() && v.get<int64_t>() >= 0)
        return uint_value(json(v.get<uint64_t>()), key, where, max);
    malformed(std::string(where) + ": field '" + key + "' must be a non-negative integer");
}

uint64_t uint_field(const json &obj, const char *key, const char *where, uint64_t max = std::numeric_limits<uint64_t>::max())
{
    return uint_value(field(obj, key, where), key, where, max);
}

// Wraps the strong-type constructors so bad values surface as malformed records.
template <typename T>
T typed(const std::string &value, const char *what)
{
    try {
        return T(value);
    } catch (const error &e) {
        malformed(std::string(what) + ": " + e.what());
    }
}

void check_keys(const json &obj, std::initializer_list<std::string_view> allowed, ParseMode mode, const char *where)
{
    if (mode != ParseMode::strict)
        return;
    for (const auto &[key, _] : obj.items()) {
        bool ok = false;
        for (const auto a : allowed)
            ok = ok || key == a;
        if (!ok)
            malformed(std::string(where) + ": unknown key '" + key + "'");
    }
}

constexpr std::array<std::string_view, 3> utxo_only_keys = {"inputs", "outputs", "signers"};
constexpr std::array<std::string_view, 4> account_only_keys = {"from", "to", "value", "nonce"};

ParsedTransaction parse_tx(const json &obj, const ParsedBlock &block, uint32_t index, ParseMode mode)
{
    if (!obj.is_object())
        malformed("tx #" + std::to_string(index) + " is not an object");
    const auto model_name = string_field(obj, "model", "tx");
    TxModel model;
    if (model_name == "utxo")
        model = TxModel::utxo;
    else if (model_name == "account")
        model = TxModel::account;
    else
        malformed("tx #" + std::to_string(index) + ": unknown model '" + model_name + "'");

    const std::span<const std::string_view> foreign = model == TxModel::utxo ? std::span<const std::string_view>(account_only_keys) : std::span<const std::string_view>(utxo_only_keys);
    for (const auto key : foreign) {
        if (obj.contains(std::string(key)))
            throw error(errc::model_violation, "tx #" + std::to_string(index) + " (" + model_name + ") carries field '" + std::string(key) + "'");
    }

    std::optional<TxId> id;
    if (const auto it = obj.find("id"); it != obj.end()) {
        if (!it->is_string())
            malformed("tx: field 'id' must be a string");
        id = typed<TxId>(it->get<std::string>(), "tx id");
    } else {
        id = derive_tx_id(canonical_bytes(obj));
    }

    ParsedTransaction tx{
        .id = *id,
        .model = model,
        .block_height = block.height,
        .tx_index = index,
        .timestamp = block.timestamp,
        .channel = block.channel,
    };
    if (const auto it = obj.find("contract"); it != obj.end()) {
        if (!it->is_string())
            malformed("tx: field 'contract' must be a string");
        tx.contract = it->get<std::string>();
    }

    if (model == TxModel::utxo) {
        check_keys(obj, {"model", "id", "contract", "inputs", "outputs", "signers"}, mode, "utxo tx");
        const auto &inputs = field(obj, "inputs", "utxo tx");
        const auto &outputs = field(obj, "outputs", "utxo tx");
        const auto &signers = field(obj, "signers", "utxo tx");
        if (!inputs.is_array() || !outputs.is_array() || !signers.is_array())
            malformed("utxo tx: inputs, outputs and signers must be arrays");
        for (const auto &in : inputs) {
            if (!in.is_object())
                malformed("utxo input is not an object");
            check_keys(in, {"tx", "index"}, mode, "utxo input");
            tx.inputs.push_back(InputRef{
                .source_tx = typed<TxId>(string_field(in, "tx", "utxo input"), "input tx"),
                .output_index = static_cast<uint32_t>(uint_field(in, "index", "utxo input", std::numeric_limits<uint32_t>::max())),
            });
        }
        for (const auto &out : outputs) {
            if (!out.is_object())
                malformed("utxo output is not an object");
            check_keys(out, {"address", "value"}, mode, "utxo output");
            tx.outputs.push_back(Output{
                .address = typed<Address>(string_field(out, "address", "utxo output"), "output address"),
                .value = uint_field(out, "value", "utxo output"),
            });
        }
        for (const auto &s : signers) {
            if (!s.is_string())
                malformed("utxo signer must be a string");
            tx.signers.push_back(typed<Address>(s.get<std::string>(), "signer"));
        }
    } else {
        check_keys(obj, {"model", "id", "contract", "from", "to", "value", "nonce"}, mode, "account tx");
        tx.transfer = Transfer{
            .from = typed<Address>(string_field(obj, "from", "account tx"), "from"),
            .to = typed<Address>(string_field(obj, "to", "account tx"), "to"),
            .value = uint_field(obj, "value", "account tx"),
            .nonce = uint_field(obj, "nonce", "account tx"),
        };
    }
    validate(tx);
    return tx;
}

}  // namespace

std::string canonical_bytes(const json &tx_object)
{
    // nlohmann::json objects are std::map backed, so dump() emits sorted keys.
    return tx_object.dump(-1, ' ', false, json::error_handler_t::strict);
}

ParsedBlock parse_block(const json &record, const ChainTip *prev, ParseMode mode, TxIdSet &seen)
{
    if (!record.is_object())
        malformed("block record is not a JSON object");
    check_keys(record, {"height", "hash", "prev_hash", "timestamp", "channel", "txs"}, mode, "block");

    ParsedBlock block{
        .height = uint_field(record, "height", "block"),
        .hash = typed<BlockHash>(string_field(record, "hash", "block"), "block hash"),
        .prev_hash = typed<BlockHash>(string_field(record, "prev_hash", "block"), "block prev_hash"),
        .timestamp = [&] {
            try {
                return parse_rfc3339(string_field(record, "timestamp", "block"));
            } catch (const error &e) {
                if (e.code() == errc::malformed_record)
                    throw;
                malformed(std::string("block timestamp: ") + e.what());
            }
        }(),
        .channel = typed<ChannelId>(string_field(record, "channel", "block"), "block channel"),
    };
    const auto &txs = field(record, "txs", "block");
    if (!txs.is_array())
        malformed("block: field 'txs' must be an array");

    const auto where = " (channel " + block.channel.str() + ", height " + std::to_string(block.height) + ")";
    if (prev == nullptr) {
        if (block.height != 0)
            throw error(errc::chain_mismatch, "no predecessor for non-genesis block" + where);
        if (block.prev_hash != BlockHash::zero())
            throw error(errc::chain_mismatch, "genesis block must have a zero prev_hash" + where);
    } else {
        if (block.height != prev->height + 1)
            throw error(errc::chain_mismatch, "expected height " + std::to_string(prev->height + 1) + where);
        if (block.prev_hash != prev->hash)
            throw error(errc::chain_mismatch, "prev_hash does not match predecessor " + prev->hash.str() + where);
        if (block.timestamp < prev->timestamp)
            throw error(errc::chain_mismatch, "block timestamp precedes its predecessor" + where);
    }

    TxIdSet local;
    block.txs.reserve(txs.size());
    for (std::size_t i = 0; i < txs.size(); ++i) {
        if (i > std::numeric_limits<uint32_t>::max())
            malformed("too many txs in block" + where);
        auto tx = parse_tx(txs[i], block, static_cast<uint32_t>(i), mode);
        if (seen.contains(tx.id) || !local.insert(tx.id).second)
            throw error(errc::duplicate_tx_id, "tx id " + tx.id.str() + " already seen" + where);
        block.txs.push_back(std::move(tx));
    }
    seen.merge(local);
    return block;
}

ParsedBlock parse_block(std::string_view record, const ChainTip *prev, ParseMode mode, TxIdSet &seen)
{
    json doc;
    try {
        doc = json::parse(record);
    } catch (const json::exception &e) {
        malformed(std::string("invalid JSON: ") + e.what());
    }
    return parse_block(doc, prev, mode, seen);
}

namespace {

bool blank(std::string_view line)
{
    return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

// Peeks at the identity fields without validating the whole record.
struct RecordHead {
    std::optional<ChannelId> channel;
    std::optional<uint64_t> height;
    std::optional<BlockHash> hash;
    std::optional<Timestamp> timestamp;
};

RecordHead peek(const json &doc)
{
    RecordHead head;
    if (!doc.is_object())
        return head;
    try {
        if (auto it = doc.find("channel"); it != doc.end() && it->is_string())
            head.channel = ChannelId(it->get<std::string>());
        if (auto it = doc.find("height"); it != doc.end() && it->is_number_unsigned())
            head.height = it->get<uint64_t>();
        if (auto it = doc.find("hash"); it != doc.end() && it->is_string() && is_hex256(it->get<std::string>()))
            head.hash = BlockHash(it->get<std::string>());
        if (auto it = doc.find("timestamp"); it != doc.end() && it->is_string())
            head.timestamp = parse_rfc3339(it->get<std::string>());
    } catch (const error &) {
    }
    return head;
}

}  // namespace

ParseResult parse_stream(std::istream &source, ParseMode mode, const StreamOptions &options)
{
    ParseResult result;
    std::map<ChannelId, ChainTip> tips = options.anchors;
    TxIdSet seen;
    std::string line;

    while (std::getline(source, line)) {
        if (blank(line))
            continue;
        json doc;
        RecordHead head;
        try {
            try {
                doc = json::parse(line);
            } catch (const json::exception &e) {
                malformed(std::string("invalid JSON: ") + e.what());
            }
            head = peek(doc);
            if (options.known_block && head.channel && head.height && head.hash
                && options.known_block(*head.channel, *head.height, *head.hash)) {
                ++result.report.blocks_duplicate;
                // a held block is a valid link for whatever follows it
                const auto it = tips.find(*head.channel);
                if (head.timestamp && (it == tips.end() || it->second.height < *head.height))
                    tips.insert_or_assign(*head.channel, ChainTip{*head.height, *head.hash, *head.timestamp});
                continue;
            }
            const ChainTip *prev = nullptr;
            if (head.channel) {
                if (const auto it = tips.find(*head.channel); it != tips.end())
                    prev = &it->second;
            }
            auto block = parse_block(doc, prev, mode, seen);
            if (options.known_tx) {
                for (const auto &tx : block.txs) {
                    if (options.known_tx(tx.id)) {
                        for (const auto &t : block.txs)
                            seen.erase(t.id);
                        throw error(errc::duplicate_tx_id, "tx id " + tx.id.str() + " already stored");
                    }
                }
            }
            tips.insert_or_assign(block.channel, ChainTip{block.height, block.hash, block.timestamp});
            ++result.report.blocks_ok;
            result.report.txs_ok += block.txs.size();
            result.blocks.push_back(std::move(block));
        } catch (const error &e) {
            ++result.report.blocks_rejected;
            result.report.errors.push_back(ParseIssue{
                .height = head.height ? static_cast<int64_t>(*head.height) : -1,
                .kind = e.code(),
                .detail = e.what(),
            });
            if (mode == ParseMode::strict)
                break;
        }
    }
    if (source.bad())
        throw error(errc::io, "failed reading block dump");
    return result;
}

ParseResult parse_string(std::string_view dump, ParseMode mode, const StreamOptions &options)
{
    std::istringstream in{std::string(dump)};
    return parse_stream(in, mode, options);
}

json to_json(const ParsedTransaction &tx)
{
    json out = json::object();
    out["model"] = std::string(to_string(tx.model));
    out["id"] = tx.id.str();
    if (tx.contract)
        out["contract"] = *tx.contract;
    if (tx.model == TxModel::utxo) {
        json inputs = json::array();
        for (const auto &in : tx.inputs)
            inputs.push_back({{"tx", in.source_tx.str()}, {"index", in.output_index}});
        json outputs = json::array();
        for (const auto &o : tx.outputs)
            outputs.push_back({{"address", o.address.str()}, {"value", o.value}});
        json signers = json::array();
        for (const auto &s : tx.signers)
            signers.push_back(s.str());
        out["inputs"] = std::move(inputs);
        out["outputs"] = std::move(outputs);
        out["signers"] = std::move(signers);
    } else {
        out["from"] = tx.transfer->from.str();
        out["to"] = tx.transfer->to.str();
        out["value"] = tx.transfer->value;
        out["nonce"] = tx.transfer->nonce;
    }
    return out;
}

json to_json(const ParsedBlock &block)
{
    json txs = json::array();
    for (const auto &tx : block.txs)
        txs.push_back(to_json(tx));
    return {
        {"height", block.height},
        {"hash", block.hash.str()},
        {"prev_hash", block.prev_hash.str()},
        {"timestamp", format_rfc3339(block.timestamp)},
        {"channel", block.channel.str()},
        {"txs", std::move(txs)},
    };
}

std::string to_dump_line(const ParsedBlock &block)
{
    return to_json(block).dump();
}

}  // namespace ledgerlens::parser
