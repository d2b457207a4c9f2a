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

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include <ledgerlens/aggregator.hpp>
#include <ledgerlens/model.hpp>

namespace ledgerlens::store {

struct Counts {
    uint64_t blocks = 0;
    uint64_t txs = 0;
    uint64_t edges = 0;
    uint64_t interactions = 0;

    friend bool operator==(const Counts &, const Counts &) = default;
};

struct ChannelTip {
    ChannelId channel;
    uint64_t height;
    BlockHash hash;
    Timestamp timestamp;

    friend bool operator==(const ChannelTip &, const ChannelTip &) = default;
};

struct StoreSnapshot {
    uint64_t snapshot_id = 0;
    std::vector<ChannelTip> tips;  // sorted by channel
    Counts counts;

    friend bool operator==(const StoreSnapshot &, const StoreSnapshot &) = default;
};

struct TxLocation {
    uint32_t block;  // position in ingestion order
    uint32_t tx;
};

struct EdgesOfTx {
    std::vector<TxEdge> incoming;  // edges whose target is the tx
    std::vector<TxEdge> outgoing;  // edges whose source is the tx
};

/// Immutable, fully indexed view of the store at one committed ingest batch.
class Snapshot {
public:
    const StoreSnapshot &info() const noexcept { return info_; }
    uint64_t id() const noexcept { return info_.snapshot_id; }

    const ParsedTransaction *find_tx(const TxId &id) const noexcept;
    /// Throws error{not_found}.
    const ParsedTransaction &tx_by_id(const TxId &id) const;
    const ParsedBlock &block_by_height(const ChannelId &channel, uint64_t height) const;
    /// Txs where the address is a signer, input owner, output address or
    /// transfer endpoint, in ledger order. Throws error{not_found} for an
    /// address the store has never seen.
    std::span<const TxId> txs_by_address(const Address &address) const;
    EdgesOfTx edges_by_tx(const TxId &id) const;
    /// Interactions with start <= timestamp < end, in time order.
    std::span<const Interaction> interactions_in_window(Timestamp start, Timestamp end) const;

    std::optional<int64_t> fee(const TxId &id) const;
    bool knows_address(const Address &address) const { return address_txs_.contains(address); }
    std::vector<Address> addresses() const;

    /// Edge ids (indexes into edges()) leaving / entering a tx.
    std::span<const std::size_t> outgoing_edge_ids(const TxId &id) const noexcept;
    std::span<const std::size_t> incoming_edge_ids(const TxId &id) const noexcept;

    const std::vector<std::shared_ptr<const ParsedBlock>> &blocks() const noexcept { return blocks_; }
    std::span<const TxEdge> edges() const noexcept { return edges_; }
    std::span<const Interaction> interactions() const noexcept { return interactions_; }
    std::span<const DanglingInput> dangling_inputs() const noexcept { return dangling_; }
    std::span<const DoubleSpend> double_spends() const noexcept { return double_spends_; }

private:
    friend class Store;

    struct TxEntry {
        TxLocation location;
        std::optional<int64_t> fee;
    };

    void apply_block(const std::shared_ptr<const ParsedBlock> &block, std::vector<Interaction> &new_interactions);
    void index_address(const Address &address, const TxId &tx);

    StoreSnapshot info_;
    std::vector<std::shared_ptr<const ParsedBlock>> blocks_;
    std::map<ChannelId, std::vector<uint32_t>> chains_;  // channel -> block positions by height
    std::unordered_map<TxId, TxEntry> txs_;
    std::unordered_map<Address, std::vector<TxId>> address_txs_;
    std::vector<TxEdge> edges_;
    std::unordered_map<TxId, std::vector<std::size_t>> out_edges_;
    std::unordered_map<TxId, std::vector<std::size_t>> in_edges_;
    std::unordered_map<aggregator::OutPoint, std::size_t> spent_;
    std::vector<Interaction> interactions_;  // sorted by timestamp, stable
    std::vector<DanglingInput> dangling_;
    std::vector<DoubleSpend> double_spends_;
};

/// Persistence sink for committed batches and side annotations (labels, rules).
class Journal {
public:
    virtual ~Journal() = default;
    /// Must either persist the whole batch or throw leaving no trace of it.
    virtual void append_batch(std::span<const std::shared_ptr<const ParsedBlock>> blocks, uint64_t snapshot_id) = 0;
    virtual void append_annotation(const nlohmann::json &record) = 0;
};

class MemoryJournal final : public Journal {
public:
    void append_batch(std::span<const std::shared_ptr<const ParsedBlock>>, uint64_t) override {}
    void append_annotation(const nlohmann::json &) override {}
};

/// Single-file append-only journal:
///
///   LEDGERLENS-STORE v1
///   B <block dump line>      (one per block of a batch)
///   C <snapshot id>          (batch commit marker)
///   A <annotation json>
///
/// A trailing batch without its commit marker is discarded on open.
class FileJournal final : public Journal {
public:
    static constexpr std::string_view magic = "LEDGERLENS-STORE";
    static constexpr int version = 1;

    struct Replay {
        std::vector<std::vector<ParsedBlock>> batches;
        std::vector<nlohmann::json> annotations;
    };

    /// Opens (creating if absent) and replays the journal. Throws
    /// error{incompatible_format} for a foreign or newer file, error{io} otherwise.
    static std::pair<std::unique_ptr<FileJournal>, Replay> open(const std::filesystem::path &path);

    ~FileJournal() override;
    FileJournal(const FileJournal &) = delete;
    FileJournal &operator=(const FileJournal &) = delete;

    void append_batch(std::span<const std::shared_ptr<const ParsedBlock>> blocks, uint64_t snapshot_id) override;
    void append_annotation(const nlohmann::json &record) override;

private:
    FileJournal(std::filesystem::path path, int fd, uint64_t size);
    void append(const std::string &bytes);

    std::filesystem::path path_;
    int fd_;
    uint64_t size_;
};

/// Single writer, many readers. Readers take an immutable Snapshot; ingest
/// builds the next one off to the side and publishes it atomically.
class Store {
public:
    explicit Store(std::unique_ptr<Journal> journal = std::make_unique<MemoryJournal>());
    ~Store();
    Store(const Store &) = delete;
    Store &operator=(const Store &) = delete;

    static std::unique_ptr<Store> in_memory();
    static std::unique_ptr<Store> open(const std::filesystem::path &path);

    std::shared_ptr<const Snapshot> snapshot() const;

    /// Commits a batch of blocks that extend the stored chains. Blocks already
    /// stored (same channel, height and hash) are skipped; if nothing new
    /// remains the current snapshot is returned unchanged. Throws
    /// error{tip_conflict | duplicate_tx_id | io | storage_full}; on any error
    /// the store is unchanged.
    StoreSnapshot ingest(std::vector<ParsedBlock> blocks);

    void annotate(const nlohmann::json &record);
    std::vector<nlohmann::json> annotations() const;

private:
    StoreSnapshot commit(std::vector<ParsedBlock> blocks, bool journal);

    std::unique_ptr<Journal> journal_;
    std::mutex writer_mutex_;
    mutable std::mutex publish_mutex_;  // guards current_ and annotations_
    std::shared_ptr<const Snapshot> current_;
    std::vector<nlohmann::json> annotations_;
};

}  // namespace ledgerlens::store
