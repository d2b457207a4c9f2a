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
#include <ledgerlens/store.hpp>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include <fcntl.h>
#include <unistd.h>

#include <ledgerlens/parser.hpp>

namespace ledgerlens::store {

// ---------------------------------------------------------------- Snapshot

const ParsedTransaction *Snapshot::find_tx(const TxId &id) const noexcept
{
    const auto it = txs_.find(id);
    if (it == txs_.end())
        return nullptr;
    return &blocks_[it->second.location.block]->txs[it->second.location.tx];
}

const ParsedTransaction &Snapshot::tx_by_id(const TxId &id) const
{
    if (const auto *tx = find_tx(id))
        return *tx;
    throw error(errc::not_found, "unknown tx " + id.str());
}

const ParsedBlock &Snapshot::block_by_height(const ChannelId &channel, uint64_t height) const
{
    const auto it = chains_.find(channel);
    if (it == chains_.end() || height >= it->second.size())
        throw error(errc::not_found, "no block at height " + std::to_string(height) + " on channel " + channel.str());
    return *blocks_[it->second[height]];
}

std::span<const TxId> Snapshot::txs_by_address(const Address &address) const
{
    const auto it = address_txs_.find(address);
    if (it == address_txs_.end())
        throw error(errc::not_found, "unknown address " + address.str());
    return it->second;
}

EdgesOfTx Snapshot::edges_by_tx(const TxId &id) const
{
    if (!txs_.contains(id))
        throw error(errc::not_found, "unknown tx " + id.str());
    EdgesOfTx out;
    for (const auto e : incoming_edge_ids(id))
        out.incoming.push_back(edges_[e]);
    for (const auto e : outgoing_edge_ids(id))
        out.outgoing.push_back(edges_[e]);
    return out;
}

std::span<const Interaction> Snapshot::interactions_in_window(Timestamp start, Timestamp end) const
{
    if (end <= start)
        return {};
    const auto by_time = [](const Interaction &i, Timestamp t) { return i.timestamp < t; };
    const auto first = std::lower_bound(interactions_.begin(), interactions_.end(), start, by_time);
    const auto last = std::lower_bound(first, interactions_.end(), end, by_time);
    return {first, last};
}

std::optional<int64_t> Snapshot::fee(const TxId &id) const
{
    const auto it = txs_.find(id);
    if (it == txs_.end())
        throw error(errc::not_found, "unknown tx " + id.str());
    return it->second.fee;
}

std::vector<Address> Snapshot::addresses() const
{
    std::vector<Address> out;
    out.reserve(address_txs_.size());
    for (const auto &[a, _] : address_txs_)
        out.push_back(a);
    std::sort(out.begin(), out.end());
    return out;
}

std::span<const std::size_t> Snapshot::outgoing_edge_ids(const TxId &id) const noexcept
{
    const auto it = out_edges_.find(id);
    return it == out_edges_.end() ? std::span<const std::size_t>{} : std::span<const std::size_t>{it->second};
}

std::span<const std::size_t> Snapshot::incoming_edge_ids(const TxId &id) const noexcept
{
    const auto it = in_edges_.find(id);
    return it == in_edges_.end() ? std::span<const std::size_t>{} : std::span<const std::size_t>{it->second};
}

void Snapshot::index_address(const Address &address, const TxId &tx)
{
    auto &list = address_txs_[address];
    if (list.empty() || list.back() != tx)
        list.push_back(tx);
}

void Snapshot::apply_block(const std::shared_ptr<const ParsedBlock> &block, std::vector<Interaction> &new_interactions)
{
    const auto position = static_cast<uint32_t>(blocks_.size());
    blocks_.push_back(block);
    chains_[block->channel].push_back(position);

    const auto resolver = [&](const TxId &source, uint32_t index) -> std::optional<aggregator::ResolvedOutput> {
        const auto *src = find_tx(source);
        // channels are separate ledgers, so cross-channel references stay dangling
        if (src == nullptr || src->channel != block->channel || index >= src->outputs.size())
            return std::nullopt;
        const auto &out = src->outputs[index];
        return aggregator::ResolvedOutput{out.address, out.value, spent_.contains({source, index})};
    };

    for (uint32_t i = 0; i < block->txs.size(); ++i) {
        const auto &tx = block->txs[i];
        if (!txs_.emplace(tx.id, TxEntry{{position, i}, std::nullopt}).second)
            throw error(errc::duplicate_tx_id, "tx " + tx.id.str() + " is already stored");
        // signers and outputs before input owners keeps address lists in ledger order
        for (const auto &a : mentioned_addresses(tx))
            index_address(a, tx.id);

        std::vector<TxEdge> tx_edges;
        if (tx.model == TxModel::utxo) {
            auto linked = aggregator::link_inputs(tx, resolver);
            for (auto &e : linked.edges) {
                const auto edge_id = edges_.size();
                out_edges_[e.source_tx].push_back(edge_id);
                in_edges_[e.target_tx].push_back(edge_id);
                spent_.emplace(aggregator::OutPoint{e.source_tx, e.output_index}, edge_id);
                index_address(e.owner, tx.id);
                edges_.push_back(e);
            }
            dangling_.insert(dangling_.end(), linked.dangling.begin(), linked.dangling.end());
            double_spends_.insert(double_spends_.end(), linked.double_spends.begin(), linked.double_spends.end());
            txs_.at(tx.id).fee = aggregator::fee(tx, linked.edges);
            tx_edges = std::move(linked.edges);
        }
        auto derived = aggregator::derive_interactions(tx, tx_edges);
        std::move(derived.begin(), derived.end(), std::back_inserter(new_interactions));
    }
}

// ---------------------------------------------------------------- FileJournal

namespace {

[[noreturn]] void throw_errno(const std::string &what, int err)
{
    throw error(err == ENOSPC ? errc::storage_full : errc::io, what + ": " + std::strerror(err));
}

std::string header_line()
{
    return std::string(FileJournal::magic) + " v" + std::to_string(FileJournal::version) + "\n";
}

}  // namespace

std::pair<std::unique_ptr<FileJournal>, FileJournal::Replay> FileJournal::open(const std::filesystem::path &path)
{
    Replay replay;
    std::string contents;
    if (std::filesystem::exists(path)) {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw error(errc::io, "cannot read store file " + path.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        contents = buf.str();
    }

    uint64_t good_size = 0;
    if (!contents.empty()) {
        const auto eol = contents.find('\n');
        const auto first = std::string_view(contents).substr(0, eol);
        const std::string prefix = std::string(magic) + " v";
        if (!first.starts_with(prefix))
            throw error(errc::incompatible_format, path.string() + " is not a ledgerlens store");
        if (first.substr(prefix.size()) != std::to_string(version))
            throw error(errc::incompatible_format, "unsupported store format version '" + std::string(first.substr(prefix.size()))
                    + "' in " + path.string() + " (this build reads v" + std::to_string(version) + ")");
        if (eol == std::string::npos)
            throw error(errc::incompatible_format, "truncated store header in " + path.string());
        good_size = eol + 1;

        std::map<ChannelId, parser::ChainTip> tips;
        std::string pending;  // block lines of the batch being read
        std::size_t pos = good_size;
        while (pos < contents.size()) {
            const auto end = contents.find('\n', pos);
            if (end == std::string::npos)
                break;  // torn write
            const auto line = std::string_view(contents).substr(pos, end - pos);
            pos = end + 1;
            if (line.starts_with("B ")) {
                pending.append(line.substr(2));
                pending.push_back('\n');
                continue;
            }
            if (line.starts_with("C ")) {
                auto parsed = parser::parse_string(pending, parser::ParseMode::strict, {.anchors = tips});
                if (!parsed.report.errors.empty())
                    throw error(errc::io, "corrupt batch in " + path.string() + ": " + parsed.report.errors.front().detail);
                for (const auto &b : parsed.blocks)
                    tips.insert_or_assign(b.channel, parser::ChainTip{b.height, b.hash, b.timestamp});
                replay.batches.push_back(std::move(parsed.blocks));
                pending.clear();
                good_size = pos;
                continue;
            }
            if (line.starts_with("A ") && pending.empty()) {
                try {
                    replay.annotations.push_back(nlohmann::json::parse(line.substr(2)));
                } catch (const nlohmann::json::exception &e) {
                    throw error(errc::io, "corrupt annotation in " + path.string() + ": " + e.what());
                }
                good_size = pos;
                continue;
            }
            throw error(errc::io, "corrupt record in " + path.string());
        }
    }

    const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT, 0644);
    if (fd < 0)
        throw_errno("cannot open store file " + path.string(), errno);
    std::unique_ptr<FileJournal> journal(new FileJournal(path, fd, good_size));
    if (::ftruncate(fd, static_cast<off_t>(good_size)) != 0)
        throw_errno("cannot truncate store file " + path.string(), errno);
    if (good_size == 0)
        journal->append(header_line());
    return {std::move(journal), std::move(replay)};
}

FileJournal::FileJournal(std::filesystem::path path, int fd, uint64_t size)
    : path_(std::move(path)), fd_(fd), size_(size)
{
}

FileJournal::~FileJournal()
{
    ::close(fd_);
}

void FileJournal::append(const std::string &bytes)
{
    std::size_t written = 0;
    while (written < bytes.size()) {
        const auto n = ::pwrite(fd_, bytes.data() + written, bytes.size() - written, static_cast<off_t>(size_ + written));
        if (n < 0) {
            if (errno == EINTR)
                continue;
            const int err = errno;
            [[maybe_unused]] const int rc = ::ftruncate(fd_, static_cast<off_t>(size_));
            throw_errno("write to " + path_.string() + " failed", err);
        }
        written += static_cast<std::size_t>(n);
    }
    if (::fdatasync(fd_) != 0) {
        const int err = errno;
        [[maybe_unused]] const int rc = ::ftruncate(fd_, static_cast<off_t>(size_));
        throw_errno("sync of " + path_.string() + " failed", err);
    }
    size_ += bytes.size();
}

void FileJournal::append_batch(std::span<const std::shared_ptr<const ParsedBlock>> blocks, uint64_t snapshot_id)
{
    std::string bytes;
    for (const auto &b : blocks) {
        bytes += "B ";
        bytes += parser::to_dump_line(*b);
        bytes += '\n';
    }
    bytes += "C " + std::to_string(snapshot_id) + "\n";
    append(bytes);
}

void FileJournal::append_annotation(const nlohmann::json &record)
{
    append("A " + record.dump() + "\n");
}

// ---------------------------------------------------------------- Store

Store::Store(std::unique_ptr<Journal> journal)
    : journal_(std::move(journal)), current_(std::make_shared<Snapshot>())
{
}

Store::~Store() = default;

std::unique_ptr<Store> Store::in_memory()
{
    return std::make_unique<Store>();
}

std::unique_ptr<Store> Store::open(const std::filesystem::path &path)
{
    auto [journal, replay] = FileJournal::open(path);
    auto store = std::make_unique<Store>(std::move(journal));
    for (auto &batch : replay.batches)
        store->commit(std::move(batch), false);
    store->annotations_ = std::move(replay.annotations);
    return store;
}

std::shared_ptr<const Snapshot> Store::snapshot() const
{
    std::lock_guard lock(publish_mutex_);
    return current_;
}

StoreSnapshot Store::ingest(std::vector<ParsedBlock> blocks)
{
    std::lock_guard lock(writer_mutex_);
    return commit(std::move(blocks), true);
}

StoreSnapshot Store::commit(std::vector<ParsedBlock> blocks, bool journal)
{
    const auto current = snapshot();

    struct Tip {
        uint64_t height;
        BlockHash hash;
    };
    std::map<ChannelId, Tip> batch_tips;
    std::vector<std::shared_ptr<const ParsedBlock>> fresh;
    for (auto &b : blocks) {
        const auto where = "block " + std::to_string(b.height) + " on channel " + b.channel.str();
        const auto chain = current->chains_.find(b.channel);
        const uint64_t stored = chain == current->chains_.end() ? 0 : chain->second.size();
        if (b.height < stored) {
            if (current->blocks_[chain->second[b.height]]->hash == b.hash)
                continue;
            throw error(errc::tip_conflict, where + " conflicts with the stored block at that height");
        }
        std::optional<Tip> tip;
        if (const auto it = batch_tips.find(b.channel); it != batch_tips.end()) {
            tip = it->second;
        } else if (stored > 0) {
            const auto &last = *current->blocks_[chain->second.back()];
            tip = Tip{last.height, last.hash};
        }
        if (tip && b.height <= tip->height) {
            // repeated within the batch
            const auto dup = std::find_if(fresh.begin(), fresh.end(),
                [&](const auto &f) { return f->channel == b.channel && f->height == b.height; });
            if (dup != fresh.end() && (*dup)->hash == b.hash)
                continue;
            throw error(errc::tip_conflict, where + " conflicts with a block earlier in the batch");
        }
        const bool links = tip ? (b.height == tip->height + 1 && b.prev_hash == tip->hash)
                               : (b.height == 0 && b.prev_hash == BlockHash::zero());
        if (!links)
            throw error(errc::tip_conflict, where + " does not extend the stored tip");
        batch_tips.insert_or_assign(b.channel, Tip{b.height, b.hash});
        fresh.push_back(std::make_shared<const ParsedBlock>(std::move(b)));
    }
    if (fresh.empty())
        return current->info_;

    auto next = std::make_shared<Snapshot>(*current);
    std::vector<Interaction> added;
    for (const auto &b : fresh)
        next->apply_block(b, added);

    std::stable_sort(added.begin(), added.end(),
        [](const Interaction &a, const Interaction &b) { return a.timestamp < b.timestamp; });
    auto &log = next->interactions_;
    const auto old_size = log.size();
    std::move(added.begin(), added.end(), std::back_inserter(log));
    if (old_size > 0 && old_size < log.size() && log[old_size].timestamp < log[old_size - 1].timestamp) {
        std::inplace_merge(log.begin(), log.begin() + static_cast<std::ptrdiff_t>(old_size), log.end(),
            [](const Interaction &a, const Interaction &b) { return a.timestamp < b.timestamp; });
    }

    auto &info = next->info_;
    info.snapshot_id = current->id() + 1;
    info.tips.clear();
    for (const auto &[channel, positions] : next->chains_) {
        const auto &last = *next->blocks_[positions.back()];
        info.tips.push_back(ChannelTip{channel, last.height, last.hash, last.timestamp});
    }
    info.counts = Counts{
        .blocks = next->blocks_.size(),
        .txs = next->txs_.size(),
        .edges = next->edges_.size(),
        .interactions = next->interactions_.size(),
    };

    if (journal)
        journal_->append_batch(fresh, info.snapshot_id);

    std::lock_guard lock(publish_mutex_);
    current_ = next;
    return next->info_;
}

void Store::annotate(const nlohmann::json &record)
{
    std::lock_guard writer(writer_mutex_);
    journal_->append_annotation(record);
    std::lock_guard lock(publish_mutex_);
    annotations_.push_back(record);
}

std::vector<nlohmann::json> Store::annotations() const
{
    std::lock_guard lock(publish_mutex_);
    return annotations_;
}

}  // namespace ledgerlens::store
