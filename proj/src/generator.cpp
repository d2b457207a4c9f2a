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
#include <ledgerlens/generator.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <unordered_set>

namespace ledgerlens::gen {

using nlohmann::json;

GenModel parse_model(std::string_view text)
{
    if (text == "utxo")
        return GenModel::utxo;
    if (text == "account")
        return GenModel::account;
    if (text == "mixed")
        return GenModel::mixed;
    throw error(errc::invalid_params, "model must be utxo, account or mixed, got '" + std::string(text) + "'");
}

Scenario parse_scenario(std::string_view text)
{
    if (text == "random")
        return Scenario::random;
    if (text == "grants")
        return Scenario::grants;
    throw error(errc::invalid_params, "scenario must be random or grants, got '" + std::string(text) + "'");
}

std::string_view to_string(GenModel m) noexcept
{
    switch (m) {
        case GenModel::utxo: return "utxo";
        case GenModel::account: return "account";
        case GenModel::mixed: return "mixed";
    }
    return "utxo";
}

std::string_view to_string(Scenario s) noexcept
{
    return s == Scenario::random ? "random" : "grants";
}

namespace {

uint32_t org_count(const GenParams &p)
{
    return std::max<uint32_t>(2, p.addresses / 3);
}

}  // namespace

void validate(const GenParams &p)
{
    if (p.channels < 1 || p.blocks < 1 || p.txs_per_block < 1 || p.addresses < 1)
        throw error(errc::invalid_params, "channels, blocks, txs and addresses must all be at least 1");
    if (!(p.multi_input_rate >= 0.0 && p.multi_input_rate <= 1.0))
        throw error(errc::invalid_params, "multi-input rate must lie in [0, 1]");
    if (p.scenario == Scenario::grants) {
        if (p.addresses < 2)
            throw error(errc::invalid_params, "the grants scenario needs at least 2 addresses");
        if (org_count(p) < p.channels)
            throw error(errc::invalid_params, "the grants scenario needs at least one organization per channel");
    }
}

uint64_t Rng::below(uint64_t bound)
{
    if (bound == 0)
        throw error(errc::invalid_argument, "Rng::below needs a positive bound");
    // Lemire's multiply-and-reject
    auto m = static_cast<unsigned __int128>(next()) * bound;
    auto low = static_cast<uint64_t>(m);
    if (low < bound) {
        const uint64_t threshold = (0 - bound) % bound;
        while (low < threshold) {
            m = static_cast<unsigned __int128>(next()) * bound;
            low = static_cast<uint64_t>(m);
        }
    }
    return static_cast<uint64_t>(m >> 64);
}

namespace {

constexpr std::array contracts{"transfer", "exchange", "payroll"};

struct Utxo {
    std::string tx;
    uint32_t index;
    uint64_t value;
};

class Partition {
public:
    explicit Partition(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }

    std::size_t root(std::size_t x)
    {
        while (parent_[x] != x)
            x = parent_[x] = parent_[parent_[x]];
        return x;
    }

    void join(std::size_t a, std::size_t b)
    {
        a = root(a);
        b = root(b);
        if (a != b)
            parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<std::size_t> parent_;
};

std::string padded(std::string_view prefix, std::size_t i, std::size_t n)
{
    const auto width = std::max<std::size_t>(4, std::to_string(n).size());
    auto digits = std::to_string(i);
    return std::string(prefix) + std::string(width - digits.size(), '0') + digits;
}

class Builder {
public:
    explicit Builder(const GenParams &p) : p_(p), rng_(p.seed), used_(0) {}

    Generated run()
    {
        setup();
        for (uint32_t c = 0; c < p_.channels; ++c) {
            channels_.push_back(Channel{
                .name = "ch-" + std::to_string(c),
                .prev_hash = std::string(64, '0'),
                .clock = parse_rfc3339("2021-03-01T00:00:00Z"),
                .pools = std::vector<std::vector<Utxo>>(addresses_.size()),
            });
        }
        for (uint32_t b = 0; b < p_.blocks; ++b) {
            for (auto &ch : channels_)
                emit_block(ch, b);
        }
        finish_truth();
        return std::move(out_);
    }

private:
    struct Channel {
        std::string name;
        std::string prev_hash;
        Timestamp clock;
        std::vector<std::vector<Utxo>> pools;  // unspent outputs by owner index
    };

    void setup()
    {
        if (p_.scenario == Scenario::grants) {
            const auto orgs = org_count(p_);
            for (uint32_t o = 0; o < orgs; ++o) {
                const auto name = padded("org-", o + 1, orgs);
                org_names_.push_back(name);
                out_.truth.organizations[name].channel = "ch-" + std::to_string(o % p_.channels);
            }
            org_accounts_.resize(orgs);
            for (uint32_t i = 0; i < p_.addresses; ++i) {
                const auto o = i % orgs;
                const auto name = org_names_[o] + ".acct-" + std::to_string(i / orgs + 1);
                org_accounts_[o].push_back(addresses_.size());
                out_.truth.organizations[org_names_[o]].members.push_back(name);
                addresses_.push_back(name);
            }
        } else {
            for (uint32_t i = 0; i < p_.addresses; ++i)
                addresses_.push_back(padded("addr-", i + 1, p_.addresses));
            // hidden owners: runs of 1..4 consecutive addresses
            for (std::size_t i = 0; i < addresses_.size();) {
                const auto size = std::min<std::size_t>(rng_.between(1, 4), addresses_.size() - i);
                std::vector<std::size_t> members(size);
                std::iota(members.begin(), members.end(), i);
                entity_of_.insert(entity_of_.end(), size, entities_.size());
                entities_.push_back(std::move(members));
                i += size;
            }
        }
        used_ = std::vector<bool>(addresses_.size(), false);
        co_spent_ = std::make_unique<Partition>(addresses_.size());
    }

    std::size_t random_address() { return rng_.below(addresses_.size()); }

    void note_interaction(std::size_t from, std::size_t to, uint64_t value)
    {
        auto &t = out_.truth.expected_interaction_totals[{addresses_[from], addresses_[to]}];
        ++t.count;
        t.value += value;
    }

    std::optional<std::size_t> owner_with_outputs(const Channel &ch, std::size_t start) const
    {
        for (std::size_t k = 0; k < ch.pools.size(); ++k) {
            const auto a = (start + k) % ch.pools.size();
            if (!ch.pools[a].empty())
                return a;
        }
        return std::nullopt;
    }

    Utxo take(Channel &ch, std::size_t owner)
    {
        auto &pool = ch.pools[owner];
        const auto i = rng_.below(pool.size());
        std::swap(pool[i], pool.back());
        auto u = std::move(pool.back());
        pool.pop_back();
        return u;
    }

    // Owners picked for a co-spend: >= 2 addresses of one hidden entity that
    // currently hold outputs on this channel.
    std::vector<std::size_t> pick_co_spenders(const Channel &ch)
    {
        const auto start = rng_.below(entities_.size());
        for (std::size_t k = 0; k < entities_.size(); ++k) {
            const auto &members = entities_[(start + k) % entities_.size()];
            std::vector<std::size_t> holders;
            for (const auto m : members) {
                if (!ch.pools[m].empty())
                    holders.push_back(m);
            }
            if (holders.size() < 2)
                continue;
            for (std::size_t i = holders.size() - 1; i > 0; --i)
                std::swap(holders[i], holders[rng_.below(i + 1)]);
            holders.resize(rng_.between(2, std::min<std::size_t>(3, holders.size())));
            std::sort(holders.begin(), holders.end());
            return holders;
        }
        return {};
    }

    json utxo_tx(Channel &ch, Timestamp ts)
    {
        struct Spent {
            Utxo utxo;
            std::size_t owner;
        };
        std::vector<Spent> spent;
        const bool any = owner_with_outputs(ch, 0).has_value();
        if (any && !rng_.chance(0.1)) {
            std::vector<std::size_t> owners;
            if (p_.multi_input_rate > 0 && rng_.chance(p_.multi_input_rate))
                owners = pick_co_spenders(ch);
            if (owners.empty())
                owners.push_back(*owner_with_outputs(ch, random_address()));
            for (const auto o : owners)
                spent.push_back(Spent{take(ch, o), o});
        }

        std::vector<std::pair<std::size_t, uint64_t>> outputs;
        if (spent.empty()) {
            const auto n = rng_.between(1, 2);
            for (uint64_t j = 0; j < n; ++j)
                outputs.emplace_back(random_address(), rng_.between(1000, 100000));
        } else {
            uint64_t total = 0;
            for (const auto &s : spent)
                total += s.utxo.value;
            const uint64_t fee = total >= 100 ? rng_.below(total / 100 + 1) : 0;
            uint64_t rest = total - fee;
            uint64_t n = rng_.between(1, 3);
            if (rest < n)
                n = 1;
            const auto &home = entities_[entity_of_[spent.front().owner]];
            for (uint64_t j = 0; j < n; ++j) {
                const auto left = n - j;
                const uint64_t v = left == 1 ? rest : 1 + rng_.below(rest - left + 1);
                rest -= v;
                const auto to = rng_.chance(0.3) ? home[rng_.below(home.size())] : random_address();
                outputs.emplace_back(to, v);
            }
        }

        const char *contract = rng_.chance(0.4) ? nullptr : contracts[rng_.below(contracts.size())];
        std::vector<std::size_t> signer_ids;
        for (const auto &s : spent)
            signer_ids.push_back(s.owner);
        std::sort(signer_ids.begin(), signer_ids.end());
        signer_ids.erase(std::unique(signer_ids.begin(), signer_ids.end()), signer_ids.end());

        json tx;
        std::string id;
        // Only mints can repeat an earlier tx byte for byte; nudge until unique.
        for (;;) {
            tx = {{"model", "utxo"}};
            if (contract != nullptr)
                tx["contract"] = contract;
            json inputs = json::array();
            for (const auto &s : spent)
                inputs.push_back({{"tx", s.utxo.tx}, {"index", s.utxo.index}});
            json outs = json::array();
            for (const auto &[a, v] : outputs)
                outs.push_back({{"address", addresses_[a]}, {"value", v}});
            json signers = json::array();
            for (const auto s : signer_ids)
                signers.push_back(addresses_[s]);
            tx["inputs"] = std::move(inputs);
            tx["outputs"] = std::move(outs);
            tx["signers"] = std::move(signers);
            id = sha256_hex(tx.dump());
            if (ids_.insert(id).second)
                break;
            ++outputs.front().second;
        }
        tx["id"] = id;

        for (uint32_t i = 0; i < spent.size(); ++i) {
            const auto &s = spent[i];
            out_.truth.expected_edges.push_back(TxEdge{
                .source_tx = TxId(s.utxo.tx),
                .output_index = s.utxo.index,
                .target_tx = TxId(id),
                .input_index = i,
                .value = s.utxo.value,
                .owner = Address(addresses_[s.owner]),
                .timestamp = ts,
            });
            used_[s.owner] = true;
            co_spent_->join(spent.front().owner, s.owner);
        }
        for (uint32_t j = 0; j < outputs.size(); ++j) {
            const auto [a, v] = outputs[j];
            used_[a] = true;
            ch.pools[a].push_back(Utxo{id, j, v});
        }

        // proportional attribution of each output to the input owners
        std::map<std::string, uint64_t> share_of;
        uint64_t total_in = 0;
        for (const auto &s : spent) {
            share_of[addresses_[s.owner]] += s.utxo.value;
            total_in += s.utxo.value;
        }
        for (const auto &[a, v] : outputs) {
            if (total_in == 0) {
                note_interaction(a, a, v);
                continue;
            }
            uint64_t given = 0;
            bool first = true;
            uint64_t first_part = 0;
            std::string first_owner;
            for (const auto &[owner, part] : share_of) {
                const auto portion = static_cast<uint64_t>(static_cast<unsigned __int128>(v) * part / total_in);
                given += portion;
                if (first) {
                    first = false;
                    first_owner = owner;
                    first_part = portion;
                    continue;
                }
                auto &t = out_.truth.expected_interaction_totals[{owner, addresses_[a]}];
                ++t.count;
                t.value += portion;
            }
            auto &t = out_.truth.expected_interaction_totals[{first_owner, addresses_[a]}];
            ++t.count;
            t.value += first_part + (v - given);
        }
        return tx;
    }

    json account_tx(std::size_t from, std::size_t to, uint64_t value, const char *contract)
    {
        json tx = {
            {"model", "account"},
            {"from", addresses_[from]},
            {"to", addresses_[to]},
            {"value", value},
            {"nonce", nonces_[from]++},
        };
        if (contract != nullptr)
            tx["contract"] = contract;
        const auto id = sha256_hex(tx.dump());
        if (!ids_.insert(id).second)
            throw error(errc::invalid_params, "generator produced a repeated account tx");
        tx["id"] = id;
        used_[from] = used_[to] = true;
        note_interaction(from, to, value);
        return tx;
    }

    json random_account_tx()
    {
        const auto from = random_address();
        const auto to = random_address();
        const char *contract = rng_.chance(0.4) ? nullptr : contracts[rng_.below(contracts.size())];
        return account_tx(from, to, rng_.between(1, 10000), contract);
    }

    json grants_tx(Channel &ch)
    {
        std::vector<std::size_t> orgs;
        for (std::size_t o = 0; o < org_names_.size(); ++o) {
            if (out_.truth.organizations[org_names_[o]].channel == ch.name)
                orgs.push_back(o);
        }
        const auto account_of = [&](std::size_t org) {
            const auto &accts = org_accounts_[org];
            return accts[rng_.below(accts.size())];
        };
        if (orgs.size() >= 2 && !rng_.chance(0.3)) {
            const auto granter = orgs[rng_.below(orgs.size())];
            auto grantee = orgs[rng_.below(orgs.size() - 1)];
            if (grantee == granter)
                grantee = orgs.back();
            ++out_.truth.grants_per_org[org_names_[granter]];
            ++out_.truth.grants_between[{org_names_[granter], org_names_[grantee]}];
            return account_tx(account_of(granter), account_of(grantee), 1, "grant_access");
        }
        const auto org = orgs[rng_.below(orgs.size())];
        ++out_.truth.organizations[org_names_[org]].data_models;
        const auto acct = account_of(org);
        return account_tx(acct, acct, 1, "publish_model");
    }

    void emit_block(Channel &ch, uint32_t height)
    {
        if (height > 0)
            ch.clock += std::chrono::seconds{rng_.between(60, 7200)};
        json txs = json::array();
        std::string ids;
        for (uint32_t i = 0; i < p_.txs_per_block; ++i) {
            json tx;
            if (p_.scenario == Scenario::grants)
                tx = grants_tx(ch);
            else if (p_.model == GenModel::utxo || (p_.model == GenModel::mixed && rng_.chance(0.5)))
                tx = utxo_tx(ch, ch.clock);
            else
                tx = random_account_tx();
            ids += tx["id"].get<std::string>();
            txs.push_back(std::move(tx));
        }
        const auto hash = sha256_hex(ch.name + "|" + std::to_string(height) + "|" + ch.prev_hash + "|" + ids);
        const json block = {
            {"height", height},
            {"hash", hash},
            {"prev_hash", ch.prev_hash},
            {"timestamp", format_rfc3339(ch.clock)},
            {"channel", ch.name},
            {"txs", std::move(txs)},
        };
        out_.dump += block.dump();
        out_.dump += '\n';
        ch.prev_hash = hash;
        ++out_.truth.block_count;
        out_.truth.tx_count += p_.txs_per_block;
    }

    void finish_truth()
    {
        std::map<std::size_t, std::vector<std::string>> groups;
        for (std::size_t a = 0; a < addresses_.size(); ++a) {
            if (used_[a])
                groups[co_spent_->root(a)].push_back(addresses_[a]);
        }
        for (auto &[_, members] : groups) {
            std::sort(members.begin(), members.end());
            out_.truth.expected_clusters.push_back(std::move(members));
        }
        std::sort(out_.truth.expected_clusters.begin(), out_.truth.expected_clusters.end());
    }

    const GenParams &p_;
    Rng rng_;
    Generated out_;
    std::vector<std::string> addresses_;
    std::vector<std::vector<std::size_t>> entities_;
    std::vector<std::size_t> entity_of_;
    std::vector<std::string> org_names_;
    std::vector<std::vector<std::size_t>> org_accounts_;
    std::vector<Channel> channels_;
    std::vector<bool> used_;
    std::unique_ptr<Partition> co_spent_;
    std::map<std::size_t, uint64_t> nonces_;  // per sender, across channels
    std::unordered_set<std::string> ids_;
};

}  // namespace

Generated generate(const GenParams &params)
{
    validate(params);
    return Builder(params).run();
}

json to_json(const GroundTruth &truth)
{
    json clusters = json::array();
    for (const auto &c : truth.expected_clusters)
        clusters.push_back(c);
    json edges = json::array();
    for (const auto &e : truth.expected_edges) {
        edges.push_back({
            {"source_tx", e.source_tx.str()},
            {"output_index", e.output_index},
            {"target_tx", e.target_tx.str()},
            {"input_index", e.input_index},
            {"value", e.value},
            {"owner", e.owner.str()},
            {"timestamp", format_rfc3339(e.timestamp)},
        });
    }
    json totals = json::array();
    for (const auto &[k, t] : truth.expected_interaction_totals)
        totals.push_back({{"from", k.first}, {"to", k.second}, {"count", t.count}, {"value", t.value}});
    json between = json::array();
    for (const auto &[k, n] : truth.grants_between)
        between.push_back({{"from", k.first}, {"to", k.second}, {"count", n}});
    json orgs = json::object();
    for (const auto &[name, o] : truth.organizations)
        orgs[name] = {{"channel", o.channel}, {"members", o.members}, {"data_models", o.data_models}};
    return {
        {"block_count", truth.block_count},
        {"tx_count", truth.tx_count},
        {"expected_clusters", std::move(clusters)},
        {"expected_edges", std::move(edges)},
        {"expected_interaction_totals", std::move(totals)},
        {"grants_per_org", truth.grants_per_org},
        {"grants_between", std::move(between)},
        {"organizations", std::move(orgs)},
    };
}

}  // namespace ledgerlens::gen
