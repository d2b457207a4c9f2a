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
#include <ledgerlens/clustering.hpp>

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>

namespace ledgerlens::preprocess {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

class DisjointSets {
public:
    explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1)
    {
        std::iota(parent_.begin(), parent_.end(), std::size_t{0});
    }

    std::size_t find(std::size_t x)
    {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::size_t a, std::size_t b)
    {
        a = find(a);
        b = find(b);
        if (a == b)
            return;
        if (size_[a] < size_[b])
            std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
    }

private:
    std::vector<std::size_t> parent_;
    std::vector<std::size_t> size_;
};

[[noreturn]] void invalid(const std::string &detail)
{
    throw error(errc::invalid_rule, detail);
}

Address rule_address(const nlohmann::json &v)
{
    if (!v.is_string())
        invalid("rule addresses must be strings");
    try {
        return Address(v.get<std::string>());
    } catch (const error &e) {
        invalid(e.what());
    }
}

}  // namespace

void validate(const ClusterRule &rule)
{
    std::visit(overloaded{
                   [](const HeuristicToggle &h) {
                       if (h.name != multi_input_heuristic)
                           invalid("unknown heuristic '" + h.name + "'");
                   },
                   [](const MergeRule &m) {
                       std::set<Address> distinct(m.addresses.begin(), m.addresses.end());
                       if (distinct.size() < 2)
                           invalid("a merge rule needs at least two distinct addresses");
                   },
                   [](const IsolateRule &) {},
               },
        rule);
}

ClusterRule rule_from_json(const nlohmann::json &j)
{
    if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string())
        invalid("rule must be an object with a string 'kind'");
    const auto kind = j["kind"].get<std::string>();
    ClusterRule rule = [&]() -> ClusterRule {
        if (kind == "heuristic") {
            if (!j.contains("name") || !j["name"].is_string() || !j.contains("enabled") || !j["enabled"].is_boolean())
                invalid("heuristic rule needs 'name' and boolean 'enabled'");
            return HeuristicToggle{j["name"].get<std::string>(), j["enabled"].get<bool>()};
        }
        if (kind == "merge") {
            if (!j.contains("addresses") || !j["addresses"].is_array())
                invalid("merge rule needs an 'addresses' array");
            MergeRule m;
            for (const auto &a : j["addresses"])
                m.addresses.push_back(rule_address(a));
            return m;
        }
        if (kind == "isolate") {
            if (!j.contains("address"))
                invalid("isolate rule needs an 'address'");
            return IsolateRule{rule_address(j["address"])};
        }
        invalid("unknown rule kind '" + kind + "'");
    }();
    validate(rule);
    return rule;
}

nlohmann::json to_json(const ClusterRule &rule)
{
    return std::visit(overloaded{
                          [](const HeuristicToggle &h) {
                              return nlohmann::json{{"kind", "heuristic"}, {"name", h.name}, {"enabled", h.enabled}};
                          },
                          [](const MergeRule &m) {
                              auto addrs = nlohmann::json::array();
                              for (const auto &a : m.addresses)
                                  addrs.push_back(a.str());
                              return nlohmann::json{{"kind", "merge"}, {"addresses", std::move(addrs)}};
                          },
                          [](const IsolateRule &i) {
                              return nlohmann::json{{"kind", "isolate"}, {"address", i.address.str()}};
                          },
                      },
        rule);
}

const Address &Clustering::cluster_of(const Address &address) const
{
    const auto it = partition.find(address);
    return it == partition.end() ? address : it->second;
}

std::size_t Clustering::member_count(const Address &cluster_id) const
{
    const auto it = clusters.find(cluster_id);
    return it == clusters.end() ? 1 : it->second.members.size();
}

Clustering cluster_addresses(std::span<const Address> domain, std::span<const std::vector<Address>> co_spend_sets,
    std::span<const ClusterRule> rules)
{
    std::vector<Address> sorted(domain.begin(), domain.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::unordered_map<Address, std::size_t> index;
    index.reserve(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i)
        index.emplace(sorted[i], i);

    bool multi_input = true;
    std::vector<bool> isolated(sorted.size(), false);
    for (const auto &rule : rules) {
        validate(rule);
        if (const auto *h = std::get_if<HeuristicToggle>(&rule))
            multi_input = h->enabled;
        else if (const auto *iso = std::get_if<IsolateRule>(&rule)) {
            if (const auto it = index.find(iso->address); it != index.end())
                isolated[it->second] = true;
        }
    }

    DisjointSets sets(sorted.size());
    const auto unite_all = [&](std::span<const Address> group) {
        std::optional<std::size_t> anchor;
        for (const auto &a : group) {
            const auto it = index.find(a);
            if (it == index.end() || isolated[it->second])
                continue;
            if (anchor)
                sets.unite(*anchor, it->second);
            else
                anchor = it->second;
        }
    };
    if (multi_input) {
        for (const auto &group : co_spend_sets)
            unite_all(group);
    }
    for (const auto &rule : rules) {
        if (const auto *m = std::get_if<MergeRule>(&rule))
            unite_all(m->addresses);
    }

    Clustering result;
    result.rules_applied.assign(rules.begin(), rules.end());
    // `sorted` is ascending, so the first member seen for a root is its smallest.
    std::vector<std::optional<std::size_t>> representative(sorted.size());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        auto &rep = representative[sets.find(i)];
        if (!rep)
            rep = i;
        const auto &id = sorted[*rep];
        result.partition.emplace_hint(result.partition.end(), sorted[i], id);
        result.clusters.try_emplace(id).first->second.members.push_back(sorted[i]);
    }
    return result;
}

std::vector<std::vector<Address>> co_spend_sets(const store::Snapshot &snapshot)
{
    std::vector<std::vector<Address>> out;
    const auto edges = snapshot.edges();
    for (const auto &block : snapshot.blocks()) {
        for (const auto &tx : block->txs) {
            const auto ids = snapshot.incoming_edge_ids(tx.id);
            if (ids.empty())
                continue;
            std::vector<Address> owners;
            owners.reserve(ids.size());
            for (const auto e : ids)
                owners.push_back(edges[e].owner);
            std::sort(owners.begin(), owners.end());
            owners.erase(std::unique(owners.begin(), owners.end()), owners.end());
            out.push_back(std::move(owners));
        }
    }
    return out;
}

Clustering build_clustering(const store::Snapshot &snapshot, std::span<const ClusterRule> rules)
{
    const auto domain = snapshot.addresses();
    const auto groups = co_spend_sets(snapshot);
    auto result = cluster_addresses(domain, groups, rules);
    result.snapshot_id = snapshot.id();
    return result;
}

void ClusteringRegistry::add_rules(std::vector<ClusterRule> rules)
{
    for (const auto &r : rules)
        validate(r);
    std::lock_guard lock(mutex_);
    std::move(rules.begin(), rules.end(), std::back_inserter(rules_));
}

void ClusteringRegistry::replace_rules(std::vector<ClusterRule> rules)
{
    for (const auto &r : rules)
        validate(r);
    std::lock_guard lock(mutex_);
    rules_ = std::move(rules);
}

std::vector<ClusterRule> ClusteringRegistry::rules() const
{
    std::lock_guard lock(mutex_);
    return rules_;
}

std::shared_ptr<const Clustering> ClusteringRegistry::publish(Clustering clustering)
{
    std::lock_guard lock(mutex_);
    clustering.version = versions_.size() + 1;
    versions_.push_back(std::make_shared<const Clustering>(std::move(clustering)));
    return versions_.back();
}

std::shared_ptr<const Clustering> ClusteringRegistry::get(uint64_t version) const
{
    std::lock_guard lock(mutex_);
    if (version == 0 || version > versions_.size())
        throw error(errc::unknown_clustering_version, "no clustering version " + std::to_string(version));
    return versions_[version - 1];
}

std::shared_ptr<const Clustering> ClusteringRegistry::latest() const
{
    std::lock_guard lock(mutex_);
    return versions_.empty() ? nullptr : versions_.back();
}

}  // namespace ledgerlens::preprocess
