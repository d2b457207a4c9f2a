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

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include <ledgerlens/store.hpp>

namespace ledgerlens::preprocess {

inline constexpr std::string_view multi_input_heuristic = "multi-input";

struct HeuristicToggle {
    std::string name;
    bool enabled;

    friend bool operator==(const HeuristicToggle &, const HeuristicToggle &) = default;
};

struct MergeRule {
    std::vector<Address> addresses;

    friend bool operator==(const MergeRule &, const MergeRule &) = default;
};

/// Pins an address into its own singleton, overriding heuristics and merges.
struct IsolateRule {
    Address address;

    friend bool operator==(const IsolateRule &, const IsolateRule &) = default;
};

using ClusterRule = std::variant<HeuristicToggle, MergeRule, IsolateRule>;

/// Throws error{invalid_rule}.
void validate(const ClusterRule &rule);

/// {"kind": "heuristic", "name": "multi-input", "enabled": bool}
/// {"kind": "merge", "addresses": [..]}
/// {"kind": "isolate", "address": ".."}
ClusterRule rule_from_json(const nlohmann::json &j);
nlohmann::json to_json(const ClusterRule &rule);

struct Cluster {
    std::vector<Address> members;  // sorted; members.front() is the cluster id
    std::optional<std::string> label;

    friend bool operator==(const Cluster &, const Cluster &) = default;
};

/// A partition of every address known at build time. A cluster is identified
/// by its lexicographically smallest member.
struct Clustering {
    uint64_t version = 0;
    uint64_t snapshot_id = 0;
    std::map<Address, Address> partition;
    std::map<Address, Cluster> clusters;
    std::vector<ClusterRule> rules_applied;

    /// The address itself if it was unknown when the clustering was built.
    const Address &cluster_of(const Address &address) const;
    std::size_t member_count(const Address &cluster_id) const;
};

/// Partition `domain` by: (a) unioning each co-spend set when the multi-input
/// heuristic is enabled (the default), (b) unioning each Merge rule, with every
/// Isolate-d address removed from both before the closure so it ends up alone.
/// Rule addresses outside the domain are ignored.
Clustering cluster_addresses(std::span<const Address> domain, std::span<const std::vector<Address>> co_spend_sets,
    std::span<const ClusterRule> rules);

/// Distinct input owners of every UTXO tx with at least one resolved input.
std::vector<std::vector<Address>> co_spend_sets(const store::Snapshot &snapshot);

Clustering build_clustering(const store::Snapshot &snapshot, std::span<const ClusterRule> rules);

/// Pending rules plus every published, immutable clustering version.
class ClusteringRegistry {
public:
    void add_rules(std::vector<ClusterRule> rules);
    void replace_rules(std::vector<ClusterRule> rules);
    std::vector<ClusterRule> rules() const;

    /// Assigns the next version number and publishes.
    std::shared_ptr<const Clustering> publish(Clustering clustering);
    /// Throws error{unknown_clustering_version}.
    std::shared_ptr<const Clustering> get(uint64_t version) const;
    /// nullptr before the first publish.
    std::shared_ptr<const Clustering> latest() const;

private:
    mutable std::mutex mutex_;
    std::vector<ClusterRule> rules_;
    std::vector<std::shared_ptr<const Clustering>> versions_;
};

}  // namespace ledgerlens::preprocess
