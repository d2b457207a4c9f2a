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
#include <optional>
#include <string>
#include <vector>

#include <ledgerlens/clustering.hpp>
#include <ledgerlens/store.hpp>

namespace ledgerlens::preprocess {

/// Half-open UTC interval [start, end).
struct TimeWindow {
    Timestamp start;
    Timestamp end;

    /// Throws error{empty_window} unless start < end.
    void check() const;
    bool contains(Timestamp t) const noexcept { return start <= t && t < end; }
};

enum class Granularity { address, entity };

std::string_view to_string(Granularity g) noexcept;
Granularity parse_granularity(std::string_view text);

struct NodeMetrics {
    uint64_t tx_count = 0;         // distinct txs with an interaction touching the node
    uint64_t total_in_value = 0;   // includes intra-node value
    uint64_t total_out_value = 0;  // includes intra-node value
    uint64_t member_count = 1;
    uint64_t intra_value = 0;      // entity level: value moved between members

    friend bool operator==(const NodeMetrics &, const NodeMetrics &) = default;
};

struct AccountNode {
    std::string id;
    std::optional<std::string> label;
    NodeMetrics metrics;

    friend bool operator==(const AccountNode &, const AccountNode &) = default;
};

struct AccountEdge {
    std::string from;
    std::string to;
    uint64_t count;
    uint64_t total_value;

    friend bool operator==(const AccountEdge &, const AccountEdge &) = default;
};

struct AccountGraph {
    TimeWindow window;
    Granularity granularity;
    std::optional<uint64_t> clustering_version;
    std::vector<AccountNode> nodes;  // sorted by id
    std::vector<AccountEdge> edges;  // sorted by (from, to)
};

using LabelLookup = std::function<std::optional<std::string>(const std::string &)>;

/// Aggregates the window's interactions by (from, to). At entity level each
/// address is mapped through `clustering` (required) and interactions inside a
/// cluster become node metrics rather than self-loop edges; at address level
/// self-transfers stay as self-loop edges.
AccountGraph account_graph(const store::Snapshot &snapshot, TimeWindow window, Granularity granularity,
    const Clustering *clustering, const LabelLookup &labels = {});

}  // namespace ledgerlens::preprocess
