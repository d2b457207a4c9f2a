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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <ledgerlens/store.hpp>

namespace ledgerlens::preprocess {

enum class Direction { forward, backward, both };

std::string_view to_string(Direction d) noexcept;
/// "forward" | "backward" | "both"; throws error{invalid_argument}.
Direction parse_direction(std::string_view text);

inline constexpr uint32_t default_max_hops = 16;

struct TraceNode {
    TxId tx;
    uint32_t hop;
    Timestamp timestamp;
    std::optional<std::string> contract;

    friend bool operator==(const TraceNode &, const TraceNode &) = default;
};

struct TraceSubgraph {
    TxId origin;
    Direction direction;
    uint32_t max_hops;
    std::vector<TraceNode> nodes;  // sorted by (hop, tx)
    std::vector<TxEdge> edges;     // every stored edge between two nodes, sorted by (source, output index)
    bool truncated = false;        // some node at the last hop still has an unvisited neighbour
};

/// Breadth-first k-hop expansion over spend edges. Forward follows outputs to
/// their spenders, backward follows inputs to their sources, both does either;
/// a node's hop is its minimum distance from the origin.
/// Throws error{not_found} for an unknown origin and error{hop_limit_exceeded}
/// when hops > limit.
TraceSubgraph trace(const store::Snapshot &snapshot, const TxId &origin, Direction direction, uint32_t hops,
    uint32_t limit = default_max_hops);

}  // namespace ledgerlens::preprocess
