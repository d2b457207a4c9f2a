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
#include <ledgerlens/trace.hpp>

#include <algorithm>
#include <tuple>
#include <unordered_map>

namespace ledgerlens::preprocess {

std::string_view to_string(Direction d) noexcept
{
    switch (d) {
        case Direction::forward: return "forward";
        case Direction::backward: return "backward";
        case Direction::both: return "both";
    }
    return "both";
}

Direction parse_direction(std::string_view text)
{
    if (text == "forward")
        return Direction::forward;
    if (text == "backward")
        return Direction::backward;
    if (text == "both")
        return Direction::both;
    throw error(errc::invalid_argument, "direction must be forward, backward or both, got '" + std::string(text) + "'");
}

TraceSubgraph trace(const store::Snapshot &snapshot, const TxId &origin, Direction direction, uint32_t hops, uint32_t limit)
{
    if (hops > limit)
        throw error(errc::hop_limit_exceeded, "hops " + std::to_string(hops) + " exceeds the limit of " + std::to_string(limit));
    snapshot.tx_by_id(origin);

    const auto edges = snapshot.edges();
    const bool fwd = direction != Direction::backward;
    const bool bwd = direction != Direction::forward;
    const auto for_each_neighbour = [&](const TxId &tx, auto &&visit) {
        if (fwd) {
            for (const auto e : snapshot.outgoing_edge_ids(tx))
                visit(edges[e].target_tx);
        }
        if (bwd) {
            for (const auto e : snapshot.incoming_edge_ids(tx))
                visit(edges[e].source_tx);
        }
    };

    std::unordered_map<TxId, uint32_t> hop_of{{origin, 0}};
    std::vector<TxId> frontier{origin};
    for (uint32_t hop = 1; hop <= hops && !frontier.empty(); ++hop) {
        std::vector<TxId> next;
        for (const auto &tx : frontier) {
            for_each_neighbour(tx, [&](const TxId &n) {
                if (hop_of.emplace(n, hop).second)
                    next.push_back(n);
            });
        }
        frontier = std::move(next);
    }

    TraceSubgraph result{.origin = origin, .direction = direction, .max_hops = hops};
    for (const auto &tx : frontier) {
        if (hop_of.at(tx) != hops)
            continue;
        for_each_neighbour(tx, [&](const TxId &n) { result.truncated = result.truncated || !hop_of.contains(n); });
    }

    result.nodes.reserve(hop_of.size());
    for (const auto &[tx, hop] : hop_of) {
        const auto &t = snapshot.tx_by_id(tx);
        result.nodes.push_back(TraceNode{tx, hop, t.timestamp, t.contract});
    }
    std::sort(result.nodes.begin(), result.nodes.end(),
        [](const TraceNode &a, const TraceNode &b) { return std::tie(a.hop, a.tx) < std::tie(b.hop, b.tx); });

    for (const auto &[tx, _] : hop_of) {
        for (const auto e : snapshot.outgoing_edge_ids(tx)) {
            if (hop_of.contains(edges[e].target_tx))
                result.edges.push_back(edges[e]);
        }
    }
    std::sort(result.edges.begin(), result.edges.end(), [](const TxEdge &a, const TxEdge &b) {
        return std::tie(a.source_tx, a.output_index) < std::tie(b.source_tx, b.output_index);
    });
    return result;
}

}  // namespace ledgerlens::preprocess
