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
#include <ledgerlens/account_graph.hpp>

#include <map>
#include <set>

namespace ledgerlens::preprocess {

void TimeWindow::check() const
{
    if (!(start < end))
        throw error(errc::empty_window, "window start " + format_rfc3339(start) + " is not before end " + format_rfc3339(end));
}

std::string_view to_string(Granularity g) noexcept
{
    return g == Granularity::address ? "address" : "entity";
}

Granularity parse_granularity(std::string_view text)
{
    if (text == "address")
        return Granularity::address;
    if (text == "entity")
        return Granularity::entity;
    throw error(errc::invalid_argument, "granularity must be address or entity, got '" + std::string(text) + "'");
}

AccountGraph account_graph(const store::Snapshot &snapshot, TimeWindow window, Granularity granularity,
    const Clustering *clustering, const LabelLookup &labels)
{
    window.check();
    if (granularity == Granularity::entity && clustering == nullptr)
        throw error(errc::unknown_clustering_version, "entity granularity needs a clustering");

    struct NodeAcc {
        NodeMetrics metrics;
        std::set<TxId> txs;
    };
    std::map<std::string, NodeAcc> nodes;
    std::map<std::pair<std::string, std::string>, AccountEdge> edges;

    const auto node_of = [&](const Address &a) -> const std::string & {
        return granularity == Granularity::entity ? clustering->cluster_of(a).str() : a.str();
    };
    const auto touch = [&](const std::string &id) -> NodeAcc & {
        auto [it, inserted] = nodes.try_emplace(id);
        if (inserted && granularity == Granularity::entity)
            it->second.metrics.member_count = clustering->member_count(Address(id));
        return it->second;
    };

    for (const auto &i : snapshot.interactions_in_window(window.start, window.end)) {
        const auto &from = node_of(i.from);
        const auto &to = node_of(i.to);
        auto &src = touch(from);
        src.metrics.total_out_value += i.value;
        src.txs.insert(i.tx);
        auto &dst = touch(to);
        dst.metrics.total_in_value += i.value;
        dst.txs.insert(i.tx);
        if (granularity == Granularity::entity && from == to) {
            src.metrics.intra_value += i.value;
            continue;
        }
        auto [it, inserted] = edges.try_emplace({from, to}, AccountEdge{from, to, 0, 0});
        ++it->second.count;
        it->second.total_value += i.value;
    }

    AccountGraph graph{.window = window, .granularity = granularity};
    if (granularity == Granularity::entity)
        graph.clustering_version = clustering->version;
    graph.nodes.reserve(nodes.size());
    for (auto &[id, acc] : nodes) {
        acc.metrics.tx_count = acc.txs.size();
        graph.nodes.push_back(AccountNode{id, labels ? labels(id) : std::nullopt, acc.metrics});
    }
    graph.edges.reserve(edges.size());
    for (auto &[_, e] : edges)
        graph.edges.push_back(std::move(e));
    return graph;
}

}  // namespace ledgerlens::preprocess
