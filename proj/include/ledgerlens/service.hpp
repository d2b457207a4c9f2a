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
#include <map>
#include <mutex>
#include <string>

#include <json.hpp>

#include <ledgerlens/account_graph.hpp>
#include <ledgerlens/clustering.hpp>
#include <ledgerlens/labels.hpp>
#include <ledgerlens/stats.hpp>
#include <ledgerlens/store.hpp>
#include <ledgerlens/trace.hpp>

namespace ledgerlens::service {

struct Config {
    uint32_t max_hops = preprocess::default_max_hops;
    /// Refuse every mutating endpoint.
    bool readonly = false;
    /// POST /v1/ingest is admin-only and off unless enabled.
    bool allow_ingest = false;
    std::size_t default_limit = 1000;
    std::size_t max_limit = 10000;
    /// Source of applied_at for labels; defaults to the system clock.
    std::function<Timestamp()> clock;
};

struct Request {
    std::string method;
    std::string path;  // already percent-decoded
    std::map<std::string, std::string> query;
    std::string body;
};

struct Response {
    int status = 200;
    std::string body;  // JSON
    uint64_t snapshot_id = 0;
};

int http_status(errc code) noexcept;

/// JSON views shared by the endpoints (and by tests that compare against them).
nlohmann::json graph_view(const preprocess::TraceSubgraph &trace, uint64_t snapshot_id);
nlohmann::json graph_view(const preprocess::AccountGraph &graph, uint64_t snapshot_id, uint64_t label_revision);

/// The /v1 REST API over a store, independent of any HTTP transport.
///
///   GET  /v1/status
///   GET  /v1/blocks/{channel}/{height}
///   GET  /v1/transactions/{txid}
///   GET  /v1/addresses/{address}/transactions?limit&cursor
///   GET  /v1/trace?tx&dir=forward|backward|both&hops
///   GET  /v1/graph/accounts?start&end&granularity=address|entity&clustering_version
///   GET  /v1/stats?start&end&bucket=day|hour&group_by=none|channel|contract
///   GET  /v1/clustering/current, /v1/clustering/{version}   (limit&cursor over clusters)
///   POST /v1/clustering/rules, /v1/clustering/rebuild
///   GET  /v1/labels?target    POST /v1/labels    POST /v1/labels/import
///   POST /v1/ingest?mode=strict|lenient
///
/// Every body is JSON with sorted keys and carries "snapshot_id"; errors use
/// {"error": code, "detail": text}.
class Service {
public:
    explicit Service(store::Store &store, Config config = {});

    Response handle(const Request &request);

    store::StoreSnapshot sync_status() const;

    preprocess::LabelBook &labels() noexcept { return labels_; }
    preprocess::ClusteringRegistry &clusterings() noexcept { return clusterings_; }

private:
    struct Context;

    nlohmann::json get_status(const Context &ctx);
    nlohmann::json get_block(const Context &ctx, const std::string &channel, const std::string &height);
    nlohmann::json get_transaction(const Context &ctx, const std::string &id);
    nlohmann::json get_address_txs(const Context &ctx, const std::string &address);
    nlohmann::json get_trace(const Context &ctx);
    nlohmann::json get_account_graph(const Context &ctx);
    nlohmann::json get_stats(const Context &ctx);
    nlohmann::json get_clustering(const Context &ctx, const std::string &which);
    nlohmann::json post_rules(const Context &ctx);
    nlohmann::json post_rebuild(const Context &ctx);
    nlohmann::json get_labels(const Context &ctx);
    nlohmann::json post_label(const Context &ctx);
    nlohmann::json post_label_import(const Context &ctx);
    nlohmann::json post_ingest(Context &ctx);

    bool known_target(const store::Snapshot &snapshot, const std::string &target) const;
    void require_writable() const;
    Timestamp now() const;

    store::Store &store_;
    Config config_;
    preprocess::LabelBook labels_;
    preprocess::ClusteringRegistry clusterings_;
    std::mutex mutation_mutex_;  // serializes POSTs
};

}  // namespace ledgerlens::service
