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
#include <ledgerlens/service.hpp>

#include <charconv>
#include <sstream>

#include <ledgerlens/parser.hpp>

namespace ledgerlens::service {

using nlohmann::json;

int http_status(errc code) noexcept
{
    switch (code) {
        case errc::not_found:
        case errc::unknown_target:
        case errc::unknown_clustering_version:
            return 404;
        case errc::tip_conflict:
        case errc::duplicate_tx_id:
        case errc::double_spend:
            return 409;
        case errc::read_only:
        case errc::forbidden:
            return 403;
        case errc::io:
        case errc::storage_full:
        case errc::store_unavailable:
        case errc::bind_failure:
            return 503;
        default:
            return 400;
    }
}

struct Service::Context {
    const Request &request;
    std::shared_ptr<const store::Snapshot> snapshot;
    uint64_t response_snapshot = 0;
};

namespace {

const std::string *param(const Request &request, const std::string &name)
{
    const auto it = request.query.find(name);
    return it == request.query.end() ? nullptr : &it->second;
}

const std::string &required(const Request &request, const std::string &name)
{
    if (const auto *v = param(request, name))
        return *v;
    throw error(errc::invalid_argument, "missing query parameter '" + name + "'");
}

uint64_t parse_uint(const std::string &text, const std::string &what)
{
    uint64_t v = 0;
    const auto *end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (text.empty() || ec != std::errc{} || ptr != end)
        throw error(errc::invalid_argument, what + " must be a non-negative integer, got '" + text + "'");
    return v;
}

struct Page {
    std::size_t offset;
    std::size_t limit;
};

Page page(const Request &request, std::size_t default_limit, std::size_t max_limit)
{
    Page p{0, default_limit};
    if (const auto *v = param(request, "limit")) {
        p.limit = parse_uint(*v, "limit");
        if (p.limit == 0 || p.limit > max_limit)
            throw error(errc::invalid_argument, "limit must be in 1.." + std::to_string(max_limit));
    }
    if (const auto *v = param(request, "cursor"))
        p.offset = parse_uint(*v, "cursor");
    return p;
}

/// Slices [offset, offset + limit) and reports the cursor of the next page.
template <typename Range, typename Fn>
json paginate(const Range &items, Page p, Fn &&to_item, json &next_cursor)
{
    const std::size_t total = std::size(items);
    if (p.offset > total)
        throw error(errc::invalid_argument, "cursor past the end of the list");
    json out = json::array();
    const std::size_t end = std::min(total, p.offset + p.limit);
    auto it = std::begin(items);
    std::advance(it, p.offset);
    for (std::size_t i = p.offset; i < end; ++i, ++it)
        out.push_back(to_item(*it));
    next_cursor = end < total ? json(std::to_string(end)) : json(nullptr);
    return out;
}

json edge_json(const TxEdge &e)
{
    return {
        {"from", e.source_tx.str()},
        {"to", e.target_tx.str()},
        {"output_index", e.output_index},
        {"input_index", e.input_index},
        {"value", e.value},
        {"owner", e.owner.str()},
        {"timestamp", format_rfc3339(e.timestamp)},
    };
}

json window_json(const preprocess::TimeWindow &w)
{
    return {{"start", format_rfc3339(w.start)}, {"end", format_rfc3339(w.end)}};
}

preprocess::TimeWindow window_param(const Request &request)
{
    preprocess::TimeWindow w{parse_rfc3339(required(request, "start")), parse_rfc3339(required(request, "end"))};
    w.check();
    return w;
}

json status_json(const store::StoreSnapshot &s)
{
    json tips = json::array();
    for (const auto &t : s.tips)
        tips.push_back({{"channel", t.channel.str()}, {"height", t.height}, {"hash", t.hash.str()},
            {"timestamp", format_rfc3339(t.timestamp)}});
    return {
        {"snapshot_id", s.snapshot_id},
        {"tips", std::move(tips)},
        {"counts",
            {{"blocks", s.counts.blocks}, {"txs", s.counts.txs}, {"edges", s.counts.edges},
                {"interactions", s.counts.interactions}}},
    };
}

json report_json(const parser::ParseReport &r)
{
    json errors = json::array();
    for (const auto &e : r.errors)
        errors.push_back({{"height", e.height < 0 ? json(nullptr) : json(e.height)},
            {"kind", std::string(to_string(e.kind))}, {"detail", e.detail}});
    return {
        {"blocks_ok", r.blocks_ok},
        {"blocks_rejected", r.blocks_rejected},
        {"blocks_duplicate", r.blocks_duplicate},
        {"txs_ok", r.txs_ok},
        {"errors", std::move(errors)},
    };
}

json error_body(std::string_view code, const std::string &detail, uint64_t snapshot_id)
{
    return {{"error", std::string(code)}, {"detail", detail}, {"snapshot_id", snapshot_id}};
}

std::vector<std::string> split_path(const std::string &path)
{
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < path.size()) {
        const auto j = path.find('/', i);
        const auto end = j == std::string::npos ? path.size() : j;
        if (end > i)
            out.push_back(path.substr(i, end - i));
        i = end + 1;
    }
    return out;
}

/// Path segments name resources: one that cannot exist is missing, not invalid.
template <typename Fn>
auto path_value(const std::string &segment, std::string_view what, Fn &&convert)
{
    try {
        return convert(segment);
    } catch (const error &e) {
        if (e.code() != errc::invalid_argument)
            throw;
        throw error(errc::not_found, "no " + std::string(what) + " '" + segment + "'");
    }
}

json parse_body(const Request &request)
{
    try {
        return json::parse(request.body);
    } catch (const json::exception &e) {
        throw error(errc::invalid_argument, std::string("request body is not JSON: ") + e.what());
    }
}

}  // namespace

json graph_view(const preprocess::TraceSubgraph &trace, uint64_t snapshot_id)
{
    json nodes = json::array();
    for (const auto &n : trace.nodes) {
        json node = {{"id", n.tx.str()}, {"kind", "tx"}, {"hop", n.hop}, {"timestamp", format_rfc3339(n.timestamp)}};
        if (n.contract)
            node["contract"] = *n.contract;
        nodes.push_back(std::move(node));
    }
    json edges = json::array();
    for (const auto &e : trace.edges)
        edges.push_back(edge_json(e));
    return {
        {"kind", "TransactionDag"},
        {"nodes", std::move(nodes)},
        {"edges", std::move(edges)},
        {"meta",
            {{"snapshot_id", snapshot_id}, {"truncated", trace.truncated}, {"origin", trace.origin.str()},
                {"direction", std::string(preprocess::to_string(trace.direction))}, {"hops", trace.max_hops}}},
    };
}

json graph_view(const preprocess::AccountGraph &graph, uint64_t snapshot_id, uint64_t label_revision)
{
    const auto kind = graph.granularity == preprocess::Granularity::entity ? "entity" : "address";
    json nodes = json::array();
    for (const auto &n : graph.nodes) {
        json node = {
            {"id", n.id},
            {"kind", kind},
            {"metrics",
                {{"tx_count", n.metrics.tx_count}, {"total_in_value", n.metrics.total_in_value},
                    {"total_out_value", n.metrics.total_out_value}, {"member_count", n.metrics.member_count},
                    {"intra_value", n.metrics.intra_value}}},
        };
        if (n.label)
            node["label"] = *n.label;
        nodes.push_back(std::move(node));
    }
    json edges = json::array();
    for (const auto &e : graph.edges)
        edges.push_back({{"from", e.from}, {"to", e.to}, {"count", e.count}, {"value", e.total_value}});
    json meta = {
        {"snapshot_id", snapshot_id},
        {"window", window_json(graph.window)},
        {"granularity", std::string(preprocess::to_string(graph.granularity))},
        {"label_revision", label_revision},
    };
    if (graph.clustering_version)
        meta["clustering_version"] = *graph.clustering_version;
    return {{"kind", "AccountGraph"}, {"nodes", std::move(nodes)}, {"edges", std::move(edges)}, {"meta", std::move(meta)}};
}

Service::Service(store::Store &store, Config config) : store_(store), config_(std::move(config))
{
    for (const auto &a : store_.annotations()) {
        const auto kind = a.value("kind", "");
        if (kind == "labels") {
            for (const auto &r : a.at("records"))
                labels_.restore(preprocess::label_from_json(r));
        } else if (kind == "rules") {
            std::vector<preprocess::ClusterRule> rules;
            for (const auto &r : a.at("rules"))
                rules.push_back(preprocess::rule_from_json(r));
            if (a.value("replace", false))
                clusterings_.replace_rules(std::move(rules));
            else
                clusterings_.add_rules(std::move(rules));
        }
    }
}

Timestamp Service::now() const
{
    if (config_.clock)
        return config_.clock();
    return std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
}

void Service::require_writable() const
{
    if (config_.readonly)
        throw error(errc::read_only, "server is read-only");
}

bool Service::known_target(const store::Snapshot &snapshot, const std::string &target) const
{
    // cluster ids are member addresses, so every valid target is an address
    try {
        return snapshot.knows_address(Address(target));
    } catch (const error &) {
        return false;
    }
}

store::StoreSnapshot Service::sync_status() const
{
    return store_.snapshot()->info();
}

Response Service::handle(const Request &request)
{
    Context ctx{request, store_.snapshot()};
    ctx.response_snapshot = ctx.snapshot->id();
    const auto seg = split_path(request.path);
    const bool get = request.method == "GET";
    const bool post = request.method == "POST";
    const auto n = seg.size();

    Response response;
    try {
        std::optional<json> body;
        bool route_found = true;
        bool method_ok = true;
        const auto at = [&](std::size_t i, std::string_view s) { return n > i && seg[i] == s; };

        if (!at(0, "v1")) {
            route_found = false;
        } else if (n == 2 && seg[1] == "status") {
            method_ok = get;
            if (get)
                body = get_status(ctx);
        } else if (n == 4 && seg[1] == "blocks") {
            method_ok = get;
            if (get)
                body = get_block(ctx, seg[2], seg[3]);
        } else if (n == 3 && seg[1] == "transactions") {
            method_ok = get;
            if (get)
                body = get_transaction(ctx, seg[2]);
        } else if (n == 4 && seg[1] == "addresses" && seg[3] == "transactions") {
            method_ok = get;
            if (get)
                body = get_address_txs(ctx, seg[2]);
        } else if (n == 2 && seg[1] == "trace") {
            method_ok = get;
            if (get)
                body = get_trace(ctx);
        } else if (n == 3 && seg[1] == "graph" && seg[2] == "accounts") {
            method_ok = get;
            if (get)
                body = get_account_graph(ctx);
        } else if (n == 2 && seg[1] == "stats") {
            method_ok = get;
            if (get)
                body = get_stats(ctx);
        } else if (n == 3 && seg[1] == "clustering" && (seg[2] == "rules" || seg[2] == "rebuild")) {
            method_ok = post;
            if (post)
                body = seg[2] == "rules" ? post_rules(ctx) : post_rebuild(ctx);
        } else if (n == 3 && seg[1] == "clustering") {
            method_ok = get;
            if (get)
                body = get_clustering(ctx, seg[2]);
        } else if (n == 2 && seg[1] == "labels") {
            method_ok = get || post;
            if (get)
                body = get_labels(ctx);
            else if (post)
                body = post_label(ctx);
        } else if (n == 3 && seg[1] == "labels" && seg[2] == "import") {
            method_ok = post;
            if (post)
                body = post_label_import(ctx);
        } else if (n == 2 && seg[1] == "ingest") {
            method_ok = post;
            if (post)
                body = post_ingest(ctx);
        } else {
            route_found = false;
        }

        if (!route_found) {
            response.status = 404;
            response.body = error_body(to_string(errc::not_found), "no such resource: " + request.path, ctx.response_snapshot).dump();
        } else if (!method_ok) {
            response.status = 405;
            response.body =
                error_body("method_not_allowed", request.method + " is not allowed on " + request.path, ctx.response_snapshot).dump();
        } else {
            (*body)["snapshot_id"] = ctx.response_snapshot;
            response.body = body->dump();
        }
    } catch (const error &e) {
        response.status = http_status(e.code());
        response.body = error_body(to_string(e.code()), e.what(), ctx.response_snapshot).dump();
    } catch (const json::exception &e) {
        response.status = 400;
        response.body = error_body(to_string(errc::invalid_argument), e.what(), ctx.response_snapshot).dump();
    } catch (const std::exception &e) {
        response.status = 500;
        response.body = error_body("internal", e.what(), ctx.response_snapshot).dump();
    }
    response.snapshot_id = ctx.response_snapshot;
    return response;
}

json Service::get_status(const Context &ctx)
{
    auto out = status_json(ctx.snapshot->info());
    const auto latest = clusterings_.latest();
    out["clustering_version"] = latest ? json(latest->version) : json(nullptr);
    out["label_revision"] = labels_.revision();
    out["dangling_inputs"] = ctx.snapshot->dangling_inputs().size();
    out["double_spends"] = ctx.snapshot->double_spends().size();
    return out;
}

json Service::get_block(const Context &ctx, const std::string &channel, const std::string &height)
{
    const auto h = path_value(height, "block height", [](const std::string &s) { return parse_uint(s, "height"); });
    const auto c = path_value(channel, "channel", [](const std::string &s) { return ChannelId(s); });
    const auto &block = ctx.snapshot->block_by_height(c, h);
    return {{"block", parser::to_json(block)}};
}

json Service::get_transaction(const Context &ctx, const std::string &id)
{
    const auto &snap = *ctx.snapshot;
    const auto tx_id = path_value(id, "transaction", [](const std::string &s) { return TxId(s); });
    const auto &tx = snap.tx_by_id(tx_id);
    auto out = parser::to_json(tx);
    out["block_height"] = tx.block_height;
    out["tx_index"] = tx.tx_index;
    out["timestamp"] = format_rfc3339(tx.timestamp);
    out["channel"] = tx.channel.str();
    const auto fee = snap.fee(tx_id);
    out["fee"] = fee ? json(*fee) : json(nullptr);
    const auto edges = snap.edges_by_tx(tx_id);
    json in = json::array();
    json outgoing = json::array();
    for (const auto &e : edges.incoming)
        in.push_back(edge_json(e));
    for (const auto &e : edges.outgoing)
        outgoing.push_back(edge_json(e));
    out["edges"] = {{"incoming", std::move(in)}, {"outgoing", std::move(outgoing)}};
    return {{"transaction", std::move(out)}};
}

json Service::get_address_txs(const Context &ctx, const std::string &address)
{
    const auto &snap = *ctx.snapshot;
    const auto addr = path_value(address, "address", [](const std::string &s) { return Address(s); });
    const auto ids = snap.txs_by_address(addr);
    json next;
    auto items = paginate(ids, page(ctx.request, config_.default_limit, config_.max_limit),
        [&](const TxId &id) {
            const auto &tx = snap.tx_by_id(id);
            json item = {{"id", id.str()}, {"model", std::string(to_string(tx.model))}, {"channel", tx.channel.str()},
                {"block_height", tx.block_height}, {"timestamp", format_rfc3339(tx.timestamp)}};
            if (tx.contract)
                item["contract"] = *tx.contract;
            return item;
        },
        next);
    return {{"address", address}, {"transactions", std::move(items)}, {"total", ids.size()}, {"next_cursor", next}};
}

json Service::get_trace(const Context &ctx)
{
    const auto &request = ctx.request;
    const TxId origin(required(request, "tx"));
    const auto *dir = param(request, "dir");
    const auto direction = dir ? preprocess::parse_direction(*dir) : preprocess::Direction::both;
    const auto *hops_text = param(request, "hops");
    const auto hops = hops_text ? parse_uint(*hops_text, "hops") : 1;
    if (hops > config_.max_hops)
        throw error(errc::hop_limit_exceeded,
            "hops " + std::to_string(hops) + " exceeds the configured maximum " + std::to_string(config_.max_hops));
    const auto sub = preprocess::trace(*ctx.snapshot, origin, direction, static_cast<uint32_t>(hops), config_.max_hops);
    return graph_view(sub, ctx.snapshot->id());
}

json Service::get_account_graph(const Context &ctx)
{
    const auto &request = ctx.request;
    const auto window = window_param(request);
    const auto *g = param(request, "granularity");
    const auto granularity = g ? preprocess::parse_granularity(*g) : preprocess::Granularity::address;

    std::shared_ptr<const preprocess::Clustering> clustering;
    if (const auto *v = param(request, "clustering_version"))
        clustering = clusterings_.get(parse_uint(*v, "clustering_version"));
    else if (granularity == preprocess::Granularity::entity)
        clustering = clusterings_.latest();
    if (granularity == preprocess::Granularity::entity && !clustering)
        throw error(errc::unknown_clustering_version, "no clustering has been built; POST /v1/clustering/rebuild first");

    // one consistent label state for the whole response
    const auto revision = labels_.revision();
    const auto labels = labels_.effective_labels();
    const preprocess::LabelLookup lookup = [&](const std::string &id) -> std::optional<std::string> {
        const auto it = labels.find(id);
        return it == labels.end() ? std::nullopt : std::optional(it->second);
    };
    const auto graph = preprocess::account_graph(*ctx.snapshot, window, granularity,
        granularity == preprocess::Granularity::entity ? clustering.get() : nullptr, lookup);
    return graph_view(graph, ctx.snapshot->id(), revision);
}

json Service::get_stats(const Context &ctx)
{
    const auto &request = ctx.request;
    const auto window = window_param(request);
    const auto *b = param(request, "bucket");
    const auto *g = param(request, "group_by");
    const auto s = preprocess::stats(*ctx.snapshot, window, b ? preprocess::parse_bucket(*b) : preprocess::Bucket::day,
        g ? preprocess::parse_group_by(*g) : preprocess::GroupBy::none);

    json buckets = json::array();
    for (const auto t : s.bucket_starts)
        buckets.push_back(format_rfc3339(t));
    json series = json::array();
    uint64_t total = 0;
    for (const auto &[key, counts] : s.series) {
        series.push_back({{"key", key}, {"counts", counts}});
        for (const auto c : counts)
            total += c;
    }
    return {
        {"window", window_json(s.window)},
        {"bucket", std::string(preprocess::to_string(s.bucket))},
        {"group_by", std::string(preprocess::to_string(s.group_by))},
        {"buckets", std::move(buckets)},
        {"series", std::move(series)},
        {"total", total},
    };
}

json Service::get_clustering(const Context &ctx, const std::string &which)
{
    std::shared_ptr<const preprocess::Clustering> c;
    if (which == "current") {
        c = clusterings_.latest();
        if (!c)
            throw error(errc::unknown_clustering_version, "no clustering has been built yet");
    } else {
        c = clusterings_.get(path_value(which, "clustering version", [](const std::string &s) { return parse_uint(s, "version"); }));
    }
    json rules = json::array();
    for (const auto &r : c->rules_applied)
        rules.push_back(preprocess::to_json(r));
    json next;
    auto clusters = paginate(c->clusters, page(ctx.request, config_.default_limit, config_.max_limit),
        [](const auto &entry) {
            json members = json::array();
            for (const auto &m : entry.second.members)
                members.push_back(m.str());
            json item = {{"id", entry.first.str()}, {"members", std::move(members)}};
            if (entry.second.label)
                item["label"] = *entry.second.label;
            return item;
        },
        next);
    return {{"clustering",
        {
            {"version", c->version},
            {"source_snapshot_id", c->snapshot_id},
            {"rules_applied", std::move(rules)},
            {"cluster_count", c->clusters.size()},
            {"address_count", c->partition.size()},
            {"clusters", std::move(clusters)},
            {"next_cursor", next},
        }}};
}

json Service::post_rules(const Context &ctx)
{
    require_writable();
    const auto body = parse_body(ctx.request);
    if (!body.is_object() || !body.contains("rules") || !body["rules"].is_array())
        throw error(errc::invalid_rule, "body must be {\"rules\": [...], \"replace\"?: bool}");
    const bool replace = body.value("replace", false);
    std::vector<preprocess::ClusterRule> rules;
    json normalized = json::array();
    for (const auto &r : body["rules"]) {
        rules.push_back(preprocess::rule_from_json(r));
        normalized.push_back(preprocess::to_json(rules.back()));
    }

    std::lock_guard lock(mutation_mutex_);
    store_.annotate({{"kind", "rules"}, {"replace", replace}, {"rules", normalized}});
    if (replace)
        clusterings_.replace_rules(std::move(rules));
    else
        clusterings_.add_rules(std::move(rules));
    json pending = json::array();
    for (const auto &r : clusterings_.rules())
        pending.push_back(preprocess::to_json(r));
    return {{"rules", std::move(pending)}};
}

json Service::post_rebuild(const Context &ctx)
{
    require_writable();
    std::lock_guard lock(mutation_mutex_);
    const auto rules = clusterings_.rules();
    auto clustering = preprocess::build_clustering(*ctx.snapshot, rules);
    // a published version is immutable, so it keeps the labels of its build time
    const auto labels = labels_.effective_labels();
    for (auto &[id, cluster] : clustering.clusters)
        if (const auto it = labels.find(id.str()); it != labels.end())
            cluster.label = it->second;
    const auto published = clusterings_.publish(std::move(clustering));
    return {
        {"clustering_version", published->version},
        {"source_snapshot_id", published->snapshot_id},
        {"cluster_count", published->clusters.size()},
        {"address_count", published->partition.size()},
    };
}

json Service::get_labels(const Context &ctx)
{
    const auto &request = ctx.request;
    if (const auto *target = param(request, "target")) {
        const auto history = labels_.history(*target);
        if (history.empty() && !known_target(*ctx.snapshot, *target))
            throw error(errc::not_found, "unknown label target '" + *target + "'");
        const auto effective = labels_.effective(*target);
        json h = json::array();
        for (const auto &r : history)
            h.push_back(preprocess::to_json(r));
        return {{"target", *target}, {"label", effective ? json(effective->label) : json(nullptr)},
            {"effective", effective ? preprocess::to_json(*effective) : json(nullptr)}, {"history", std::move(h)}};
    }
    const auto all = labels_.effective_labels();
    json next;
    auto items = paginate(all, page(request, config_.default_limit, config_.max_limit),
        [](const auto &entry) { return json{{"target", entry.first}, {"label", entry.second}}; }, next);
    return {{"labels", std::move(items)}, {"total", all.size()}, {"next_cursor", next}};
}

json Service::post_label(const Context &ctx)
{
    require_writable();
    const auto body = parse_body(ctx.request);
    auto record = preprocess::label_from_json(body);
    record.source = preprocess::LabelSource::user;
    record.applied_at = now();
    const auto snap = ctx.snapshot;
    std::lock_guard lock(mutation_mutex_);
    const auto effective = labels_.apply(
        record, [&](const std::string &t) { return known_target(*snap, t); },
        [&](const std::vector<preprocess::LabelRecord> &records) {
            store_.annotate({{"kind", "labels"}, {"records", json::array({preprocess::to_json(records.front())})}});
        });
    return {{"applied", preprocess::to_json(record)}, {"effective", preprocess::to_json(effective)}};
}

json Service::post_label_import(const Context &ctx)
{
    require_writable();
    std::istringstream in(ctx.request.body);
    const auto snap = ctx.snapshot;
    std::lock_guard lock(mutation_mutex_);
    const auto report = labels_.import(
        in, now(), [&](const std::string &t) { return known_target(*snap, t); },
        [&](const std::vector<preprocess::LabelRecord> &records) {
            json rs = json::array();
            for (const auto &r : records)
                rs.push_back(preprocess::to_json(r));
            store_.annotate({{"kind", "labels"}, {"records", std::move(rs)}});
        });
    return {{"applied", report.applied}, {"unchanged", report.unchanged}};
}

json Service::post_ingest(Context &ctx)
{
    require_writable();
    if (!config_.allow_ingest)
        throw error(errc::forbidden, "ingest is disabled on this server");
    const auto *m = param(ctx.request, "mode");
    parser::ParseMode mode = parser::ParseMode::strict;
    if (m && *m == "lenient")
        mode = parser::ParseMode::lenient;
    else if (m && *m != "strict")
        throw error(errc::invalid_argument, "mode must be strict or lenient");

    std::lock_guard lock(mutation_mutex_);
    // re-read under the lock: another ingest may have committed meanwhile
    const auto snap = store_.snapshot();
    parser::StreamOptions options;
    for (const auto &t : snap->info().tips)
        options.anchors.emplace(t.channel, parser::ChainTip{t.height, t.hash, t.timestamp});
    options.known_tx = [&](const TxId &id) { return snap->find_tx(id) != nullptr; };
    options.known_block = [&](const ChannelId &c, uint64_t h, const BlockHash &hash) {
        try {
            return snap->block_by_height(c, h).hash == hash;
        } catch (const error &) {
            return false;
        }
    };
    auto parsed = parser::parse_string(ctx.request.body, mode, options);
    if (mode == parser::ParseMode::strict && !parsed.report.errors.empty()) {
        const auto &e = parsed.report.errors.front();
        const auto where = e.height < 0 ? std::string("record") : "block " + std::to_string(e.height);
        throw error(e.kind, where + ": " + e.detail + " (nothing ingested)");
    }
    const auto committed = store_.ingest(std::move(parsed.blocks));
    ctx.response_snapshot = committed.snapshot_id;
    return {{"report", report_json(parsed.report)}, {"status", status_json(committed)}};
}

}  // namespace ledgerlens::service
