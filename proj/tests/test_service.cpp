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
#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <sstream>
#include <thread>

#include <unistd.h>

#include <ledgerlens/generator.hpp>
#include <ledgerlens/service.hpp>

#include "fixtures.hpp"
#include "schema_validator.hpp"

using namespace ledgerlens;
using namespace ledgerlens::service;
using nlohmann::json;

namespace {

struct Reply {
    int status;
    json body;
    std::string raw;
};

class Harness {
public:
    explicit Harness(std::unique_ptr<store::Store> store, Config config = {})
        : store_(std::move(store)), service_(*store_, with_clock(std::move(config)))
    {
    }

    Reply call(const std::string &method, const std::string &path, std::map<std::string, std::string> query = {},
        std::string body = {})
    {
        const auto r = service_.handle(Request{method, path, std::move(query), std::move(body)});
        auto j = json::parse(r.body);
        EXPECT_EQ(j.at("snapshot_id"), r.snapshot_id) << path;
        return Reply{r.status, std::move(j), r.body};
    }

    Reply get(const std::string &path, std::map<std::string, std::string> query = {})
    {
        return call("GET", path, std::move(query));
    }

    Reply post(const std::string &path, const std::string &body, std::map<std::string, std::string> query = {})
    {
        return call("POST", path, std::move(query), body);
    }

    store::Store &store() { return *store_; }
    Service &service() { return service_; }

private:
    static Config with_clock(Config c)
    {
        if (!c.clock)
            c.clock = [] { return support::at("2021-04-01T00:00:00Z"); };
        return c;
    }

    std::unique_ptr<store::Store> store_;
    Service service_;
};

void expect_schema(const std::string &name, const json &body)
{
    static std::map<std::string, support::SchemaValidator> cache;
    auto it = cache.find(name);
    if (it == cache.end())
        it = cache.emplace(name, support::SchemaValidator::load(support::schema_dir() / (name + ".schema.json"))).first;
    const auto errors = it->second.validate(body);
    EXPECT_TRUE(errors.empty()) << name << ": " << (errors.empty() ? "" : errors.front()) << "\n" << body.dump(2);
}

void expect_error(const Reply &r, int status, const std::string &code)
{
    EXPECT_EQ(r.status, status) << r.raw;
    EXPECT_EQ(r.body.value("error", ""), code) << r.raw;
    expect_schema("error", r.body);
}

const std::map<std::string, std::string> all_time = {{"start", "2000-01-01T00:00:00Z"}, {"end", "2100-01-01T00:00:00Z"}};

std::map<std::string, std::string> with(std::map<std::string, std::string> base, const std::map<std::string, std::string> &extra)
{
    for (const auto &[k, v] : extra)
        base[k] = v;
    return base;
}

std::set<std::string> node_ids(const json &view)
{
    std::set<std::string> out;
    for (const auto &n : view.at("nodes"))
        out.insert(n.at("id").get<std::string>());
    return out;
}

class TempDir {
public:
    TempDir()
    {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
            ("ledgerlens-svc-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    const std::filesystem::path &path() const { return path_; }

private:
    std::filesystem::path path_;
};

TEST(Service, EmptyStoreStatus)
{
    Harness h(store::Store::in_memory());
    const auto r = h.get("/v1/status");
    EXPECT_EQ(r.status, 200);
    expect_schema("status", r.body);
    EXPECT_EQ(r.body["snapshot_id"], 0);
    EXPECT_TRUE(r.body["tips"].empty());
    EXPECT_TRUE(r.body["clustering_version"].is_null());
}

TEST(Service, FiveTxEndpointsMatchSchemas)
{
    const auto f = support::five_tx();
    Harness h(support::store_from_dump(f.dump));
    expect_schema("status", h.get("/v1/status").body);

    const auto block = h.get("/v1/blocks/demo/1");
    ASSERT_EQ(block.status, 200);
    expect_schema("block", block.body);
    EXPECT_EQ(block.body["block"]["txs"][0]["id"], f.tx3.str());

    const auto tx = h.get("/v1/transactions/" + f.tx3.str());
    ASSERT_EQ(tx.status, 200);
    expect_schema("transaction", tx.body);
    const auto &t = tx.body["transaction"];
    EXPECT_EQ(t["fee"], 0);
    EXPECT_EQ(t["block_height"], 1);
    EXPECT_EQ(t["edges"]["incoming"].size(), 2u);
    EXPECT_EQ(t["edges"]["outgoing"].size(), 1u);
    EXPECT_EQ(t["edges"]["outgoing"][0]["value"], 30);
    EXPECT_EQ(t["edges"]["outgoing"][0]["owner"], "c");
    EXPECT_TRUE(h.get("/v1/transactions/" + f.tx1.str()).body["transaction"]["fee"].is_null());

    const auto txs = h.get("/v1/addresses/a/transactions");
    ASSERT_EQ(txs.status, 200);
    expect_schema("address_transactions", txs.body);
    EXPECT_EQ(txs.body["total"], 2);
    EXPECT_EQ(txs.body["transactions"][0]["id"], f.tx1.str());
    EXPECT_EQ(txs.body["transactions"][1]["id"], f.tx3.str());
    EXPECT_TRUE(txs.body["next_cursor"].is_null());

    const auto trace = h.get("/v1/trace", {{"tx", f.tx3.str()}});
    ASSERT_EQ(trace.status, 200);
    expect_schema("graph_view", trace.body);
    EXPECT_EQ(node_ids(trace.body), (std::set<std::string>{f.tx1.str(), f.tx2.str(), f.tx3.str(), f.tx4.str()}));

    const auto graph = h.get("/v1/graph/accounts", all_time);
    ASSERT_EQ(graph.status, 200);
    expect_schema("graph_view", graph.body);
    EXPECT_EQ(graph.body["nodes"].size(), 5u);

    for (const auto &group : {"none", "channel", "contract"}) {
        const auto stats = h.get("/v1/stats", with(all_time, {{"group_by", group}, {"bucket", "day"}}));
        ASSERT_EQ(stats.status, 200);
        expect_schema("stats", stats.body);
        EXPECT_EQ(stats.body["total"], 5);
    }

    const auto rules = h.post("/v1/clustering/rules", R"({"rules":[{"kind":"isolate","address":"e"}]})");
    ASSERT_EQ(rules.status, 200);
    expect_schema("clustering_rules", rules.body);
    const auto rebuild = h.post("/v1/clustering/rebuild", "");
    ASSERT_EQ(rebuild.status, 200);
    expect_schema("clustering_rebuild", rebuild.body);
    EXPECT_EQ(rebuild.body["cluster_count"], 4);
    const auto clustering = h.get("/v1/clustering/current");
    ASSERT_EQ(clustering.status, 200);
    expect_schema("clustering", clustering.body);
    EXPECT_EQ(clustering.body["clustering"]["clusters"][0]["members"], json({"a", "b"}));
    const auto entity = h.get("/v1/graph/accounts", with(all_time, {{"granularity", "entity"}}));
    ASSERT_EQ(entity.status, 200);
    expect_schema("graph_view", entity.body);
    EXPECT_EQ(entity.body["meta"]["clustering_version"], 1);

    const auto applied = h.post("/v1/labels", R"({"target":"c","label":"merchant"})");
    ASSERT_EQ(applied.status, 200);
    expect_schema("label_applied", applied.body);
    expect_schema("label", h.get("/v1/labels", {{"target", "c"}}).body);
    expect_schema("label_list", h.get("/v1/labels").body);
    const auto imported = h.post("/v1/labels/import", "{\"target\":\"d\",\"label\":\"payroll\"}\n");
    ASSERT_EQ(imported.status, 200);
    expect_schema("label_import", imported.body);
}

TEST(Service, TraceMatchesGraphView)
{
    const auto f = support::five_tx();
    Harness h(support::store_from_dump(f.dump));
    const auto snap = h.store().snapshot();
    for (const auto &[dir, d] : {std::pair{"forward", preprocess::Direction::forward},
             std::pair{"backward", preprocess::Direction::backward}, std::pair{"both", preprocess::Direction::both}}) {
        for (uint32_t k = 0; k <= 4; ++k) {
            auto body = h.get("/v1/trace", {{"tx", f.tx3.str()}, {"dir", dir}, {"hops", std::to_string(k)}}).body;
            body.erase("snapshot_id");
            EXPECT_EQ(body, graph_view(preprocess::trace(*snap, f.tx3, d, k), snap->id())) << dir << " " << k;
        }
    }
    const auto fwd = h.get("/v1/trace", {{"tx", f.tx3.str()}, {"dir", "forward"}, {"hops", "2"}}).body;
    EXPECT_EQ(node_ids(fwd), (std::set<std::string>{f.tx3.str(), f.tx4.str(), f.tx5.str()}));
    EXPECT_FALSE(fwd["meta"]["truncated"].get<bool>());
    const auto back = h.get("/v1/trace", {{"tx", f.tx3.str()}, {"dir", "backward"}, {"hops", "2"}}).body;
    EXPECT_EQ(node_ids(back), (std::set<std::string>{f.tx1.str(), f.tx2.str(), f.tx3.str()}));
}

TEST(Service, ErrorEnvelope)
{
    const auto f = support::five_tx();
    Harness h(support::store_from_dump(f.dump));
    const auto id = h.store().snapshot()->id();

    const auto missing = h.get("/v1/transactions/" + std::string(64, 'f'));
    expect_error(missing, 404, "not_found");
    EXPECT_EQ(missing.body["snapshot_id"], id);
    expect_error(h.get("/v1/transactions/nothex"), 404, "not_found");
    expect_error(h.get("/v1/blocks/demo/99"), 404, "not_found");
    expect_error(h.get("/v1/blocks/demo/-1"), 404, "not_found");
    expect_error(h.get("/v1/blocks/nochannel/0"), 404, "not_found");
    expect_error(h.get("/v1/addresses/zz/transactions"), 404, "not_found");
    expect_error(h.get("/v1/nowhere"), 404, "not_found");
    expect_error(h.get("/v2/status"), 404, "not_found");
    expect_error(h.call("DELETE", "/v1/status"), 405, "method_not_allowed");
    expect_error(h.get("/v1/ingest"), 405, "method_not_allowed");

    expect_error(h.get("/v1/trace"), 400, "invalid_argument");
    expect_error(h.get("/v1/trace", {{"tx", f.tx3.str()}, {"hops", "x"}}), 400, "invalid_argument");
    expect_error(h.get("/v1/trace", {{"tx", f.tx3.str()}, {"dir", "sideways"}}), 400, "invalid_argument");
    expect_error(h.get("/v1/trace", {{"tx", f.tx3.str()}, {"hops", "17"}}), 400, "hop_limit_exceeded");
    expect_error(h.get("/v1/trace", {{"tx", std::string(64, 'f')}}), 404, "not_found");
    expect_error(h.get("/v1/graph/accounts", {{"start", "2021-03-02T00:00:00Z"}, {"end", "2021-03-01T00:00:00Z"}}), 400,
        "empty_window");
    expect_error(h.get("/v1/graph/accounts", {{"start", "yesterday"}, {"end", "2021-03-01T00:00:00Z"}}), 400,
        "invalid_argument");
    expect_error(h.get("/v1/graph/accounts", with(all_time, {{"granularity", "entity"}})), 404,
        "unknown_clustering_version");
    expect_error(h.get("/v1/graph/accounts", with(all_time, {{"clustering_version", "7"}})), 404,
        "unknown_clustering_version");
    expect_error(h.get("/v1/stats", with(all_time, {{"bucket", "week"}})), 400, "invalid_argument");
    expect_error(h.get("/v1/clustering/current"), 404, "unknown_clustering_version");
    expect_error(h.get("/v1/clustering/3"), 404, "unknown_clustering_version");
    expect_error(h.get("/v1/clustering/latest"), 404, "not_found");
    expect_error(h.post("/v1/clustering/rules", R"({"rules":[{"kind":"merge","addresses":["a"]}]})"), 400, "invalid_rule");
    expect_error(h.post("/v1/clustering/rules", "{"), 400, "invalid_argument");
    expect_error(h.post("/v1/labels", R"({"target":"nobody","label":"x"})"), 404, "unknown_target");
    expect_error(h.post("/v1/labels", R"({"target":"a","label":""})"), 400, "invalid_argument");
    expect_error(h.get("/v1/labels", {{"target", "nobody"}}), 404, "not_found");
    expect_error(h.get("/v1/addresses/a/transactions", {{"limit", "0"}}), 400, "invalid_argument");
    expect_error(h.get("/v1/addresses/a/transactions", {{"limit", "10001"}}), 400, "invalid_argument");
    expect_error(h.get("/v1/addresses/a/transactions", {{"cursor", "3"}}), 400, "invalid_argument");

    EXPECT_EQ(http_status(errc::double_spend), 409);
    EXPECT_EQ(http_status(errc::storage_full), 503);
    EXPECT_EQ(http_status(errc::malformed_record), 400);
}

TEST(Service, LabelReadYourWrite)
{
    Harness h(support::store_from_dump(support::five_tx().dump));
    const auto before = h.get("/v1/status").body["label_revision"].get<uint64_t>();
    const auto unlabeled = h.get("/v1/labels", {{"target", "a"}});
    ASSERT_EQ(unlabeled.status, 200);
    EXPECT_TRUE(unlabeled.body["label"].is_null());

    ASSERT_EQ(h.post("/v1/labels", R"({"target":"a","label":"exchange"})").status, 200);
    const auto after = h.get("/v1/labels", {{"target", "a"}});
    EXPECT_EQ(after.body["label"], "exchange");
    EXPECT_EQ(after.body["effective"]["source"], "user");
    EXPECT_EQ(after.body["effective"]["applied_at"], "2021-04-01T00:00:00Z");
    EXPECT_EQ(h.get("/v1/status").body["label_revision"], before + 1);

    const auto graph = h.get("/v1/graph/accounts", all_time).body;
    for (const auto &n : graph["nodes"])
        if (n["id"] == "a")
            EXPECT_EQ(n["label"], "exchange");
    EXPECT_EQ(graph["meta"]["label_revision"], before + 1);

    // a later import at the same instant loses to the user label
    const auto imported = h.post("/v1/labels/import", "{\"target\":\"a\",\"label\":\"aardvark\"}\n");
    EXPECT_EQ(imported.body["applied"], 1);
    EXPECT_EQ(h.get("/v1/labels", {{"target", "a"}}).body["label"], "exchange");
    EXPECT_EQ(h.get("/v1/labels", {{"target", "a"}}).body["history"].size(), 2u);
    const auto again = h.post("/v1/labels/import", "{\"target\":\"a\",\"label\":\"exchange\"}\n");
    EXPECT_EQ(again.body["applied"], 0);
    EXPECT_EQ(again.body["unchanged"], 1);
}

TEST(Service, ClusterLabelsFrozenPerVersionGraphLabelsLive)
{
    auto tick = std::make_shared<int>(0);
    Config ticking;
    ticking.clock = [tick] { return support::at("2021-04-01T00:00:00Z") + std::chrono::seconds(++*tick); };
    Harness h(support::store_from_dump(support::five_tx().dump), ticking);
    ASSERT_EQ(h.post("/v1/labels", R"({"target":"a","label":"first"})").status, 200);
    ASSERT_EQ(h.post("/v1/clustering/rebuild", "").status, 200);
    ASSERT_EQ(h.post("/v1/labels", R"({"target":"a","label":"second"})").status, 200);
    const auto v1 = h.get("/v1/clustering/1").body;
    EXPECT_EQ(v1["clustering"]["clusters"][0]["label"], "first");
    const auto graph = h.get("/v1/graph/accounts", with(all_time, {{"granularity", "entity"}})).body;
    EXPECT_EQ(graph["nodes"][0]["id"], "a");
    EXPECT_EQ(graph["nodes"][0]["label"], "second");
    EXPECT_EQ(graph["nodes"][0]["metrics"]["member_count"], 2);
}

TEST(Service, ResponsesAreByteDeterministic)
{
    gen::GenParams p;
    p.model = gen::GenModel::mixed;
    p.channels = 2;
    p.seed = 17;
    const auto g = gen::generate(p);
    Harness a(support::store_from_dump(g.dump));
    Harness b(support::store_from_dump(g.dump));
    const auto snap = a.store().snapshot();
    const auto tx = snap->blocks().back()->txs.back().id.str();
    const auto addr = snap->addresses().front().str();

    const std::vector<std::pair<std::string, std::map<std::string, std::string>>> requests = {
        {"/v1/status", {}},
        {"/v1/blocks/ch-1/3", {}},
        {"/v1/transactions/" + tx, {}},
        {"/v1/addresses/" + addr + "/transactions", {{"limit", "5"}}},
        {"/v1/trace", {{"tx", tx}, {"hops", "4"}}},
        {"/v1/graph/accounts", all_time},
        {"/v1/stats", with(all_time, {{"group_by", "contract"}})},
    };
    for (const auto &[path, query] : requests) {
        const auto ra = a.get(path, query);
        EXPECT_EQ(ra.status, 200) << path;
        EXPECT_EQ(ra.raw, b.get(path, query).raw) << path;
        EXPECT_EQ(ra.raw, a.get(path, query).raw) << path;
    }
    ASSERT_EQ(a.post("/v1/clustering/rebuild", "").raw, b.post("/v1/clustering/rebuild", "").raw);
    EXPECT_EQ(a.get("/v1/clustering/current").raw, b.get("/v1/clustering/current").raw);
    const auto entity = with(all_time, {{"granularity", "entity"}});
    EXPECT_EQ(a.get("/v1/graph/accounts", entity).raw, b.get("/v1/graph/accounts", entity).raw);
}

TEST(Service, ReadOnlyAndIngestGating)
{
    const auto f = support::five_tx();
    Harness ro(support::store_from_dump(f.dump), Config{.readonly = true, .allow_ingest = true});
    for (const auto &path : {"/v1/labels", "/v1/labels/import", "/v1/clustering/rules", "/v1/clustering/rebuild", "/v1/ingest"})
        expect_error(ro.post(path, "{}"), 403, "read_only");
    EXPECT_EQ(ro.get("/v1/status").status, 200);

    Harness closed(store::Store::in_memory());
    expect_error(closed.post("/v1/ingest", f.dump), 403, "forbidden");
    EXPECT_EQ(closed.get("/v1/status").body["snapshot_id"], 0);
}

TEST(Service, IngestStrictIsAtomicLenientIsPartial)
{
    support::ChainBuilder chain("c");
    chain.add({support::account_tx("a", "b", 1, 0)});
    chain.add({support::account_tx("a", "b", 1, 1)});
    const auto good = chain.dump();
    const auto bad = good + "{\"height\": 2, \"oops\": true}\n";

    Harness h(store::Store::in_memory(), Config{.allow_ingest = true});
    const auto strict = h.post("/v1/ingest", bad);
    expect_error(strict, 400, "malformed_record");
    EXPECT_EQ(h.get("/v1/status").body["counts"]["blocks"], 0);

    const auto lenient = h.post("/v1/ingest", bad, {{"mode", "lenient"}});
    ASSERT_EQ(lenient.status, 200);
    expect_schema("ingest", lenient.body);
    EXPECT_EQ(lenient.body["report"]["blocks_ok"], 2);
    EXPECT_EQ(lenient.body["report"]["blocks_rejected"], 1);
    EXPECT_EQ(lenient.body["report"]["errors"][0]["height"], 2);
    EXPECT_EQ(lenient.body["status"]["counts"]["blocks"], 2);
    const auto id = lenient.body["snapshot_id"];
    EXPECT_EQ(h.get("/v1/status").body["snapshot_id"], id);

    // same dump again: nothing new, same snapshot
    const auto again = h.post("/v1/ingest", good);
    ASSERT_EQ(again.status, 200);
    EXPECT_EQ(again.body["report"]["blocks_duplicate"], 2);
    EXPECT_EQ(again.body["report"]["blocks_ok"], 0);
    EXPECT_EQ(again.body["snapshot_id"], id);

    // extending the chain works against the stored tip
    chain.add({support::account_tx("a", "b", 1, 2)});
    const auto more = h.post("/v1/ingest", chain.dump());
    ASSERT_EQ(more.status, 200);
    EXPECT_EQ(more.body["report"]["blocks_ok"], 1);
    EXPECT_EQ(more.body["report"]["blocks_duplicate"], 2);
    EXPECT_EQ(h.get("/v1/status").body["tips"][0]["height"], 2);

    // a conflicting fork is refused whole
    support::ChainBuilder fork("c");
    auto forked = json::parse(fork.add({support::account_tx("x", "y", 1, 0)}));
    forked["hash"] = std::string(64, 'e');
    expect_error(h.post("/v1/ingest", forked.dump()), 400, "chain_mismatch");
    expect_error(h.post("/v1/ingest", good, {{"mode", "eager"}}), 400, "invalid_argument");
}

TEST(Service, PaginationWalk)
{
    gen::GenParams p;
    p.addresses = 8;
    p.blocks = 20;
    const auto g = gen::generate(p);
    Harness h(support::store_from_dump(g.dump));
    const auto snap = h.store().snapshot();
    const auto addr = snap->addresses().front();
    const auto full = snap->txs_by_address(addr);
    ASSERT_GT(full.size(), 7u);

    std::vector<std::string> walked;
    std::map<std::string, std::string> q = {{"limit", "3"}};
    for (int pages = 0;; ++pages) {
        ASSERT_LT(pages, 1000);
        const auto r = h.get("/v1/addresses/" + addr.str() + "/transactions", q);
        ASSERT_EQ(r.status, 200);
        EXPECT_LE(r.body["transactions"].size(), 3u);
        EXPECT_EQ(r.body["total"], full.size());
        for (const auto &t : r.body["transactions"])
            walked.push_back(t["id"].get<std::string>());
        if (r.body["next_cursor"].is_null())
            break;
        q["cursor"] = r.body["next_cursor"].get<std::string>();
    }
    std::vector<std::string> expected;
    for (const auto &id : full)
        expected.push_back(id.str());
    EXPECT_EQ(walked, expected);

    ASSERT_EQ(h.post("/v1/clustering/rebuild", "").status, 200);
    std::size_t clusters = 0;
    q = {{"limit", "2"}};
    for (;;) {
        const auto r = h.get("/v1/clustering/1", q).body["clustering"];
        clusters += r["clusters"].size();
        if (r["next_cursor"].is_null())
            break;
        q["cursor"] = r["next_cursor"].get<std::string>();
    }
    EXPECT_EQ(clusters, h.get("/v1/clustering/1").body["clustering"]["cluster_count"].get<std::size_t>());

    for (const auto &target : {"addr-0001", "addr-0002", "addr-0003"})
        if (snap->knows_address(Address(target)))
            ASSERT_EQ(h.post("/v1/labels", json{{"target", target}, {"label", "x"}}.dump()).status, 200);
    const auto first = h.get("/v1/labels", {{"limit", "1"}}).body;
    EXPECT_EQ(first["labels"].size(), 1u);
}

TEST(Service, ClusteringVersionsAreImmutable)
{
    support::ChainBuilder chain("c");
    const auto ma = support::utxo_tx({}, {{"a", 5}});
    const auto mb = support::utxo_tx({}, {{"b", 5}});
    chain.add({ma, mb});
    Harness h(support::store_from_dump(chain.dump()), Config{.allow_ingest = true});
    ASSERT_EQ(h.post("/v1/clustering/rebuild", "").status, 200);
    const auto v1 = h.get("/v1/clustering/1").raw;
    EXPECT_EQ(h.get("/v1/clustering/1").body["clustering"]["cluster_count"], 2);

    chain.add({support::utxo_tx({{support::id_of(ma), 0}, {support::id_of(mb), 0}}, {{"c", 10}})});
    ASSERT_EQ(h.post("/v1/ingest", chain.dump()).status, 200);
    ASSERT_EQ(h.post("/v1/clustering/rules", R"({"rules":[{"kind":"merge","addresses":["c","b"]}]})").status, 200);
    const auto v2 = h.post("/v1/clustering/rebuild", "");
    EXPECT_EQ(v2.body["clustering_version"], 2);
    EXPECT_EQ(v2.body["cluster_count"], 1);
    EXPECT_EQ(v2.body["source_snapshot_id"], h.store().snapshot()->id());

    // v1 is unchanged apart from the response's own snapshot id
    auto now = h.get("/v1/clustering/1").body;
    auto then = json::parse(v1);
    now.erase("snapshot_id");
    then.erase("snapshot_id");
    EXPECT_EQ(now, then);
    EXPECT_EQ(h.get("/v1/clustering/current").body["clustering"]["version"], 2);

    const auto replaced = h.post("/v1/clustering/rules", R"({"rules":[],"replace":true})");
    EXPECT_TRUE(replaced.body["rules"].empty());
}

TEST(Service, AnnotationsReplayOnReopen)
{
    TempDir dir;
    const auto path = dir.path() / "store.journal";
    const auto f = support::five_tx();
    std::string labels_before;
    {
        auto store = store::Store::open(path);
        support::ingest_dump(*store, f.dump);
        Harness h(std::move(store));
        ASSERT_EQ(h.post("/v1/labels", R"({"target":"a","label":"exchange"})").status, 200);
        ASSERT_EQ(h.post("/v1/labels/import", "{\"target\":\"c\",\"label\":\"shop\"}\n").status, 200);
        ASSERT_EQ(h.post("/v1/clustering/rules", R"({"rules":[{"kind":"isolate","address":"b"}]})").status, 200);
        ASSERT_EQ(h.post("/v1/clustering/rules", R"({"rules":[{"kind":"merge","addresses":["d","e"]}]})").status, 200);
        // a rejected label leaves no trace in the journal
        ASSERT_EQ(h.post("/v1/labels", R"({"target":"ghost","label":"x"})").status, 404);
        labels_before = h.get("/v1/labels").raw;
    }
    Harness h(store::Store::open(path));
    EXPECT_EQ(h.get("/v1/labels").raw, labels_before);
    EXPECT_EQ(h.get("/v1/labels", {{"target", "a"}}).body["effective"]["applied_at"], "2021-04-01T00:00:00Z");
    const auto rebuilt = h.post("/v1/clustering/rebuild", "");
    EXPECT_EQ(rebuilt.body["clustering_version"], 1);
    const auto c = h.get("/v1/clustering/current").body["clustering"];
    EXPECT_EQ(c["rules_applied"].size(), 2u);
    EXPECT_EQ(c["clusters"], json::parse(R"([
        {"id":"a","members":["a"],"label":"exchange"},
        {"id":"b","members":["b"]},
        {"id":"c","members":["c"],"label":"shop"},
        {"id":"d","members":["d","e"]}])"));
}

TEST(Service, ConcurrentReadersSeeWholeSnapshots)
{
    gen::GenParams p;
    p.blocks = 60;
    const auto g = gen::generate(p);
    std::vector<std::string> lines;
    std::istringstream in(g.dump);
    for (std::string l; std::getline(in, l);)
        lines.push_back(l + "\n");

    Harness h(store::Store::in_memory(), Config{.allow_ingest = true});
    std::atomic<bool> done = false;
    std::atomic<int> bad = 0;
    std::thread reader([&] {
        while (!done) {
            const auto r = h.service().handle(Request{"GET", "/v1/status", {}, {}});
            const auto j = json::parse(r.body);
            // every batch below is one block of 5 txs
            if (j["counts"]["txs"] != j["counts"]["blocks"].get<uint64_t>() * 5)
                ++bad;
        }
    });
    for (const auto &l : lines)
        ASSERT_EQ(h.post("/v1/ingest", l).status, 200);
    done = true;
    reader.join();
    EXPECT_EQ(bad, 0);
    EXPECT_EQ(h.get("/v1/status").body["counts"]["blocks"], 60);
}

}  // namespace
