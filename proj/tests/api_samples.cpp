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
// Writes one {"schema", "status", "body"} line per sample API response so an
// independent JSON Schema implementation can check them.

#include <fstream>
#include <iostream>

#include <ledgerlens/generator.hpp>
#include <ledgerlens/service.hpp>

#include "fixtures.hpp"

using namespace ledgerlens;
using nlohmann::json;

int main(int argc, char **argv)
{
    if (argc != 2) {
        std::cerr << "usage: api_samples OUT.jsonl\n";
        return 2;
    }
    gen::GenParams p;
    p.model = gen::GenModel::mixed;
    p.channels = 2;
    p.multi_input_rate = 0.5;
    const auto f = support::five_tx();
    auto store = support::store_from_dump(f.dump + gen::generate(p).dump);
    service::Config config;
    config.allow_ingest = true;
    service::Service svc(*store, config);

    std::ofstream out(argv[1]);
    const auto emit = [&](const std::string &schema, const std::string &method, const std::string &path,
                          std::map<std::string, std::string> query = {}, std::string body = {}) {
        const auto r = svc.handle({method, path, std::move(query), std::move(body)});
        out << json{{"schema", schema}, {"status", r.status}, {"body", json::parse(r.body)}}.dump() << '\n';
    };
    const std::map<std::string, std::string> window = {{"start", "2021-03-01T00:00:00Z"}, {"end", "2021-03-03T00:00:00Z"}};
    auto entity = window;
    entity["granularity"] = "entity";

    emit("status", "GET", "/v1/status");
    emit("block", "GET", "/v1/blocks/demo/1");
    emit("block", "GET", "/v1/blocks/ch-1/4");
    emit("transaction", "GET", "/v1/transactions/" + f.tx3.str());
    emit("transaction", "GET", "/v1/transactions/" + f.tx1.str());
    emit("address_transactions", "GET", "/v1/addresses/a/transactions");
    emit("address_transactions", "GET", "/v1/addresses/addr-0001/transactions", {{"limit", "2"}});
    emit("graph_view", "GET", "/v1/trace", {{"tx", f.tx3.str()}, {"hops", "2"}});
    emit("graph_view", "GET", "/v1/graph/accounts", window);
    emit("stats", "GET", "/v1/stats", window);
    emit("stats", "GET", "/v1/stats", {{"start", "2021-03-01T00:00:00Z"}, {"end", "2021-03-02T00:00:00Z"}, {"bucket", "hour"}, {"group_by", "contract"}});
    emit("clustering_rules", "POST", "/v1/clustering/rules", {}, R"({"rules":[{"kind":"merge","addresses":["a","e"]},{"kind":"isolate","address":"d"}]})");
    emit("clustering_rebuild", "POST", "/v1/clustering/rebuild");
    emit("clustering", "GET", "/v1/clustering/current", {{"limit", "3"}});
    emit("graph_view", "GET", "/v1/graph/accounts", entity);
    emit("label_applied", "POST", "/v1/labels", {}, R"({"target":"a","label":"exchange"})");
    emit("label", "GET", "/v1/labels", {{"target", "a"}});
    emit("label", "GET", "/v1/labels", {{"target", "b"}});
    emit("label_import", "POST", "/v1/labels/import", {}, "{\"target\":\"c\",\"label\":\"shop\"}\n");
    emit("label_list", "GET", "/v1/labels");
    support::ChainBuilder more("more");
    more.add({support::account_tx("a", "z", 1, 0)});
    emit("ingest", "POST", "/v1/ingest", {{"mode", "lenient"}}, more.dump() + "{}\n");
    emit("error", "GET", "/v1/transactions/" + std::string(64, '0'));
    emit("error", "GET", "/v1/nowhere");
    emit("error", "DELETE", "/v1/status");
    emit("error", "GET", "/v1/trace", {{"tx", f.tx3.str()}, {"hops", "99"}});
    return out ? 0 : 1;
}
