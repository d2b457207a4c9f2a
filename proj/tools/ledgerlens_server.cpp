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
// REST server over a store file.

#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include <ledgerlens/http_server.hpp>

namespace {

ledgerlens::service::HttpServer *running = nullptr;

extern "C" void on_signal(int)
{
    if (running)
        running->stop();
}

}  // namespace

int main(int argc, char **argv)
{
    using namespace ledgerlens;
    CLI::App app{"Serve LedgerLens analytics over HTTP"};
    std::string store_path;
    std::string bind = "127.0.0.1:8080";
    service::Config config;
    app.add_option("--store", store_path, "store file (created if absent)")->required();
    app.add_option("--bind", bind, "listen address host:port")->capture_default_str();
    app.add_option("--max-hops", config.max_hops, "largest trace depth accepted")->capture_default_str();
    app.add_flag("--readonly", config.readonly, "reject every mutating request");
    app.add_flag("--allow-ingest", config.allow_ingest, "enable POST /v1/ingest");
    CLI11_PARSE(app, argc, argv);

    std::unique_ptr<store::Store> store;
    try {
        store = store::Store::open(store_path);
    } catch (const std::exception &e) {
        std::cerr << "ledgerlens-server: store unavailable: " << e.what() << "\n";
        return 3;
    }
    try {
        service::Service svc(*store, config);
        service::HttpServer server(svc);
        const auto [host, port] = service::parse_bind_address(bind);
        const int bound = server.bind(host, port);
        running = &server;
        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        std::cerr << "listening on " << host << ":" << bound << " (snapshot " << svc.sync_status().snapshot_id << ")\n";
        server.run();
        running = nullptr;
    } catch (const error &e) {
        std::cerr << "ledgerlens-server: " << to_string(e.code()) << ": " << e.what() << "\n";
        return e.code() == errc::bind_failure ? 4 : 2;
    }
    return 0;
}
