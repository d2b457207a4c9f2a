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
// Parses block dumps into a store file and prints the parse report.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include <ledgerlens/parser.hpp>
#include <ledgerlens/store.hpp>

int main(int argc, char **argv)
{
    using namespace ledgerlens;
    CLI::App app{"Ingest newline-delimited block dumps into a LedgerLens store"};
    std::string store_path;
    std::string mode_name = "strict";
    std::vector<std::string> inputs;
    app.add_option("--store", store_path, "store file (created if absent)")->required();
    app.add_option("--mode", mode_name, "strict | lenient")->capture_default_str()->check(CLI::IsMember({"strict", "lenient"}));
    app.add_option("dumps", inputs, "dump files; '-' reads stdin")->required();
    CLI11_PARSE(app, argc, argv);

    const auto mode = mode_name == "strict" ? parser::ParseMode::strict : parser::ParseMode::lenient;
    try {
        auto store = store::Store::open(store_path);
        int status = 0;
        for (const auto &input : inputs) {
            std::ifstream file;
            if (input != "-") {
                file.open(input, std::ios::binary);
                if (!file)
                    throw error(errc::io, "cannot open " + input);
            }
            std::istream &in = input == "-" ? std::cin : file;

            const auto snap = store->snapshot();
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
            auto parsed = parser::parse_stream(in, mode, options);
            nlohmann::json line = {
                {"input", input},
                {"blocks_ok", parsed.report.blocks_ok},
                {"blocks_rejected", parsed.report.blocks_rejected},
                {"blocks_duplicate", parsed.report.blocks_duplicate},
                {"txs_ok", parsed.report.txs_ok},
                {"errors", nlohmann::json::array()},
            };
            for (const auto &e : parsed.report.errors)
                line["errors"].push_back({{"height", e.height}, {"kind", to_string(e.kind)}, {"detail", e.detail}});
            if (mode == parser::ParseMode::strict && !parsed.report.errors.empty()) {
                std::cout << line.dump() << "\n";
                status = 1;
                continue;
            }
            const auto committed = store->ingest(std::move(parsed.blocks));
            line["snapshot_id"] = committed.snapshot_id;
            line["txs_total"] = committed.counts.txs;
            std::cout << line.dump() << "\n";
        }
        return status;
    } catch (const std::exception &e) {
        std::cerr << "ledgerlens-ingest: " << e.what() << "\n";
        return 2;
    }
}
