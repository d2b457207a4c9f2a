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
// Writes a synthetic ledger dump plus the ground truth it was built from.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include <ledgerlens/generator.hpp>

namespace {

void write_file(const std::filesystem::path &path, const std::string &bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << bytes;
    if (!out.flush())
        throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

int main(int argc, char **argv)
{
    using namespace ledgerlens;
    CLI::App app{"Generate a deterministic synthetic ledger dump and its ground truth"};
    gen::GenParams p;
    std::string model = "utxo";
    std::string scenario = "random";
    std::filesystem::path out_dir = ".";
    app.add_option("--seed", p.seed, "PRNG seed")->capture_default_str();
    app.add_option("--model", model, "utxo | account | mixed")->capture_default_str();
    app.add_option("--channels", p.channels, "number of channels")->capture_default_str();
    app.add_option("--blocks", p.blocks, "blocks per channel")->capture_default_str();
    app.add_option("--txs", p.txs_per_block, "txs per block")->capture_default_str();
    app.add_option("--addresses", p.addresses, "address pool size")->capture_default_str();
    app.add_option("--multi-input-rate", p.multi_input_rate, "share of co-spending UTXO txs")->capture_default_str();
    app.add_option("--scenario", scenario, "random | grants")->capture_default_str();
    app.add_option("--out", out_dir, "output directory for dump.jsonl and truth.json")->capture_default_str();
    CLI11_PARSE(app, argc, argv);

    try {
        p.model = gen::parse_model(model);
        p.scenario = gen::parse_scenario(scenario);
        const auto generated = gen::generate(p);
        std::filesystem::create_directories(out_dir);
        write_file(out_dir / "dump.jsonl", generated.dump);
        write_file(out_dir / "truth.json", gen::to_json(generated.truth).dump(2) + "\n");
        std::cerr << "wrote " << generated.truth.block_count << " blocks, " << generated.truth.tx_count << " txs to "
                  << out_dir.string() << "\n";
    } catch (const std::exception &e) {
        std::cerr << "ledger-gen: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
