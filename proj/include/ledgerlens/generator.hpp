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

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include <ledgerlens/model.hpp>

namespace ledgerlens::gen {

enum class GenModel { utxo, account, mixed };
enum class Scenario { random, grants };

GenModel parse_model(std::string_view text);
Scenario parse_scenario(std::string_view text);
std::string_view to_string(GenModel m) noexcept;
std::string_view to_string(Scenario s) noexcept;

struct GenParams {
    uint64_t seed = 1;
    GenModel model = GenModel::utxo;
    uint32_t channels = 1;
    uint32_t blocks = 10;  // per channel
    uint32_t txs_per_block = 5;
    uint32_t addresses = 50;
    double multi_input_rate = 0.25;
    Scenario scenario = Scenario::random;
};

/// Throws error{invalid_params}.
void validate(const GenParams &p);

/// Seeded source of integers whose output depends only on the seed: the raw
/// std::mt19937_64 stream (its sequence is fixed by the C++ standard) reduced
/// with unbiased rejection sampling instead of the implementation-defined
/// std:: distributions.
class Rng {
public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next() { return engine_(); }
    /// Uniform in [0, bound); bound > 0.
    uint64_t below(uint64_t bound);
    /// Uniform in [lo, hi].
    uint64_t between(uint64_t lo, uint64_t hi) { return lo + below(hi - lo + 1); }
    /// Uniform in [0, 1) with 53 bits of precision.
    double fraction() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    bool chance(double p) { return fraction() < p; }

private:
    std::mt19937_64 engine_;
};

struct InteractionTotal {
    uint64_t count = 0;
    uint64_t value = 0;

    friend bool operator==(const InteractionTotal &, const InteractionTotal &) = default;
};

struct Organization {
    std::string channel;
    std::vector<std::string> members;
    uint64_t data_models = 0;
};

/// What every analytic must find in the emitted dump, recorded while it was built.
struct GroundTruth {
    std::vector<std::vector<std::string>> expected_clusters;  // each sorted; sorted by first member
    std::vector<TxEdge> expected_edges;
    std::map<std::pair<std::string, std::string>, InteractionTotal> expected_interaction_totals;
    // grants scenario
    std::map<std::string, uint64_t> grants_per_org;  // grants issued by the org
    std::map<std::pair<std::string, std::string>, uint64_t> grants_between;
    std::map<std::string, Organization> organizations;
    uint64_t tx_count = 0;
    uint64_t block_count = 0;
};

nlohmann::json to_json(const GroundTruth &truth);

struct Generated {
    std::string dump;  // newline-delimited blocks
    GroundTruth truth;
};

/// Deterministic: identical params give byte-identical dumps.
Generated generate(const GenParams &params);

}  // namespace ledgerlens::gen
