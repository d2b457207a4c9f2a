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
#include <optional>
#include <span>
#include <vector>

#include <ledgerlens/model.hpp>

namespace ledgerlens::aggregator {

struct OutPoint {
    TxId tx;
    uint32_t index;

    friend bool operator==(const OutPoint &, const OutPoint &) = default;
};

struct ResolvedOutput {
    Address address;
    uint64_t value;
    bool spent;
};

/// Maps (tx, output index) to the referenced output, or nullopt if unknown.
using OutputResolver = std::function<std::optional<ResolvedOutput>(const TxId &, uint32_t)>;

struct LinkResult {
    std::vector<TxEdge> edges;
    std::vector<DanglingInput> dangling;
    std::vector<DoubleSpend> double_spends;
};

/// Resolves every input of a UTXO tx. Spending an already-spent output (or the
/// same outpoint twice within `tx`) yields a DoubleSpend and no edge.
LinkResult link_inputs(const ParsedTransaction &tx, const OutputResolver &resolver);

/// Account tx: one interaction from -> to. UTXO tx: each output's value is split
/// across the distinct input owners in proportion to their resolved input value,
/// rounded down, with the remainder going to the lexicographically smallest owner.
/// A tx with no resolved input value attributes each output to itself.
std::vector<Interaction> derive_interactions(const ParsedTransaction &tx, std::span<const TxEdge> edges);

/// sum(inputs) - sum(outputs) for a UTXO tx whose inputs all resolved; nullopt
/// for mints, account txs and partially resolved txs. Negative means the tx
/// creates value it did not consume.
std::optional<int64_t> fee(const ParsedTransaction &tx, std::span<const TxEdge> edges);

}  // namespace ledgerlens::aggregator

template <>
struct std::hash<ledgerlens::aggregator::OutPoint> {
    std::size_t operator()(const ledgerlens::aggregator::OutPoint &p) const noexcept
    {
        return std::hash<ledgerlens::TxId>{}(p.tx) ^ (static_cast<std::size_t>(p.index) * 0x9e3779b97f4a7c15ULL);
    }
};
