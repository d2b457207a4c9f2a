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
#include <ledgerlens/aggregator.hpp>

#include <map>
#include <unordered_set>

namespace ledgerlens::aggregator {

LinkResult link_inputs(const ParsedTransaction &tx, const OutputResolver &resolver)
{
    if (tx.model != TxModel::utxo)
        throw error(errc::invalid_argument, "link_inputs needs a utxo tx, got account tx " + tx.id.str());
    LinkResult result;
    std::unordered_set<OutPoint> consumed_here;
    for (std::size_t i = 0; i < tx.inputs.size(); ++i) {
        const auto &in = tx.inputs[i];
        const auto input_index = static_cast<uint32_t>(i);
        const auto out = resolver(in.source_tx, in.output_index);
        if (!out) {
            result.dangling.push_back(DanglingInput{tx.id, input_index, in.source_tx, in.output_index});
            continue;
        }
        if (out->spent || !consumed_here.insert(OutPoint{in.source_tx, in.output_index}).second) {
            result.double_spends.push_back(DoubleSpend{tx.id, input_index, in.source_tx, in.output_index});
            continue;
        }
        result.edges.push_back(TxEdge{
            .source_tx = in.source_tx,
            .output_index = in.output_index,
            .target_tx = tx.id,
            .input_index = input_index,
            .value = out->value,
            .owner = out->address,
            .timestamp = tx.timestamp,
        });
    }
    return result;
}

std::vector<Interaction> derive_interactions(const ParsedTransaction &tx, std::span<const TxEdge> edges)
{
    std::vector<Interaction> out;
    const auto make = [&](const Address &from, const Address &to, uint64_t value) {
        out.push_back(Interaction{from, to, value, tx.timestamp, tx.id, tx.channel, tx.contract});
    };

    if (tx.model == TxModel::account) {
        make(tx.transfer->from, tx.transfer->to, tx.transfer->value);
        return out;
    }

    // Ordered map: iteration is lexicographic, so begin() is the remainder owner.
    std::map<Address, unsigned __int128> contribution;
    unsigned __int128 total = 0;
    for (const auto &e : edges) {
        contribution[e.owner] += e.value;
        total += e.value;
    }

    out.reserve(tx.outputs.size() * std::max<std::size_t>(contribution.size(), 1));
    for (const auto &o : tx.outputs) {
        if (total == 0) {
            make(o.address, o.address, o.value);
            continue;
        }
        const auto first = out.size();
        unsigned __int128 assigned = 0;
        for (const auto &[owner, part] : contribution) {
            const auto share = static_cast<uint64_t>(o.value * part / total);
            assigned += share;
            make(owner, o.address, share);
        }
        out[first].value += static_cast<uint64_t>(o.value - assigned);
    }
    return out;
}

std::optional<int64_t> fee(const ParsedTransaction &tx, std::span<const TxEdge> edges)
{
    if (tx.model != TxModel::utxo || tx.inputs.empty() || edges.size() != tx.inputs.size())
        return std::nullopt;
    __int128 diff = 0;
    for (const auto &e : edges)
        diff += e.value;
    for (const auto &o : tx.outputs)
        diff -= o.value;
    return static_cast<int64_t>(diff);
}

}  // namespace ledgerlens::aggregator
