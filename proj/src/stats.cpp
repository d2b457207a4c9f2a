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
#include <ledgerlens/stats.hpp>

namespace ledgerlens::preprocess {

std::string_view to_string(Bucket b) noexcept
{
    return b == Bucket::day ? "day" : "hour";
}

std::string_view to_string(GroupBy g) noexcept
{
    switch (g) {
        case GroupBy::none: return "none";
        case GroupBy::channel: return "channel";
        case GroupBy::contract: return "contract";
    }
    return "none";
}

Bucket parse_bucket(std::string_view text)
{
    if (text == "day")
        return Bucket::day;
    if (text == "hour")
        return Bucket::hour;
    throw error(errc::invalid_argument, "bucket must be day or hour, got '" + std::string(text) + "'");
}

GroupBy parse_group_by(std::string_view text)
{
    if (text == "none")
        return GroupBy::none;
    if (text == "channel")
        return GroupBy::channel;
    if (text == "contract")
        return GroupBy::contract;
    throw error(errc::invalid_argument, "group_by must be none, channel or contract, got '" + std::string(text) + "'");
}

StatsSeries stats(const store::Snapshot &snapshot, TimeWindow window, Bucket bucket, GroupBy group_by)
{
    using namespace std::chrono;
    window.check();
    const seconds width = bucket == Bucket::day ? seconds{days{1}} : seconds{hours{1}};
    const auto align = [&](Timestamp t) {
        const auto s = t.time_since_epoch().count();
        const auto w = width.count();
        const auto q = s / w - (s % w < 0 ? 1 : 0);
        return Timestamp{seconds{q * w}};
    };
    if ((window.end - align(window.start)) / width >= static_cast<long>(max_buckets))
        throw error(errc::invalid_argument, "window spans more than " + std::to_string(max_buckets) + " buckets");

    StatsSeries out{.window = window, .bucket = bucket, .group_by = group_by};
    for (auto t = align(window.start); t < window.end; t += width)
        out.bucket_starts.push_back(t);
    const auto n = out.bucket_starts.size();
    const auto first = out.bucket_starts.front();
    if (group_by == GroupBy::none)
        out.series.emplace(total_key, std::vector<uint64_t>(n, 0));

    for (const auto &block : snapshot.blocks()) {
        for (const auto &tx : block->txs) {
            if (!window.contains(tx.timestamp))
                continue;
            const auto slot = static_cast<std::size_t>((tx.timestamp - first) / width);
            std::string key;
            switch (group_by) {
                case GroupBy::none: key = total_key; break;
                case GroupBy::channel: key = tx.channel.str(); break;
                case GroupBy::contract: key = tx.contract.value_or(std::string(no_contract_key)); break;
            }
            auto it = out.series.try_emplace(std::move(key), std::vector<uint64_t>(n, 0)).first;
            ++it->second[slot];
        }
    }
    return out;
}

}  // namespace ledgerlens::preprocess
