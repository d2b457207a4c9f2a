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

#include <map>
#include <string>
#include <vector>

#include <ledgerlens/account_graph.hpp>
#include <ledgerlens/store.hpp>

namespace ledgerlens::preprocess {

enum class Bucket { day, hour };
enum class GroupBy { none, channel, contract };

std::string_view to_string(Bucket b) noexcept;
std::string_view to_string(GroupBy g) noexcept;
Bucket parse_bucket(std::string_view text);
GroupBy parse_group_by(std::string_view text);

/// Series key for txs without a contract when grouping by contract.
inline constexpr std::string_view no_contract_key = "(none)";
/// Series key of the ungrouped series.
inline constexpr std::string_view total_key = "all";

struct StatsSeries {
    TimeWindow window;
    Bucket bucket;
    GroupBy group_by;
    /// Start of each bucket, aligned to UTC day/hour boundaries. The first bucket
    /// starts at or before window.start; only txs inside the window are counted.
    std::vector<Timestamp> bucket_starts;
    std::map<std::string, std::vector<uint64_t>> series;
};

inline constexpr std::size_t max_buckets = 100'000;

/// Tx counts per bucket, zero-filled. Throws error{empty_window}, or
/// error{invalid_argument} past max_buckets.
StatsSeries stats(const store::Snapshot &snapshot, TimeWindow window, Bucket bucket, GroupBy group_by);

}  // namespace ledgerlens::preprocess
