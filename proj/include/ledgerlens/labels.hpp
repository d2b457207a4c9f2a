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
#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include <ledgerlens/model.hpp>

namespace ledgerlens::preprocess {

enum class LabelSource { user, import };

std::string_view to_string(LabelSource s) noexcept;

struct LabelRecord {
    static constexpr std::size_t max_label_size = 128;

    std::string target;  // an address or a cluster id
    std::string label;
    LabelSource source = LabelSource::user;
    Timestamp applied_at;

    friend bool operator==(const LabelRecord &, const LabelRecord &) = default;
};

nlohmann::json to_json(const LabelRecord &r);
LabelRecord label_from_json(const nlohmann::json &j);

/// True iff the precedence rule picks `a` over `b`: later applied_at, then
/// User over Import, then the lexicographically smaller label.
bool takes_precedence(const LabelRecord &a, const LabelRecord &b) noexcept;

struct ImportReport {
    std::size_t applied = 0;
    std::size_t unchanged = 0;  // target already carried exactly that label
    std::vector<LabelRecord> records;  // the applied ones
};

/// Full label history with at most one effective label per target. Thread-safe.
class LabelBook {
public:
    using TargetCheck = std::function<bool(const std::string &)>;
    /// Called with the records about to be inserted, after validation; if it
    /// throws, nothing is inserted.
    using Persist = std::function<void(const std::vector<LabelRecord> &)>;

    /// Throws error{invalid_argument} for an empty or oversized label and
    /// error{unknown_target} when `known` rejects the target.
    LabelRecord apply(LabelRecord record, const TargetCheck &known, const Persist &persist = {});

    /// Newline-delimited {"target", "label"} objects, applied as Import at `now`.
    /// Lines whose target already has that effective label are skipped, so
    /// re-importing a file is a no-op. Validation is all-or-nothing.
    ImportReport import(std::istream &in, Timestamp now, const TargetCheck &known, const Persist &persist = {});

    /// Re-applies a persisted record without validation.
    void restore(LabelRecord record);

    std::optional<LabelRecord> effective(const std::string &target) const;
    std::vector<LabelRecord> history(const std::string &target) const;
    std::map<std::string, std::string> effective_labels() const;
    /// Bumped on every change; lets callers tell label states apart.
    uint64_t revision() const;

private:
    void insert_locked(LabelRecord record);

    mutable std::mutex mutex_;
    std::map<std::string, std::vector<LabelRecord>> history_;
    std::map<std::string, LabelRecord> effective_;
    uint64_t revision_ = 0;
};

}  // namespace ledgerlens::preprocess
