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
#include <ledgerlens/labels.hpp>

#include <istream>

namespace ledgerlens::preprocess {

std::string_view to_string(LabelSource s) noexcept
{
    return s == LabelSource::user ? "user" : "import";
}

nlohmann::json to_json(const LabelRecord &r)
{
    return {
        {"target", r.target},
        {"label", r.label},
        {"source", std::string(to_string(r.source))},
        {"applied_at", format_rfc3339(r.applied_at)},
    };
}

LabelRecord label_from_json(const nlohmann::json &j)
{
    if (!j.is_object() || !j.contains("target") || !j["target"].is_string() || !j.contains("label") || !j["label"].is_string())
        throw error(errc::invalid_argument, "label record needs string 'target' and 'label'");
    LabelRecord r{.target = j["target"].get<std::string>(), .label = j["label"].get<std::string>()};
    if (const auto it = j.find("source"); it != j.end()) {
        if (*it == "import")
            r.source = LabelSource::import;
        else if (*it != "user")
            throw error(errc::invalid_argument, "label source must be 'user' or 'import'");
    }
    if (const auto it = j.find("applied_at"); it != j.end()) {
        if (!it->is_string())
            throw error(errc::invalid_argument, "applied_at must be an RFC 3339 string");
        r.applied_at = parse_rfc3339(it->get<std::string>());
    }
    return r;
}

bool takes_precedence(const LabelRecord &a, const LabelRecord &b) noexcept
{
    if (a.applied_at != b.applied_at)
        return a.applied_at > b.applied_at;
    if (a.source != b.source)
        return a.source == LabelSource::user;
    return a.label < b.label;
}

namespace {

// UTF-8 code points; continuation bytes are 10xxxxxx.
std::size_t char_count(const std::string &s)
{
    std::size_t n = 0;
    for (const unsigned char c : s)
        n += (c & 0xC0) != 0x80;
    return n;
}

void check(const LabelRecord &r, const LabelBook::TargetCheck &known)
{
    if (r.label.empty())
        throw error(errc::invalid_argument, "label must not be empty");
    if (char_count(r.label) > LabelRecord::max_label_size)
        throw error(errc::invalid_argument, "label longer than 128 chars");
    if (r.target.empty() || (known && !known(r.target)))
        throw error(errc::unknown_target, "unknown label target '" + r.target + "'");
}

}  // namespace

void LabelBook::insert_locked(LabelRecord record)
{
    auto it = effective_.find(record.target);
    if (it == effective_.end())
        effective_.emplace(record.target, record);
    else if (takes_precedence(record, it->second))
        it->second = record;
    history_[record.target].push_back(std::move(record));
    ++revision_;
}

LabelRecord LabelBook::apply(LabelRecord record, const TargetCheck &known, const Persist &persist)
{
    check(record, known);
    std::lock_guard lock(mutex_);
    if (persist)
        persist({record});
    insert_locked(record);
    return effective_.at(record.target);
}

ImportReport LabelBook::import(std::istream &in, Timestamp now, const TargetCheck &known, const Persist &persist)
{
    std::vector<LabelRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception &e) {
            throw error(errc::invalid_argument, "label import line " + std::to_string(line_no) + ": " + e.what());
        }
        auto r = label_from_json(j);
        r.source = LabelSource::import;
        r.applied_at = now;
        try {
            check(r, known);
        } catch (const error &e) {
            throw error(e.code(), "label import line " + std::to_string(line_no) + ": " + e.what());
        }
        records.push_back(std::move(r));
    }

    ImportReport report;
    std::lock_guard lock(mutex_);
    for (auto &r : records) {
        const auto it = effective_.find(r.target);
        if (it != effective_.end() && it->second.label == r.label) {
            ++report.unchanged;
            continue;
        }
        report.records.push_back(std::move(r));
    }
    if (persist && !report.records.empty())
        persist(report.records);
    for (const auto &r : report.records)
        insert_locked(r);
    report.applied = report.records.size();
    return report;
}

void LabelBook::restore(LabelRecord record)
{
    std::lock_guard lock(mutex_);
    insert_locked(std::move(record));
}

std::optional<LabelRecord> LabelBook::effective(const std::string &target) const
{
    std::lock_guard lock(mutex_);
    const auto it = effective_.find(target);
    if (it == effective_.end())
        return std::nullopt;
    return it->second;
}

std::vector<LabelRecord> LabelBook::history(const std::string &target) const
{
    std::lock_guard lock(mutex_);
    const auto it = history_.find(target);
    return it == history_.end() ? std::vector<LabelRecord>{} : it->second;
}

std::map<std::string, std::string> LabelBook::effective_labels() const
{
    std::lock_guard lock(mutex_);
    std::map<std::string, std::string> out;
    for (const auto &[target, r] : effective_)
        out.emplace(target, r.label);
    return out;
}

uint64_t LabelBook::revision() const
{
    std::lock_guard lock(mutex_);
    return revision_;
}

}  // namespace ledgerlens::preprocess
