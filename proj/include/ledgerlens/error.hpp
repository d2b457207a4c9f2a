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

#include <stdexcept>
#include <string>
#include <string_view>

namespace ledgerlens {

enum class errc {
    invalid_argument,
    malformed_record,
    chain_mismatch,
    duplicate_tx_id,
    model_violation,
    io,
    double_spend,
    tip_conflict,
    storage_full,
    incompatible_format,
    not_found,
    hop_limit_exceeded,
    invalid_rule,
    unknown_target,
    empty_window,
    unknown_clustering_version,
    invalid_params,
    bind_failure,
    store_unavailable,
    read_only,
    forbidden,
};

constexpr std::string_view to_string(errc code) noexcept
{
    switch (code) {
        case errc::invalid_argument: return "invalid_argument";
        case errc::malformed_record: return "malformed_record";
        case errc::chain_mismatch: return "chain_mismatch";
        case errc::duplicate_tx_id: return "duplicate_tx_id";
        case errc::model_violation: return "model_violation";
        case errc::io: return "io";
        case errc::double_spend: return "double_spend";
        case errc::tip_conflict: return "tip_conflict";
        case errc::storage_full: return "storage_full";
        case errc::incompatible_format: return "incompatible_format";
        case errc::not_found: return "not_found";
        case errc::hop_limit_exceeded: return "hop_limit_exceeded";
        case errc::invalid_rule: return "invalid_rule";
        case errc::unknown_target: return "unknown_target";
        case errc::empty_window: return "empty_window";
        case errc::unknown_clustering_version: return "unknown_clustering_version";
        case errc::invalid_params: return "invalid_params";
        case errc::bind_failure: return "bind_failure";
        case errc::store_unavailable: return "store_unavailable";
        case errc::read_only: return "read_only";
        case errc::forbidden: return "forbidden";
    }
    return "unknown";
}

// Every failure raised by the library carries one of the codes above so
// that callers (notably the HTTP layer) can map it without string matching.
class error : public std::runtime_error {
public:
    error(errc code, const std::string &detail)
        : std::runtime_error(detail), code_(code)
    {
    }

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

}  // namespace ledgerlens
