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
#include <ledgerlens/model.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>

#include <openssl/sha.h>

namespace ledgerlens {

namespace {

bool is_space(char c) noexcept
{
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

int read_digits(std::string_view text, std::size_t pos, std::size_t count)
{
    if (pos + count > text.size())
        throw error(errc::invalid_argument, "truncated timestamp '" + std::string(text) + "'");
    int value = 0;
    const auto *first = text.data() + pos;
    const auto [ptr, ec] = std::from_chars(first, first + count, value);
    if (ec != std::errc{} || ptr != first + count)
        throw error(errc::invalid_argument, "bad digits in timestamp '" + std::string(text) + "'");
    return value;
}

void expect_char(std::string_view text, std::size_t pos, char c)
{
    if (pos >= text.size() || text[pos] != c)
        throw error(errc::invalid_argument, "malformed timestamp '" + std::string(text) + "'");
}

}  // namespace

Timestamp parse_rfc3339(std::string_view text)
{
    using namespace std::chrono;
    const int y = read_digits(text, 0, 4);
    expect_char(text, 4, '-');
    const int mo = read_digits(text, 5, 2);
    expect_char(text, 7, '-');
    const int d = read_digits(text, 8, 2);
    if (text.size() <= 10 || (text[10] != 'T' && text[10] != 't'))
        throw error(errc::invalid_argument, "malformed timestamp '" + std::string(text) + "'");
    const int hh = read_digits(text, 11, 2);
    expect_char(text, 13, ':');
    const int mm = read_digits(text, 14, 2);
    expect_char(text, 16, ':');
    const int ss = read_digits(text, 17, 2);
    const auto zone = text.substr(19);
    if (zone != "Z" && zone != "z" && zone != "+00:00")
        throw error(errc::invalid_argument, "timestamp must be UTC at second precision: '" + std::string(text) + "'");
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || hh > 23 || mm > 59 || ss > 59)
        throw error(errc::invalid_argument, "timestamp out of range '" + std::string(text) + "'");
    return sys_days{ymd} + hours{hh} + minutes{mm} + seconds{ss};
}

std::string format_rfc3339(Timestamp ts)
{
    using namespace std::chrono;
    const auto day_start = floor<days>(ts);
    const year_month_day ymd{day_start};
    const hh_mm_ss tod{ts - day_start};
    std::array<char, 32> buf{};
    const int n = std::snprintf(buf.data(), buf.size(), "%04d-%02u-%02uT%02d:%02d:%02dZ",
        static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
        static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
        static_cast<int>(tod.seconds().count()));
    return std::string(buf.data(), static_cast<std::size_t>(n));
}

Address::Address(std::string value) : value_(std::move(value))
{
    if (value_.empty())
        throw error(errc::invalid_argument, "address must not be empty");
    if (value_.size() > max_size)
        throw error(errc::invalid_argument, "address longer than 256 chars");
    if (is_space(value_.front()) || is_space(value_.back()))
        throw error(errc::invalid_argument, "address has surrounding whitespace: '" + value_ + "'");
}

ChannelId::ChannelId(std::string value) : value_(std::move(value))
{
    if (value_.empty())
        throw error(errc::invalid_argument, "channel id must not be empty");
}

bool is_hex256(std::string_view text) noexcept
{
    return text.size() == 64
        && std::all_of(text.begin(), text.end(), [](char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); });
}

std::string_view to_string(TxModel model) noexcept
{
    return model == TxModel::utxo ? "utxo" : "account";
}

void validate(const ParsedTransaction &tx)
{
    if (tx.model == TxModel::utxo) {
        if (tx.transfer)
            throw error(errc::model_violation, "utxo tx " + tx.id.str() + " carries an account transfer");
        if (tx.outputs.empty())
            throw error(errc::model_violation, "utxo tx " + tx.id.str() + " has no outputs");
    } else {
        if (!tx.inputs.empty() || !tx.outputs.empty())
            throw error(errc::model_violation, "account tx " + tx.id.str() + " carries utxo inputs/outputs");
        if (!tx.transfer)
            throw error(errc::model_violation, "account tx " + tx.id.str() + " has no transfer");
    }
}

std::string sha256_hex(std::string_view bytes)
{
    std::array<unsigned char, SHA256_DIGEST_LENGTH> digest{};
    SHA256(reinterpret_cast<const unsigned char *>(bytes.data()), bytes.size(), digest.data());
    static constexpr char hex[] = "0123456789abcdef";
    std::string out(64, '0');
    for (std::size_t i = 0; i < digest.size(); ++i) {
        out[2 * i] = hex[digest[i] >> 4];
        out[2 * i + 1] = hex[digest[i] & 0x0f];
    }
    return out;
}

TxId derive_tx_id(std::string_view canonical_bytes)
{
    return TxId(sha256_hex(canonical_bytes));
}

TxId derive_tx_id(std::span<const std::byte> canonical_bytes)
{
    return derive_tx_id(std::string_view(reinterpret_cast<const char *>(canonical_bytes.data()), canonical_bytes.size()));
}

std::vector<Address> mentioned_addresses(const ParsedTransaction &tx)
{
    std::vector<Address> out;
    out.reserve(tx.signers.size() + tx.outputs.size() + 2);
    out.insert(out.end(), tx.signers.begin(), tx.signers.end());
    for (const auto &o : tx.outputs)
        out.push_back(o.address);
    if (tx.transfer) {
        out.push_back(tx.transfer->from);
        out.push_back(tx.transfer->to);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace ledgerlens
