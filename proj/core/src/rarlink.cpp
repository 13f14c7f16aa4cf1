// SPDX-License-Identifier: Apache-2.0
//
// massra: link-level simulator for massive MIMO random access
// Copyright (C) 2026 The massra authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "massra/rarlink.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

namespace massra {

namespace {

// g(x) = x^5 + x^4 + x^2 + 1, without the leading term.
constexpr unsigned kPoly = 0b10101;

void put_field(std::span<std::uint8_t> out, int value, int width)
{
    for (int i = 0; i < width; ++i) {
        out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>((value >> (width - 1 - i)) & 1);
    }
}

int get_field(std::span<const std::uint8_t> in, int width)
{
    int value = 0;
    for (int i = 0; i < width; ++i) {
        value = (value << 1) | (in[static_cast<std::size_t>(i)] & 1);
    }
    return value;
}

}  // namespace

bool RarPayload::valid() const noexcept
{
    return ta >= 0 && ta <= 44 && rb_start >= 0 && rb_start <= 14 && num_rb >= 1 && num_rb <= 4;
}

CrcBits crc5(std::span<const std::uint8_t> message)
{
    unsigned reg = 0;
    for (std::uint8_t bit : message) {
        const unsigned top = ((reg >> 4) & 1U) ^ (bit & 1U);
        reg = (reg << 1) & 0x1FU;
        if (top != 0) {
            reg ^= kPoly;
        }
    }
    CrcBits out{};
    put_field(out, static_cast<int>(reg), kCrcBits);
    return out;
}

PayloadBits pack_payload(const RarPayload& p)
{
    if (p.ta < 0 || p.ta > 63 || p.rb_start < 0 || p.rb_start > 15 || p.num_rb < 1 || p.num_rb > 4) {
        throw std::invalid_argument("RAR payload field out of its bit width");
    }
    PayloadBits bits{};
    std::span<std::uint8_t> s(bits);
    put_field(s.subspan(0, 6), p.ta, 6);
    put_field(s.subspan(6, 4), p.rb_start, 4);
    put_field(s.subspan(10, 2), p.num_rb - 1, 2);
    return bits;
}

RarPayload unpack_payload(std::span<const std::uint8_t> bits)
{
    if (bits.size() != kPayloadBits) {
        throw std::invalid_argument("unpack_payload: need 12 bits");
    }
    return {get_field(bits.subspan(0, 6), 6), get_field(bits.subspan(6, 4), 4), get_field(bits.subspan(10, 2), 2) + 1};
}

RarBits encode(const RarPayload& payload)
{
    const auto info = pack_payload(payload);
    const auto crc = crc5(info);
    RarBits bits{};
    std::fill_n(bits.begin(), kAckBits, std::uint8_t{1});
    std::copy(info.begin(), info.end(), bits.begin() + kAckBits);
    std::copy(crc.begin(), crc.end(), bits.begin() + kAckBits + kPayloadBits);
    return bits;
}

std::vector<cd> bpsk(const RarBits& bits)
{
    std::vector<cd> out(bits.size());
    std::transform(bits.begin(), bits.end(), out.begin(), [](std::uint8_t b) { return cd(b ? 1.0 : -1.0, 0.0); });
    return out;
}

RarPlacement map_to_grid(int k, const SystemParams& params)
{
    if (k < 1 || k > params.num_preambles) {
        throw std::out_of_range("map_to_grid: preamble index outside [1, Q]");
    }
    RarPlacement placement;
    for (int b = 0; b < kRarBits; ++b) {
        const int j = (k - 1) * params.n_sc + b;
        const int symbol = j / params.n_rs;
        const int sub = j % params.n_rs;
        placement.copies[0].push_back({symbol, sub});
        placement.copies[1].push_back({symbol + params.n_slot, (sub + params.n_rs / 2) % params.n_rs});
    }
    return placement;
}

const char* to_string(DecodeStatus status)
{
    switch (status) {
    case DecodeStatus::no_rar:
        return "no_rar";
    case DecodeStatus::crc_fail:
        return "crc_fail";
    case DecodeStatus::success:
        return "success";
    }
    return "unknown";
}

DecodeResult decode_bits(const RarBits& bits)
{
    DecodeResult result;
    result.bits = bits;
    result.ack_ones = static_cast<int>(std::count(bits.begin(), bits.begin() + kAckBits, std::uint8_t{1}));
    if (result.ack_ones <= 4) {
        result.status = DecodeStatus::no_rar;
        return result;
    }
    const std::span<const std::uint8_t> info(bits.data() + kAckBits, kPayloadBits);
    const auto crc = crc5(info);
    if (!std::equal(crc.begin(), crc.end(), bits.begin() + kAckBits + kPayloadBits)) {
        result.status = DecodeStatus::crc_fail;
        return result;
    }
    result.status = DecodeStatus::success;
    result.payload = unpack_payload(info);
    return result;
}

DecodeResult decode(std::span<const cd> copy1, std::span<const cd> copy2)
{
    if (copy1.size() != kRarBits || copy2.size() != kRarBits) {
        throw std::invalid_argument("decode: each hop copy must carry 24 values");
    }
    RarBits bits{};
    for (std::size_t b = 0; b < bits.size(); ++b) {
        bits[b] = (copy1[b].real() + copy2[b].real()) > 0.0 ? 1 : 0;
    }
    return decode_bits(bits);
}

std::string to_hex(const RarBits& bits)
{
    static constexpr char digits[] = "0123456789ABCDEF";
    std::string out;
    for (std::size_t i = 0; i < bits.size(); i += 4) {
        const int nibble = get_field(std::span<const std::uint8_t>(bits).subspan(i, 4), 4);
        out.push_back(digits[nibble]);
    }
    return out;
}

RarBits from_hex(std::string_view hex)
{
    if (hex.size() != kRarBits / 4) {
        throw std::invalid_argument("from_hex: expected 6 hex digits");
    }
    RarBits bits{};
    for (std::size_t i = 0; i < hex.size(); ++i) {
        const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(hex[i])));
        int v = 0;
        if (c >= '0' && c <= '9') {
            v = c - '0';
        } else if (c >= 'A' && c <= 'F') {
            v = c - 'A' + 10;
        } else {
            throw std::invalid_argument("from_hex: invalid digit");
        }
        put_field(std::span<std::uint8_t>(bits).subspan(4 * i, 4), v, 4);
    }
    return bits;
}

}  // namespace massra
