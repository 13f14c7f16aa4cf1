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

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "massra/matrix.hpp"
#include "massra/sysparams.hpp"

namespace massra {

inline constexpr int kAckBits = 7;
inline constexpr int kPayloadBits = 12;
inline constexpr int kCrcBits = 5;
static_assert(kAckBits + kPayloadBits + kCrcBits == kRarBits);

/// Bits are stored one per byte, value 0 or 1, most significant first.
using RarBits = std::array<std::uint8_t, kRarBits>;
using PayloadBits = std::array<std::uint8_t, kPayloadBits>;
using CrcBits = std::array<std::uint8_t, kCrcBits>;

/// 12 information bits: ta (6) | rb_start (4) | num_rb - 1 (2).
struct RarPayload {
    int ta = 0;        // protocol range 0..44
    int rb_start = 0;  // protocol range 0..14
    int num_rb = 1;    // 1..4

    /// True when every field is inside its protocol range.
    bool valid() const noexcept;
    friend bool operator==(const RarPayload&, const RarPayload&) = default;
};

/// Remainder of message * x^5 modulo x^5 + x^4 + x^2 + 1 over GF(2).
CrcBits crc5(std::span<const std::uint8_t> message);

PayloadBits pack_payload(const RarPayload& payload);
RarPayload unpack_payload(std::span<const std::uint8_t> bits);

/// 1111111 | payload | crc5(payload). Throws std::invalid_argument when a
/// field does not fit its bit width.
RarBits encode(const RarPayload& payload);

/// BPSK: bit 1 -> +1, bit 0 -> -1.
std::vector<cd> bpsk(const RarBits& bits);

struct ResourceElement {
    int symbol = 0;
    int subcarrier = 0;
    friend bool operator==(const ResourceElement&, const ResourceElement&) = default;
    friend auto operator<=>(const ResourceElement&, const ResourceElement&) = default;
};

/// RE of every RAR bit for both hop copies: copies[c][b].
struct RarPlacement {
    std::array<std::vector<ResourceElement>, 2> copies;
};

/// Bit b of preamble k sits at linear index j = (k - 1) N_SC + b of a
/// symbol-major grid. Copy 1 uses (j / N_RS, j mod N_RS); copy 2 adds
/// n_slot symbols and N_RS/2 subcarriers (mod N_RS).
RarPlacement map_to_grid(int k, const SystemParams& params);

enum class DecodeStatus { no_rar, crc_fail, success };

const char* to_string(DecodeStatus status);

struct DecodeResult {
    DecodeStatus status = DecodeStatus::no_rar;
    std::optional<RarPayload> payload;
    RarBits bits{};
    int ack_ones = 0;
};

/// Hard-decision decode: bit = 1 iff Re(copy1) + Re(copy2) > 0. Five or
/// more ack ones are needed to accept a RAR; then the CRC is checked.
DecodeResult decode(std::span<const cd> copy1, std::span<const cd> copy2);

/// Decode of already-decided bits (ack rule, then CRC).
DecodeResult decode_bits(const RarBits& bits);

/// 24 bits as 6 hex digits, most significant first.
std::string to_hex(const RarBits& bits);
RarBits from_hex(std::string_view hex);

}  // namespace massra
