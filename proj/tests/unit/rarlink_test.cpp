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

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdint>
#include <set>
#include <vector>

#include "massra/rarlink.hpp"

using namespace massra;
using nlohmann::json;

namespace {

constexpr unsigned kGenerator = 0b110101;  // x^5 + x^4 + x^2 + 1

unsigned bits_to_int(std::span<const std::uint8_t> bits)
{
    unsigned v = 0;
    for (auto b : bits) v = (v << 1) | b;
    return v;
}

// Polynomial long division of message * x^5 by the generator.
unsigned long_division_remainder(unsigned message12)
{
    unsigned dividend = message12 << 5;
    for (int deg = 16; deg >= 5; --deg) {
        if ((dividend >> deg) & 1U) dividend ^= kGenerator << (deg - 5);
    }
    return dividend;
}

std::vector<std::uint8_t> int_to_bits(unsigned v, int width)
{
    std::vector<std::uint8_t> out(static_cast<std::size_t>(width));
    for (int i = 0; i < width; ++i) out[static_cast<std::size_t>(i)] = (v >> (width - 1 - i)) & 1U;
    return out;
}

unsigned codeword_syndrome(unsigned word17)
{
    for (int deg = 16; deg >= 5; --deg) {
        if ((word17 >> deg) & 1U) word17 ^= kGenerator << (deg - 5);
    }
    return word17;
}

}  // namespace

TEST(RarLink, CrcMatchesLongDivisionForEveryMessage)
{
    for (unsigned msg = 0; msg < 4096; ++msg) {
        const auto bits = int_to_bits(msg, 12);
        const unsigned crc = bits_to_int(crc5(bits));
        ASSERT_EQ(crc, long_division_remainder(msg)) << msg;
        ASSERT_EQ(codeword_syndrome((msg << 5) | crc), 0u);
    }
}

TEST(RarLink, CrcExamples)
{
    EXPECT_EQ(bits_to_int(crc5(int_to_bits(0, 12))), 0u);
    // 0x0AB: remainder 00111 by long division.
    const unsigned expect = long_division_remainder(0x0AB);
    EXPECT_EQ(bits_to_int(crc5(int_to_bits(0x0AB, 12))), expect);
    EXPECT_EQ(expect, 0b00111u);
}

TEST(RarLink, EncodeLayout)
{
    const auto zero = encode({0, 0, 1});
    for (int b = 0; b < 7; ++b) EXPECT_EQ(zero[b], 1);
    for (int b = 7; b < 24; ++b) EXPECT_EQ(zero[b], 0);

    const auto f = encode({44, 3, 2});
    const std::vector<std::uint8_t> ta(f.begin() + 7, f.begin() + 13);
    EXPECT_EQ(ta, (std::vector<std::uint8_t>{1, 0, 1, 1, 0, 0}));
    const std::vector<std::uint8_t> rb(f.begin() + 13, f.begin() + 17);
    EXPECT_EQ(rb, (std::vector<std::uint8_t>{0, 0, 1, 1}));
    EXPECT_EQ(f[17], 0);
    EXPECT_EQ(f[18], 1);
    EXPECT_EQ(to_hex(f), "FF61BD");
    EXPECT_EQ(from_hex("ff61bd"), f);
    EXPECT_THROW(encode({64, 0, 1}), std::invalid_argument);
    EXPECT_THROW(encode({0, 0, 5}), std::invalid_argument);
    EXPECT_THROW(from_hex("FF61B"), std::invalid_argument);
}

TEST(RarLink, PayloadValidity)
{
    EXPECT_TRUE((RarPayload{44, 14, 4}.valid()));
    EXPECT_FALSE((RarPayload{45, 0, 1}.valid()));
    EXPECT_FALSE((RarPayload{0, 15, 1}.valid()));
    EXPECT_FALSE((RarPayload{0, 0, 0}.valid()));
}

TEST(RarLink, ExhaustiveRoundTrip)
{
    int count = 0;
    for (int ta = 0; ta <= 44; ++ta) {
        for (int rb = 0; rb <= 14; ++rb) {
            for (int n = 1; n <= 4; ++n) {
                const RarPayload p{ta, rb, n};
                const auto bits = encode(p);
                ASSERT_GE(std::count(bits.begin(), bits.end(), 1), 7);
                const auto sym = bpsk(bits);
                const auto r = decode(sym, sym);
                ASSERT_EQ(r.status, DecodeStatus::success);
                ASSERT_EQ(*r.payload, p);
                ++count;
            }
        }
    }
    EXPECT_EQ(count, 45 * 15 * 4);
}

TEST(RarLink, SingleFlipsAreDetected)
{
    for (unsigned msg = 0; msg < 4096; msg += 7) {
        RarBits bits{};
        std::fill_n(bits.begin(), 7, 1);
        const auto m = int_to_bits(msg, 12);
        std::copy(m.begin(), m.end(), bits.begin() + 7);
        const auto c = crc5(m);
        std::copy(c.begin(), c.end(), bits.begin() + 19);
        ASSERT_EQ(decode_bits(bits).status, DecodeStatus::success);
        for (int b = 7; b < 24; ++b) {
            auto flipped = bits;
            flipped[b] ^= 1;
            ASSERT_EQ(decode_bits(flipped).status, DecodeStatus::crc_fail) << msg << " bit " << b;
        }
    }
}

TEST(RarLink, DecodeExamples)
{
    const auto bits = encode({17, 5, 3});
    auto sym = bpsk(bits);
    for (auto& s : sym) s *= 2.5;
    const auto ok = decode(sym, sym);
    EXPECT_EQ(ok.status, DecodeStatus::success);
    EXPECT_EQ(*ok.payload, (RarPayload{17, 5, 3}));

    const std::vector<cd> zeros(24);
    const auto none = decode(zeros, zeros);
    EXPECT_EQ(none.status, DecodeStatus::no_rar);
    EXPECT_EQ(none.ack_ones, 0);

    // Copies combine: a weak wrong copy is outvoted by a strong right one.
    std::vector<cd> weak_wrong(24);
    for (std::size_t b = 0; b < 24; ++b) weak_wrong[b] = -0.5 * bpsk(bits)[b];
    EXPECT_EQ(decode(sym, weak_wrong).status, DecodeStatus::success);

    // Five ack ones pass the vote, four do not.
    auto ack = bits;
    ack[0] = ack[1] = 0;
    EXPECT_EQ(decode_bits(ack).status, DecodeStatus::success);
    ack[2] = 0;
    EXPECT_EQ(decode_bits(ack).status, DecodeStatus::no_rar);
    EXPECT_THROW(decode(std::vector<cd>(23), zeros), std::invalid_argument);
}

TEST(RarLink, GridMappingDisjoint)
{
    const auto p = derive(json::object());
    EXPECT_EQ(map_to_grid(1, p).copies[0].front(), (ResourceElement{0, 0}));
    std::set<ResourceElement> used;
    int max_symbol = 0;
    for (int k = 1; k <= p.num_preambles; ++k) {
        const auto pl = map_to_grid(k, p);
        for (int c = 0; c < 2; ++c) {
            ASSERT_EQ(pl.copies[c].size(), 24u);
            for (const auto& re : pl.copies[c]) {
                ASSERT_TRUE(used.insert(re).second) << "k=" << k;
                ASSERT_LT(re.subcarrier, p.n_rs);
                max_symbol = std::max(max_symbol, re.symbol);
                if (c == 0) {
                    ASSERT_LT(re.symbol, 6);
                } else {
                    ASSERT_GE(re.symbol, 6);
                }
            }
        }
        // Copy 1 of preamble k sits on subcarriers ((k-1) N_SC + b) mod N_RS.
        for (int b = 0; b < 24; ++b) {
            EXPECT_EQ(pl.copies[0][b].subcarrier, ((k - 1) * 24 + b) % 72);
            EXPECT_EQ(pl.copies[0][b].symbol, (k - 1) * 24 / 72);
            EXPECT_EQ(pl.copies[1][b].subcarrier, (((k - 1) * 24 + b) % 72 + 36) % 72);
        }
    }
    EXPECT_EQ(used.size(), 17u * 48u);
    EXPECT_LE(max_symbol, 11);
    EXPECT_THROW(map_to_grid(18, p), std::out_of_range);
}
