#pragma once

// Glove link frames.
//
// Fixed 33-byte layout, multi-byte fields little-endian:
//
//   byte  0      sync 0xAA
//   byte  1      glove (0x01 left, 0x02 right)
//   bytes 2-3    sequence number (u16, wraps)
//   bytes 4-7    t_ms (u32)
//   bytes 8-31   twelve u16 tensions in mV, S1..S12
//   byte  32     XOR of bytes 1..31
//
// The link runs at 115200 bps; one frame per glove every 20 ms.

#include <algorithm>
#include <array>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gripforge/error.hpp"
#include "gripforge/sensor.hpp"

namespace gripforge {

inline constexpr std::uint8_t kFrameSync = 0xAA;
inline constexpr std::size_t kFrameSize = 33;
inline constexpr std::uint32_t kSamplePeriodMs = 20;
inline constexpr std::uint32_t kLinkRateBps = 115200;

enum class Glove : std::uint8_t { left = 0x01, right = 0x02 };

struct Frame {
    Glove glove = Glove::left;
    std::uint16_t sequence = 0;
    std::uint32_t t_ms = 0;
    std::array<std::uint16_t, kSensorCount> v_mv{};

    bool operator==(const Frame&) const = default;
};

using FrameBytes = std::array<std::uint8_t, kFrameSize>;

namespace detail {
inline std::uint8_t xor_fold(std::span<const std::uint8_t> bytes) {
    std::uint8_t x = 0;
    for (auto b : bytes) x ^= b;
    return x;
}
}  // namespace detail

inline FrameBytes encode_frame(const Frame& frame) {
    if (frame.glove != Glove::left && frame.glove != Glove::right) {
        throw DomainError("unknown glove id");
    }
    FrameBytes out{};
    out[0] = kFrameSync;
    out[1] = static_cast<std::uint8_t>(frame.glove);
    out[2] = static_cast<std::uint8_t>(frame.sequence & 0xFF);
    out[3] = static_cast<std::uint8_t>(frame.sequence >> 8);
    for (int i = 0; i < 4; ++i) out[4 + i] = static_cast<std::uint8_t>(frame.t_ms >> (8 * i));
    for (std::size_t s = 0; s < kSensorCount; ++s) {
        auto v = frame.v_mv[s];
        if (v > kSupplyMillivolt) {
            throw DomainError("S" + std::to_string(s + 1) + " tension " + std::to_string(v) +
                              " mV exceeds the 3300 mV supply");
        }
        out[8 + 2 * s] = static_cast<std::uint8_t>(v & 0xFF);
        out[9 + 2 * s] = static_cast<std::uint8_t>(v >> 8);
    }
    out[32] = detail::xor_fold(std::span(out).subspan(1, 31));
    return out;
}

// Decodes one frame from the start of bytes; trailing bytes are ignored.
inline Frame decode_frame(std::span<const std::uint8_t> bytes) {
    if (bytes.empty()) throw DecodeError(DecodeFailure::underflow, "no bytes to decode");
    if (bytes[0] != kFrameSync) throw DecodeError(DecodeFailure::resync, "missing sync byte");
    if (bytes.size() < kFrameSize) {
        throw DecodeError(DecodeFailure::underflow, "truncated frame: " +
                                                        std::to_string(bytes.size()) + " of 33 bytes");
    }
    if (detail::xor_fold(bytes.subspan(1, 31)) != bytes[32]) {
        throw DecodeError(DecodeFailure::corruption, "checksum mismatch");
    }
    Frame f;
    if (bytes[1] != 0x01 && bytes[1] != 0x02) {
        throw DecodeError(DecodeFailure::corruption, "unknown glove header");
    }
    f.glove = static_cast<Glove>(bytes[1]);
    f.sequence = static_cast<std::uint16_t>(bytes[2] | (bytes[3] << 8));
    f.t_ms = 0;
    for (int i = 0; i < 4; ++i) f.t_ms |= static_cast<std::uint32_t>(bytes[4 + i]) << (8 * i);
    for (std::size_t s = 0; s < kSensorCount; ++s) {
        f.v_mv[s] = static_cast<std::uint16_t>(bytes[8 + 2 * s] | (bytes[9 + 2 * s] << 8));
        if (f.v_mv[s] > kSupplyMillivolt) {
            throw DecodeError(DecodeFailure::corruption, "tension above supply");
        }
    }
    return f;
}

// Incremental decoder for a raw byte stream that may contain noise or
// damaged frames. On a bad frame it drops one byte and hunts for the next
// sync byte.
class FrameDecoder {
public:
    struct Stats {
        std::size_t frames = 0;
        std::size_t skipped_bytes = 0;
        std::size_t corrupt_frames = 0;
    };

    void feed(std::span<const std::uint8_t> bytes) { buffer_.insert(buffer_.end(), bytes.begin(), bytes.end()); }

    // Next complete valid frame, or nullopt when more bytes are needed.
    std::optional<Frame> next() {
        while (!buffer_.empty()) {
            if (buffer_.front() != kFrameSync) {
                buffer_.pop_front();
                ++stats_.skipped_bytes;
                continue;
            }
            if (buffer_.size() < kFrameSize) return std::nullopt;
            FrameBytes candidate;
            std::copy_n(buffer_.begin(), kFrameSize, candidate.begin());
            try {
                Frame f = decode_frame(candidate);
                buffer_.erase(buffer_.begin(), buffer_.begin() + kFrameSize);
                ++stats_.frames;
                return f;
            } catch (const DecodeError&) {
                ++stats_.corrupt_frames;
                ++stats_.skipped_bytes;
                buffer_.pop_front();
            }
        }
        return std::nullopt;
    }

    [[nodiscard]] std::size_t pending() const noexcept { return buffer_.size(); }
    [[nodiscard]] const Stats& stats() const noexcept { return stats_; }

private:
    std::deque<std::uint8_t> buffer_;
    Stats stats_;
};

inline std::vector<Frame> decode_stream(std::span<const std::uint8_t> bytes,
                                        FrameDecoder::Stats* stats = nullptr) {
    FrameDecoder decoder;
    decoder.feed(bytes);
    std::vector<Frame> frames;
    while (auto f = decoder.next()) frames.push_back(*f);
    if (stats) *stats = decoder.stats();
    return frames;
}

enum class BatteryState { ok, warn_change_battery };

struct BatteryStatus {
    double v_battery;
    BatteryState state;
};

inline constexpr double kBatteryWarnVolt = 3.7;

inline BatteryStatus battery_check(double v_battery) {
    if (!(v_battery >= 0.0)) throw DomainError("battery voltage must be non-negative");
    return {v_battery, v_battery < kBatteryWarnVolt ? BatteryState::warn_change_battery
                                                    : BatteryState::ok};
}

}  // namespace gripforge
