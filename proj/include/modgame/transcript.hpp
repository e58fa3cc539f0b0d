#pragma once

// Machine transcripts and their wire framing.
//
// Frame layout (all integers big-endian):
//   [machine_index: u32][bit_length: u16][payload]
// The payload holds the bits most-significant-bit first, zero-padded to a
// whole byte.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "modgame/gray_codec.hpp"

namespace modgame {

/// Exactly-b_i-bit message of machine `machine_index` (1-based).
struct Transcript {
  std::uint32_t machine_index = 0;
  std::vector<Bit> bits;

  friend bool operator==(const Transcript&, const Transcript&) = default;
};

inline constexpr std::size_t kFrameHeaderBytes = 6;

std::vector<std::uint8_t> encode_frame(const Transcript& transcript);

/// Parses one frame from the front of `bytes`; `consumed` receives the frame
/// size. Throws protocol-violation on truncated input or nonzero padding.
Transcript decode_frame(std::span<const std::uint8_t> bytes,
                        std::size_t* consumed = nullptr);

/// Concatenated frames for a whole round, and the inverse.
std::vector<std::uint8_t> encode_frames(std::span<const Transcript> transcripts);
std::vector<Transcript> decode_frames(std::span<const std::uint8_t> bytes);

std::string to_hex(std::span<const std::uint8_t> bytes);

/// All transcripts of one round in a single flat buffer, one bit per byte.
/// Machine slots are 0-based here; Transcript::machine_index is 1-based.
class TranscriptBatch {
 public:
  TranscriptBatch() = default;
  explicit TranscriptBatch(std::span<const int> lengths);

  /// Places each transcript by its machine index. Throws protocol-violation
  /// for missing, duplicate, out-of-range or wrong-length transcripts.
  static TranscriptBatch collect(std::span<const Transcript> transcripts,
                                 std::span<const int> lengths);

  std::size_t machine_count() const {
    return offsets_.empty() ? 0 : offsets_.size() - 1;
  }
  std::span<Bit> machine(std::size_t slot) {
    return {bits_.data() + offsets_[slot], offsets_[slot + 1] - offsets_[slot]};
  }
  std::span<const Bit> machine(std::size_t slot) const {
    return {bits_.data() + offsets_[slot], offsets_[slot + 1] - offsets_[slot]};
  }

  std::vector<Transcript> to_transcripts() const;

 private:
  std::vector<Bit> bits_;
  std::vector<std::size_t> offsets_;
};

}  // namespace modgame
