#include "modgame/transcript.hpp"

#include <string>

#include "modgame/error.hpp"

namespace modgame {

std::vector<std::uint8_t> encode_frame(const Transcript& transcript) {
  const std::size_t length = transcript.bits.size();
  require(length <= 0xFFFF, ErrorKind::kInvalidArgument,
          "transcript longer than 65535 bits");
  std::vector<std::uint8_t> frame(kFrameHeaderBytes + (length + 7) / 8, 0);
  const std::uint32_t index = transcript.machine_index;
  frame[0] = static_cast<std::uint8_t>(index >> 24);
  frame[1] = static_cast<std::uint8_t>(index >> 16);
  frame[2] = static_cast<std::uint8_t>(index >> 8);
  frame[3] = static_cast<std::uint8_t>(index);
  frame[4] = static_cast<std::uint8_t>(length >> 8);
  frame[5] = static_cast<std::uint8_t>(length);
  for (std::size_t i = 0; i < length; ++i) {
    require(transcript.bits[i] <= 1, ErrorKind::kInvalidArgument,
            "bit value outside {0,1}");
    if (transcript.bits[i] != 0) {
      frame[kFrameHeaderBytes + i / 8] |=
          static_cast<std::uint8_t>(0x80u >> (i % 8));
    }
  }
  return frame;
}

Transcript decode_frame(std::span<const std::uint8_t> bytes,
                        std::size_t* consumed) {
  require(bytes.size() >= kFrameHeaderBytes, ErrorKind::kProtocolViolation,
          "truncated frame header");
  Transcript out;
  out.machine_index = (std::uint32_t{bytes[0]} << 24) |
                      (std::uint32_t{bytes[1]} << 16) |
                      (std::uint32_t{bytes[2]} << 8) | std::uint32_t{bytes[3]};
  const std::size_t length = (std::size_t{bytes[4]} << 8) | bytes[5];
  const std::size_t payload = (length + 7) / 8;
  require(bytes.size() >= kFrameHeaderBytes + payload,
          ErrorKind::kProtocolViolation, "truncated frame payload");
  out.bits.resize(length);
  for (std::size_t i = 0; i < length; ++i) {
    out.bits[i] =
        (bytes[kFrameHeaderBytes + i / 8] >> (7 - i % 8)) & 1u ? 1 : 0;
  }
  if (length % 8 != 0) {
    const std::uint8_t pad_mask = static_cast<std::uint8_t>(0xFFu >> (length % 8));
    require((bytes[kFrameHeaderBytes + payload - 1] & pad_mask) == 0,
            ErrorKind::kProtocolViolation, "nonzero frame padding");
  }
  if (consumed != nullptr) *consumed = kFrameHeaderBytes + payload;
  return out;
}

std::vector<std::uint8_t> encode_frames(std::span<const Transcript> transcripts) {
  std::vector<std::uint8_t> out;
  for (const Transcript& t : transcripts) {
    const auto frame = encode_frame(t);
    out.insert(out.end(), frame.begin(), frame.end());
  }
  return out;
}

std::vector<Transcript> decode_frames(std::span<const std::uint8_t> bytes) {
  std::vector<Transcript> out;
  while (!bytes.empty()) {
    std::size_t used = 0;
    out.push_back(decode_frame(bytes, &used));
    bytes = bytes.subspan(used);
  }
  return out;
}

std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (const std::uint8_t byte : bytes) {
    out.push_back(kDigits[byte >> 4]);
    out.push_back(kDigits[byte & 0x0F]);
  }
  return out;
}

TranscriptBatch::TranscriptBatch(std::span<const int> lengths) {
  offsets_.reserve(lengths.size() + 1);
  offsets_.push_back(0);
  for (const int length : lengths) {
    require(length >= 0, ErrorKind::kInvalidArgument, "negative transcript length");
    offsets_.push_back(offsets_.back() + static_cast<std::size_t>(length));
  }
  bits_.assign(offsets_.back(), 0);
}

TranscriptBatch TranscriptBatch::collect(std::span<const Transcript> transcripts,
                                         std::span<const int> lengths) {
  TranscriptBatch batch(lengths);
  const std::size_t m = lengths.size();
  require(transcripts.size() == m, ErrorKind::kProtocolViolation,
          "expected " + std::to_string(m) + " transcripts, got " +
              std::to_string(transcripts.size()));
  std::vector<bool> seen(m, false);
  for (const Transcript& t : transcripts) {
    require(t.machine_index >= 1 && t.machine_index <= m,
            ErrorKind::kProtocolViolation,
            "machine index " + std::to_string(t.machine_index) + " out of range");
    const std::size_t slot = t.machine_index - 1;
    require(!seen[slot], ErrorKind::kProtocolViolation,
            "duplicate transcript for machine " + std::to_string(t.machine_index));
    seen[slot] = true;
    auto target = batch.machine(slot);
    require(t.bits.size() == target.size(), ErrorKind::kProtocolViolation,
            "machine " + std::to_string(t.machine_index) + " sent " +
                std::to_string(t.bits.size()) + " bits, budget is " +
                std::to_string(target.size()));
    for (std::size_t i = 0; i < target.size(); ++i) {
      require(t.bits[i] <= 1, ErrorKind::kProtocolViolation,
              "bit value outside {0,1}");
      target[i] = t.bits[i];
    }
  }
  return batch;
}

std::vector<Transcript> TranscriptBatch::to_transcripts() const {
  std::vector<Transcript> out;
  out.reserve(machine_count());
  for (std::size_t slot = 0; slot < machine_count(); ++slot) {
    const auto bits = machine(slot);
    out.push_back({static_cast<std::uint32_t>(slot + 1), {bits.begin(), bits.end()}});
  }
  return out;
}

}  // namespace modgame
