#pragma once

// Reference estimators: per-machine b-bit quantization of the clipped sample,
// and the (clipped) sample mean with unlimited communication.

#include <cstdint>
#include <span>
#include <vector>

#include "modgame/gray_codec.hpp"
#include "modgame/transcript.hpp"

namespace modgame {

inline constexpr int kMaxQuantizerBits = 48;

enum class Reconstruction { kMidpoint, kLeftEndpoint };

struct QuantizerSpec {
  int bits_per_machine = 1;
  Reconstruction reconstruction = Reconstruction::kMidpoint;

  void validate() const;
};

/// min(floor(clamp(x) 2^b), 2^b - 1).
std::uint64_t quantize_index(int bits, double x);
/// Representative of cell `index` under the chosen rule.
double cell_value(int bits, std::uint64_t index, Reconstruction rule);

/// Index written in binary, most significant bit first.
std::vector<Bit> quantize_encode(const QuantizerSpec& spec, double x);
void quantize_encode_into(const QuantizerSpec& spec, double x, std::span<Bit> out);
/// Average of the machines' cell representatives. All transcripts must have
/// the spec's length (protocol-violation otherwise).
double quantize_decode(const QuantizerSpec& spec,
                       std::span<const Transcript> transcripts);
double quantize_decode(const QuantizerSpec& spec, const TranscriptBatch& batch);

/// clamp(mean(xs), 0, 1). Throws invalid-argument on empty input.
double sample_mean(std::span<const double> xs);

}  // namespace modgame
