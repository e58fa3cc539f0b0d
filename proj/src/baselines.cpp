#include "modgame/baselines.hpp"

#include <cmath>
#include <string>

#include "modgame/error.hpp"
#include "pow2.hpp"

namespace modgame {

namespace {

double decode_bits(const QuantizerSpec& spec, std::span<const Bit> bits) {
  if (bits.size() != static_cast<std::size_t>(spec.bits_per_machine)) {
    fail(ErrorKind::kProtocolViolation,
         "quantized transcript has " + std::to_string(bits.size()) +
             " bits, expected " + std::to_string(spec.bits_per_machine));
  }
  std::uint64_t index = 0;
  for (const Bit bit : bits) {
    require(bit <= 1, ErrorKind::kProtocolViolation, "bit value outside {0,1}");
    index = (index << 1) | bit;
  }
  return cell_value(spec.bits_per_machine, index, spec.reconstruction);
}

}  // namespace

void QuantizerSpec::validate() const {
  require(bits_per_machine >= 1 && bits_per_machine <= kMaxQuantizerBits,
          ErrorKind::kInvalidArgument, "quantizer bits must be in 1..48");
}

std::uint64_t quantize_index(int bits, double x) {
  const std::uint64_t cells = std::uint64_t{1} << bits;
  const double scaled = std::floor(truncate(x, 0.0, 1.0) * detail::pow2(bits));
  const auto index = static_cast<std::uint64_t>(scaled);
  return index < cells ? index : cells - 1;
}

double cell_value(int bits, std::uint64_t index, Reconstruction rule) {
  const double offset = rule == Reconstruction::kMidpoint ? 0.5 : 0.0;
  return (static_cast<double>(index) + offset) * detail::pow2(-bits);
}

void quantize_encode_into(const QuantizerSpec& spec, double x, std::span<Bit> out) {
  require(out.size() == static_cast<std::size_t>(spec.bits_per_machine),
          ErrorKind::kInvalidArgument, "output span does not match quantizer bits");
  const std::uint64_t index = quantize_index(spec.bits_per_machine, x);
  for (int i = 0; i < spec.bits_per_machine; ++i) {
    out[i] = static_cast<Bit>((index >> (spec.bits_per_machine - 1 - i)) & 1u);
  }
}

std::vector<Bit> quantize_encode(const QuantizerSpec& spec, double x) {
  spec.validate();
  std::vector<Bit> bits(static_cast<std::size_t>(spec.bits_per_machine));
  quantize_encode_into(spec, x, bits);
  return bits;
}

double quantize_decode(const QuantizerSpec& spec,
                       std::span<const Transcript> transcripts) {
  spec.validate();
  require(!transcripts.empty(), ErrorKind::kProtocolViolation, "no transcripts");
  double sum = 0.0;
  for (const Transcript& t : transcripts) sum += decode_bits(spec, t.bits);
  return sum / static_cast<double>(transcripts.size());
}

double quantize_decode(const QuantizerSpec& spec, const TranscriptBatch& batch) {
  spec.validate();
  require(batch.machine_count() > 0, ErrorKind::kProtocolViolation, "no transcripts");
  double sum = 0.0;
  for (std::size_t slot = 0; slot < batch.machine_count(); ++slot) {
    sum += decode_bits(spec, batch.machine(slot));
  }
  return sum / static_cast<double>(batch.machine_count());
}

double sample_mean(std::span<const double> xs) {
  require(!xs.empty(), ErrorKind::kInvalidArgument, "sample mean of no samples");
  double sum = 0.0;
  for (const double x : xs) sum += x;
  return truncate(sum / static_cast<double>(xs.size()), 0.0, 1.0);
}

}  // namespace modgame
