#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace combosim {

/// Which pipeline stage a bit stream came from. X marks synthetic or
/// imported streams that do not belong to the pipeline.
enum class StreamLabel : std::uint8_t { S, Y, T, C, X };

const char* to_string(StreamLabel label);

/// An ordered bit sequence, packed 64 bits per word (LSB-first inside each
/// word), with a stream label and production-rate metadata.
class BitStream {
 public:
  BitStream() = default;
  explicit BitStream(StreamLabel label) : label_(label) {}

  static BitStream from_bits(StreamLabel label,
                             const std::vector<std::uint8_t>& bits);

  void append(bool bit) {
    const std::size_t word = n_bits_ / 64;
    if (word == words_.size()) words_.push_back(0);
    words_[word] |= static_cast<std::uint64_t>(bit ? 1 : 0) << (n_bits_ % 64);
    ++n_bits_;
  }

  bool get(std::size_t i) const {
    return (words_[i / 64] >> (i % 64)) & 1u;
  }

  std::size_t size() const { return n_bits_; }
  bool empty() const { return n_bits_ == 0; }

  StreamLabel label() const { return label_; }
  void set_label(StreamLabel label) { label_ = label; }

  /// Simulated wall time over which the stream was produced, in seconds.
  double production_time() const { return production_time_; }
  void set_production_time(double seconds) { production_time_ = seconds; }

  /// Number of one-bits in the whole stream.
  std::uint64_t popcount() const;

  /// Number of one-bits among the first n bits.
  std::uint64_t popcount_prefix(std::size_t n) const;

  /// Sum over i in [0, size()-lag) of bit[i] & bit[i+lag]; the integer
  /// backbone of the autocorrelation estimators.
  std::uint64_t overlap_count(std::size_t lag) const;

  /// Same as overlap_count but between two streams of equal length:
  /// sum of a[i] & b[i+lag] for i in [0, n-lag).
  static std::uint64_t overlap_count(const BitStream& a, const BitStream& b,
                                     std::size_t lag);

  std::vector<std::uint8_t> to_bytes_per_bit() const;

  const std::vector<std::uint64_t>& words() const { return words_; }

  BitStream prefix(std::size_t n) const;

  friend bool operator==(const BitStream& a, const BitStream& b) {
    if (a.n_bits_ != b.n_bits_) return false;
    for (std::size_t i = 0; i < a.words_.size(); ++i)
      if (a.masked_word(i) != b.masked_word(i)) return false;
    return true;
  }

 private:
  std::uint64_t masked_word(std::size_t w) const;
  /// Word w of the stream shifted left by `lag` bits (i.e. bit i of the
  /// result is stream bit i + lag), zero-padded past the end.
  std::uint64_t shifted_word(std::size_t w, std::size_t lag) const;

  std::vector<std::uint64_t> words_;
  std::size_t n_bits_ = 0;
  StreamLabel label_ = StreamLabel::X;
  double production_time_ = 0.0;
};

}  // namespace combosim
