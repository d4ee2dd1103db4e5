#include "combosim/bitstream.hpp"

#include <bit>
#include <stdexcept>

namespace combosim {

const char* to_string(StreamLabel label) {
  switch (label) {
    case StreamLabel::S: return "S";
    case StreamLabel::Y: return "Y";
    case StreamLabel::T: return "T";
    case StreamLabel::C: return "C";
    case StreamLabel::X: return "X";
  }
  return "?";
}

BitStream BitStream::from_bits(StreamLabel label,
                               const std::vector<std::uint8_t>& bits) {
  BitStream s(label);
  for (std::uint8_t b : bits) s.append(b != 0);
  return s;
}

std::uint64_t BitStream::masked_word(std::size_t w) const {
  std::uint64_t v = words_[w];
  if (w == n_bits_ / 64) {
    const unsigned rem = n_bits_ % 64;
    v &= rem == 0 ? 0 : (~std::uint64_t{0} >> (64 - rem));
  }
  return v;
}

std::uint64_t BitStream::shifted_word(std::size_t w, std::size_t lag) const {
  const std::size_t q = lag / 64;
  const unsigned r = lag % 64;
  const std::size_t i = w + q;
  std::uint64_t v = 0;
  if (i < words_.size()) v = words_[i] >> r;
  if (r != 0 && i + 1 < words_.size()) v |= words_[i + 1] << (64 - r);
  return v;
}

std::uint64_t BitStream::popcount() const { return popcount_prefix(n_bits_); }

std::uint64_t BitStream::popcount_prefix(std::size_t n) const {
  if (n > n_bits_) throw std::out_of_range("popcount_prefix past end");
  std::uint64_t total = 0;
  const std::size_t full = n / 64;
  for (std::size_t w = 0; w < full; ++w)
    total += std::popcount(words_[w]);
  const unsigned rem = n % 64;
  if (rem != 0)
    total += std::popcount(words_[full] & (~std::uint64_t{0} >> (64 - rem)));
  return total;
}

std::uint64_t BitStream::overlap_count(std::size_t lag) const {
  return overlap_count(*this, *this, lag);
}

std::uint64_t BitStream::overlap_count(const BitStream& a, const BitStream& b,
                                       std::size_t lag) {
  const std::size_t n = a.n_bits_ < b.n_bits_ ? a.n_bits_ : b.n_bits_;
  if (lag >= n) return 0;
  const std::size_t terms = n - lag;  // pairs (a[i], b[i+lag])
  std::uint64_t total = 0;
  const std::size_t full = terms / 64;
  for (std::size_t w = 0; w < full; ++w)
    total += std::popcount(a.words_[w] & b.shifted_word(w, lag));
  const unsigned rem = terms % 64;
  if (rem != 0) {
    const std::uint64_t mask = ~std::uint64_t{0} >> (64 - rem);
    total += std::popcount(a.words_[full] & b.shifted_word(full, lag) & mask);
  }
  return total;
}

std::vector<std::uint8_t> BitStream::to_bytes_per_bit() const {
  std::vector<std::uint8_t> out(n_bits_);
  for (std::size_t i = 0; i < n_bits_; ++i) out[i] = get(i) ? 1 : 0;
  return out;
}

BitStream BitStream::prefix(std::size_t n) const {
  if (n > n_bits_) throw std::out_of_range("prefix longer than stream");
  BitStream s(label_);
  s.production_time_ = production_time_;
  s.n_bits_ = n;
  s.words_.assign(words_.begin(),
                  words_.begin() + static_cast<std::ptrdiff_t>((n + 63) / 64));
  if (n % 64 != 0 && !s.words_.empty())
    s.words_.back() &= ~std::uint64_t{0} >> (64 - n % 64);
  return s;
}

}  // namespace combosim
