#pragma once

#include <cstdint>
#include <vector>

#include "hybridfft/errors.hpp"

namespace hfft {

/// Permutation of the bit dimensions of an index.
///
/// An n-bit index x(n-1)..x(0) is mapped so that destination bit i receives
/// source bit map[i].  Values are immutable once constructed and validated
/// to be a bijection of {0,...,n-1}.
class BitPermutation {
 public:
  explicit BitPermutation(std::vector<std::uint8_t> map);

  static BitPermutation identity(int bits);

  int bits() const { return static_cast<int>(map_.size()); }
  const std::vector<std::uint8_t>& map() const { return map_; }
  std::uint8_t source_of(int dest_bit) const { return map_[static_cast<std::size_t>(dest_bit)]; }

  /// Applies the permutation to an index in [0, 2^n).
  std::uint64_t apply(std::uint64_t index) const;

  bool is_identity() const;

  friend bool operator==(const BitPermutation& a, const BitPermutation& b) {
    return a.map_ == b.map_;
  }

 private:
  std::vector<std::uint8_t> map_;
};

/// compose(outer, inner).apply(i) == outer.apply(inner.apply(i)).
BitPermutation compose(const BitPermutation& outer, const BitPermutation& inner);
BitPermutation inverse(const BitPermutation& p);

/// Reverses bits hi..lo in place; every other bit is fixed.  Involution.
BitPermutation reverse_segment(int bits, int hi, int lo);

/// Split of an n-bit position into a parallel segment (top p bits, the bank
/// id) and a serial segment (low n-p bits, the address inside the bank).
struct IndexLayout {
  int bits;      // n, total index bits
  int parallel;  // p = log2(2P), 1 <= p < n ... except the N=2 corner where p == n

  IndexLayout(int n, int p);

  int serial() const { return bits - parallel; }
  /// Lowest parallel bit; pairs the two lanes of one MDC unit.
  int lane_axis() const { return bits - parallel; }
  std::uint64_t bank_of(std::uint64_t pos) const { return pos >> serial(); }
  std::uint64_t address_of(std::uint64_t pos) const {
    return pos & ((std::uint64_t{1} << serial()) - 1);
  }
};

/// One reshuffle-circuit exchange: branch distance h (power of two) and
/// delay-line length l (power of two).  Swaps parallel bit log2(h) with
/// serial bit log2(l).
struct SwapStep {
  std::uint32_t h = 1;
  std::uint32_t l = 1;

  int h_log2() const;
  int l_log2() const;

  friend bool operator==(const SwapStep&, const SwapStep&) = default;
};

/// Number of serial bits reversed by the address permutation of stage s when
/// intermediate results stream to neighboring banks.  Stage count is
/// S = ceil(n/k); first and last stages reverse n - 1 - log2(P) bits, middle
/// stages k*(floor(n/k) + s - S) + n%k - 1 - log2(P).
int reversal_width(std::uint64_t n_samples, int stage, int radix_log2, int parallelism);

struct InplaceWidths {
  int w = 0;        // low-bit reversal width
  int w_tilde = 0;  // additional top-segment reversal width, stage 2 only
  friend bool operator==(const InplaceWidths&, const InplaceWidths&) = default;
};

/// Reversal widths for the in-place (memory-based) schedules.  Only defined
/// for 2^k < N <= 2^(3k).
InplaceWidths inplace_reversal_widths(std::uint64_t n_samples, int stage, int radix_log2,
                                      int parallelism);

/// Address permutation of stage s (serial domain, width n-p): reverses the
/// low w serial bits, or all serial bits when w covers them.
BitPermutation serial_reversal(std::uint64_t n_samples, int stage, int radix_log2,
                               int parallelism);

/// In-place-mode address permutation: low-w reversal followed by a reversal
/// of the top w_tilde serial bits.
BitPermutation inplace_serial_reversal(std::uint64_t n_samples, int stage, int radix_log2,
                                       int parallelism);

/// Parallel-branch exchange: reverses all p parallel bits, serial bits fixed.
/// Full position-domain permutation.
BitPermutation lane_reversal(const IndexLayout& layout);

/// Single reshuffle exchange as a full position-domain permutation:
/// transposition of parallel bit (n-p+log2 h) with serial bit log2 l.
BitPermutation lane_serial_swap(const IndexLayout& layout, const SwapStep& step);

/// Extends a serial-domain permutation to the full position domain, leaving
/// the parallel bits fixed.
BitPermutation extend_serial(const BitPermutation& serial_perm, const IndexLayout& layout);

}  // namespace hfft
