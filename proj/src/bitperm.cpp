#include "hybridfft/bitperm.hpp"

#include <algorithm>
#include <bit>

namespace hfft {

namespace {

int log2_exact(std::uint64_t v, const char* what) {
  if (v == 0 || (v & (v - 1)) != 0) {
    throw ConfigError(std::string(what) + " must be a power of two");
  }
  return std::countr_zero(v);
}

int stage_count(int n, int k) { return (n + k - 1) / k; }

void check_stage_args(std::uint64_t n_samples, int stage, int radix_log2, int parallelism) {
  const int n = log2_exact(n_samples, "transform size");
  if (n < 1) throw ConfigError("transform size must be at least 2");
  if (radix_log2 < 1 || radix_log2 > 5) throw ConfigError("radix exponent must be in [1,5]");
  (void)log2_exact(static_cast<std::uint64_t>(parallelism), "parallelism");
  const int s_max = stage_count(n, radix_log2);
  if (stage < 1 || stage > s_max) throw ConfigError("stage index out of range");
}

}  // namespace

BitPermutation::BitPermutation(std::vector<std::uint8_t> map) : map_(std::move(map)) {
  if (map_.empty() || map_.size() > 64) {
    throw ConfigError("bit permutation width must be in [1,64]");
  }
  std::uint64_t seen = 0;
  for (std::uint8_t src : map_) {
    if (src >= map_.size() || (seen >> src) & 1) {
      throw ConfigError("bit permutation map is not a bijection");
    }
    seen |= std::uint64_t{1} << src;
  }
}

BitPermutation BitPermutation::identity(int bits) {
  std::vector<std::uint8_t> map(static_cast<std::size_t>(bits));
  for (int i = 0; i < bits; ++i) map[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i);
  return BitPermutation(std::move(map));
}

std::uint64_t BitPermutation::apply(std::uint64_t index) const {
  if (bits() < 64 && index >> bits()) {
    throw ConfigError("index out of range for bit permutation");
  }
  std::uint64_t out = 0;
  for (int i = 0; i < bits(); ++i) {
    out |= ((index >> map_[static_cast<std::size_t>(i)]) & 1u) << i;
  }
  return out;
}

bool BitPermutation::is_identity() const {
  for (int i = 0; i < bits(); ++i) {
    if (map_[static_cast<std::size_t>(i)] != i) return false;
  }
  return true;
}

BitPermutation compose(const BitPermutation& outer, const BitPermutation& inner) {
  if (outer.bits() != inner.bits()) {
    throw ConfigError("cannot compose bit permutations of different widths");
  }
  std::vector<std::uint8_t> map(static_cast<std::size_t>(outer.bits()));
  for (int i = 0; i < outer.bits(); ++i) {
    map[static_cast<std::size_t>(i)] = inner.source_of(outer.source_of(i));
  }
  return BitPermutation(std::move(map));
}

BitPermutation inverse(const BitPermutation& p) {
  std::vector<std::uint8_t> map(static_cast<std::size_t>(p.bits()));
  for (int i = 0; i < p.bits(); ++i) {
    map[p.source_of(i)] = static_cast<std::uint8_t>(i);
  }
  return BitPermutation(std::move(map));
}

BitPermutation reverse_segment(int bits, int hi, int lo) {
  if (lo < 0 || hi < lo || hi >= bits) {
    throw ConfigError("invalid bit segment bounds");
  }
  std::vector<std::uint8_t> map(static_cast<std::size_t>(bits));
  for (int i = 0; i < bits; ++i) {
    map[static_cast<std::size_t>(i)] =
        (i >= lo && i <= hi) ? static_cast<std::uint8_t>(hi + lo - i) : static_cast<std::uint8_t>(i);
  }
  return BitPermutation(std::move(map));
}

IndexLayout::IndexLayout(int n, int p) : bits(n), parallel(p) {
  if (n < 1 || p < 1 || p > n) {
    throw ConfigError("index layout requires 1 <= p <= n");
  }
}

int SwapStep::h_log2() const { return log2_exact(h, "swap branch distance h"); }
int SwapStep::l_log2() const { return log2_exact(l, "swap delay length l"); }

int reversal_width(std::uint64_t n_samples, int stage, int radix_log2, int parallelism) {
  check_stage_args(n_samples, stage, radix_log2, parallelism);
  const int n = std::countr_zero(n_samples);
  const int k = radix_log2;
  const int lp = std::countr_zero(static_cast<std::uint64_t>(parallelism));
  const int s_max = stage_count(n, k);
  int w;
  if (stage == 1 || stage == s_max) {
    w = n - 1 - lp;
  } else {
    w = k * (n / k + stage - s_max) + n % k - 1 - lp;
  }
  if (w < 0) throw ConfigError("reversal width is negative for this configuration");
  return w;
}

InplaceWidths inplace_reversal_widths(std::uint64_t n_samples, int stage, int radix_log2,
                                      int parallelism) {
  check_stage_args(n_samples, stage, radix_log2, parallelism);
  const int n = std::countr_zero(n_samples);
  const int k = radix_log2;
  const int lp = std::countr_zero(static_cast<std::uint64_t>(parallelism));
  if (n <= k || n > 3 * k) {
    throw ConfigError("in-place schedules support only 2^k < N <= 2^(3k)");
  }
  const bool three_iter = n > 2 * k;  // N in (2^(2k), 2^(3k)]
  const int middle = k * (n / k - 1) + n % k - 1 - lp;
  InplaceWidths out;
  if (three_iter) {
    switch (stage) {
      case 1: out = {n - 1 - lp, 0}; break;
      case 2: out = {n - 1 - lp, middle}; break;
      case 3: out = {middle, 0}; break;
      default: throw ConfigError("stage index out of range");
    }
  } else {
    switch (stage) {
      case 1: out = {n - 1 - lp, 0}; break;
      case 2: out = {0, 0}; break;
      default: throw ConfigError("stage index out of range");
    }
  }
  if (out.w < 0 || out.w_tilde < 0) {
    throw ConfigError("reversal width is negative for this configuration");
  }
  return out;
}

namespace {

BitPermutation low_reversal(int serial_bits, int w) {
  if (w <= 1) return BitPermutation::identity(serial_bits);
  if (w > serial_bits) w = serial_bits;  // callers pass w <= serial+1; clamp to full reversal
  return reverse_segment(serial_bits, w - 1, 0);
}

}  // namespace

BitPermutation serial_reversal(std::uint64_t n_samples, int stage, int radix_log2,
                               int parallelism) {
  const int n = std::countr_zero(n_samples);
  const int p = std::countr_zero(static_cast<std::uint64_t>(2 * parallelism));
  const int serial = n - p;
  const int w = reversal_width(n_samples, stage, radix_log2, parallelism);
  if (serial == 0) return BitPermutation::identity(1);  // degenerate N=2 counter
  if (serial - 1 >= w) return low_reversal(serial, w);
  return reverse_segment(serial, serial - 1, 0);
}

BitPermutation inplace_serial_reversal(std::uint64_t n_samples, int stage, int radix_log2,
                                       int parallelism) {
  const int n = std::countr_zero(n_samples);
  const int p = std::countr_zero(static_cast<std::uint64_t>(2 * parallelism));
  const int serial = n - p;
  const InplaceWidths ws = inplace_reversal_widths(n_samples, stage, radix_log2, parallelism);
  BitPermutation low = (serial - 1 >= ws.w) ? low_reversal(serial, ws.w)
                                            : reverse_segment(serial, serial - 1, 0);
  if (ws.w_tilde == 0) return low;
  BitPermutation top = reverse_segment(serial, serial - 1, serial - ws.w_tilde);
  return compose(top, low);
}

BitPermutation lane_reversal(const IndexLayout& layout) {
  return reverse_segment(layout.bits, layout.bits - 1, layout.bits - layout.parallel);
}

BitPermutation lane_serial_swap(const IndexLayout& layout, const SwapStep& step) {
  const int hb = step.h_log2();
  const int lb = step.l_log2();
  if (hb >= layout.parallel) throw ConfigError("swap branch distance exceeds parallel bits");
  if (lb >= layout.serial()) throw ConfigError("swap delay length exceeds serial bits");
  const int a = layout.lane_axis() + hb;
  const int b = lb;
  std::vector<std::uint8_t> map(static_cast<std::size_t>(layout.bits));
  for (int i = 0; i < layout.bits; ++i) map[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i);
  std::swap(map[static_cast<std::size_t>(a)], map[static_cast<std::size_t>(b)]);
  return BitPermutation(std::move(map));
}

BitPermutation extend_serial(const BitPermutation& serial_perm, const IndexLayout& layout) {
  if (serial_perm.bits() != layout.serial() &&
      !(layout.serial() == 0 && serial_perm.bits() == 1)) {
    throw ConfigError("serial permutation width does not match layout");
  }
  std::vector<std::uint8_t> map(static_cast<std::size_t>(layout.bits));
  for (int i = 0; i < layout.serial(); ++i) map[static_cast<std::size_t>(i)] = serial_perm.source_of(i);
  for (int i = layout.serial(); i < layout.bits; ++i) map[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(i);
  return BitPermutation(std::move(map));
}

}  // namespace hfft
