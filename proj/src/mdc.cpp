#include "hybridfft/mdc.hpp"

#include <cmath>
#include <numbers>

namespace hfft {

namespace {

void check_radix(int k) {
  if (k < 1 || k > 5) throw ConfigError("radix exponent must be in [1,5]");
}

}  // namespace

ComplexSample twiddle(std::uint64_t n, std::int64_t exponent) {
  if (n == 0 || (n & (n - 1)) != 0) throw ConfigError("twiddle base must be a power of two");
  std::uint64_t e = static_cast<std::uint64_t>(((exponent % static_cast<std::int64_t>(n)) +
                                                static_cast<std::int64_t>(n))) %
                    n;
  // Exact values on the axes keep the trivial rotations bit-clean.
  if (e * 4 % n == 0) {
    switch (e * 4 / n) {
      case 0: return {1.0, 0.0};
      case 1: return {0.0, -1.0};
      case 2: return {-1.0, 0.0};
      case 3: return {0.0, 1.0};
    }
  }
  const double angle = -2.0 * std::numbers::pi * static_cast<double>(e) / static_cast<double>(n);
  return {std::cos(angle), std::sin(angle)};
}

std::pair<ComplexSample, ComplexSample> butterfly2(ComplexSample a, ComplexSample b) {
  return {a + b, a - b};
}

std::vector<Rotator> classify_rotators(int radix_log2) {
  check_radix(radix_log2);
  // Radix-2^5 column pattern; lower radices use its tail with the constant
  // tables rescaled to the block size.
  static const RotatorKind kTail[5] = {RotatorKind::Constant, RotatorKind::Trivial,
                                       RotatorKind::Constant, RotatorKind::Trivial,
                                       RotatorKind::NonTrivial};
  std::vector<Rotator> out;
  out.reserve(static_cast<std::size_t>(radix_log2));
  for (int col = 0; col < radix_log2; ++col) {
    const RotatorKind kind = kTail[5 - radix_log2 + col];
    Rotator r{kind, 0};
    if (kind == RotatorKind::Constant) r.constant_base = 1 << radix_log2;
    out.push_back(r);
  }
  return out;
}

std::vector<bool> bypass_config(int radix_log2) {
  check_radix(radix_log2);
  std::vector<bool> active(5, false);
  for (int col = 5 - radix_log2; col < 5; ++col) active[static_cast<std::size_t>(col)] = true;
  return active;
}

ColumnRotation stage_twiddle_exponent(int radix_log2, int column, std::uint32_t kappa,
                                      std::uint32_t remainder, std::uint64_t subsize,
                                      std::uint64_t offset) {
  check_radix(radix_log2);
  const int k = radix_log2;
  if (column < 1 || column > k) throw ConfigError("butterfly column out of range");
  if (kappa >> column) throw ConfigError("kappa digit value out of range");
  if (k > column && (remainder >> (k - column))) {
    throw ConfigError("remainder digit value out of range");
  }
  if (column == k) {
    // Non-trivial rotator: the remaining subproblem twiddle.
    return {subsize, static_cast<std::int64_t>(kappa) * static_cast<std::int64_t>(offset)};
  }
  const auto bit = [](std::uint32_t v, int i) -> std::int64_t { return (v >> i) & 1; };
  // kappa bit (c-1) is the digit produced by column c; remainder bit (k-c-1)
  // is the next input digit.
  switch (k) {
    case 5:
      switch (column) {
        case 1: return {32, bit(kappa, 0) * static_cast<std::int64_t>(remainder)};
        case 2: return {4, bit(kappa, 1) * bit(remainder, 2)};
        case 3:
          return {32, 2 * (bit(kappa, 1) + 2 * bit(kappa, 2)) * static_cast<std::int64_t>(remainder)};
        case 4: return {4, bit(kappa, 3) * bit(remainder, 0)};
        default: break;
      }
      break;
    case 4:
      switch (column) {
        case 1: return {4, bit(kappa, 0) * bit(remainder, 2)};
        case 2:
          return {16, (bit(kappa, 0) + 2 * bit(kappa, 1)) * static_cast<std::int64_t>(remainder)};
        case 3: return {4, bit(kappa, 2) * bit(remainder, 0)};
        default: break;
      }
      break;
    case 3:
      switch (column) {
        case 1: return {8, bit(kappa, 0) * static_cast<std::int64_t>(remainder)};
        case 2: return {4, bit(kappa, 1) * bit(remainder, 0)};
        default: break;
      }
      break;
    case 2:
      return {4, bit(kappa, 0) * bit(remainder, 0)};  // column 1
    default:
      break;
  }
  throw ConfigError("no rotator defined for this column");
}

Block::Block(int radix_log2, std::vector<ComplexSample> values) : k_(radix_log2) {
  check_radix(radix_log2);
  if (values.size() != (std::size_t{1} << k_)) {
    throw ConfigError("block value count does not match radix");
  }
  values_ = std::move(values);
}

Block Block::zeros(int radix_log2) {
  check_radix(radix_log2);
  return Block(radix_log2, std::vector<ComplexSample>(std::size_t{1} << radix_log2));
}

Block mdc_process_block(const Block& input, const MdcConfig& config) {
  const int k = config.radix_log2;
  if (input.radix_log2() != k) throw ConfigError("block shape does not match configuration");
  if (config.subsize < (std::uint64_t{1} << k)) {
    throw ConfigError("subproblem size smaller than the block");
  }

  // Work array indexed by mixed digits: after column t, bits k-1..k-t hold
  // the produced frequency digits and bits k-t-1..0 the remaining input
  // digits.
  std::vector<ComplexSample> d = input.flat();
  const int size = 1 << k;
  for (int col = 1; col <= k; ++col) {
    const int b = k - col;
    for (int idx = 0; idx < size; ++idx) {
      if ((idx >> b) & 1) continue;
      const int lo = idx;
      const int hi = idx | (1 << b);
      const auto [sum, diff] = butterfly2(d[static_cast<std::size_t>(lo)], d[static_cast<std::size_t>(hi)]);
      d[static_cast<std::size_t>(lo)] = sum;
      d[static_cast<std::size_t>(hi)] = diff;
    }
    for (int idx = 0; idx < size; ++idx) {
      // Digits so far live at the top `col` bits with the first digit at the
      // MSB; ColumnRotation wants them LSB-first.
      std::uint32_t kappa = 0;
      for (int t = 0; t < col; ++t) kappa |= ((static_cast<std::uint32_t>(idx) >> (k - 1 - t)) & 1u) << t;
      const std::uint32_t rem = static_cast<std::uint32_t>(idx) & ((1u << b) - 1u);
      const ColumnRotation rot =
          stage_twiddle_exponent(k, col, kappa, rem, config.subsize, config.offset);
      if (rot.exponent % static_cast<std::int64_t>(rot.base) != 0) {
        d[static_cast<std::size_t>(idx)] *= twiddle(rot.base, rot.exponent);
      }
    }
  }

  // Reorder so flat position kappa carries frequency digit kappa.
  Block out = Block::zeros(k);
  for (int idx = 0; idx < size; ++idx) {
    std::uint32_t kappa = 0;
    for (int t = 0; t < k; ++t) kappa |= ((static_cast<std::uint32_t>(idx) >> (k - 1 - t)) & 1u) << t;
    out.flat()[kappa] = d[static_cast<std::size_t>(idx)];
  }
  return out;
}

std::uint32_t block_output_position(std::uint32_t kappa, int radix_log2) {
  check_radix(radix_log2);
  const int k = radix_log2;
  if (kappa >> k) throw ConfigError("kappa out of range");
  if (k == 1) return kappa;
  // Lane bit (top) = kappa bit 0; cycle MSB = kappa bit k-1; remaining cycle
  // bits = kappa bits k-2..1 shifted down.
  std::uint32_t q = (kappa & 1u) << (k - 1);
  q |= ((kappa >> (k - 1)) & 1u) << (k - 2);
  q |= (kappa >> 1) & ((1u << (k - 2)) - 1u);
  return q;
}

}  // namespace hfft
