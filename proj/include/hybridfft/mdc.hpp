#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "hybridfft/errors.hpp"

namespace hfft {

using ComplexSample = std::complex<double>;

/// Rotator category of one butterfly column.
enum class RotatorKind : std::uint8_t {
  Trivial,     // +-1, +-j
  Constant,    // fixed small table (W32 / W16 / W8 depending on radix)
  NonTrivial,  // full twiddle with respect to the remaining transform length
  None,        // bypassed column
};

struct Rotator {
  RotatorKind kind = RotatorKind::None;
  int constant_base = 0;  // table size for Constant rotators (8, 16 or 32)

  friend bool operator==(const Rotator&, const Rotator&) = default;
};

/// W_N^e = exp(-2*pi*i*e/N); e is reduced mod N.
ComplexSample twiddle(std::uint64_t n, std::int64_t exponent);

/// (a+b, a-b).
std::pair<ComplexSample, ComplexSample> butterfly2(ComplexSample a, ComplexSample b);

/// Rotator kinds per butterfly column for radix 2^k, 1 <= k <= 5.
std::vector<Rotator> classify_rotators(int radix_log2);

/// Physical-column activity for a 5-column unit computing radix 2^k:
/// the last k columns are active, the preceding ones transparent.
std::vector<bool> bypass_config(int radix_log2);

/// Rotation applied after butterfly column `column` (1-based) of a radix-2^k
/// pass: W_base^exponent.  `kappa` holds the frequency digits produced so far
/// (LSB-first, `column` bits); `remainder` holds the not-yet-consumed input
/// digits (radix_log2 - column bits, MSB = next digit).  The final column's
/// rotation is the non-trivial factor W_subsize^(kappa * offset).
struct ColumnRotation {
  std::uint64_t base = 1;
  std::int64_t exponent = 0;
};
ColumnRotation stage_twiddle_exponent(int radix_log2, int column, std::uint32_t kappa,
                                      std::uint32_t remainder, std::uint64_t subsize,
                                      std::uint64_t offset);

/// One 2 x 2^(k-1) group of samples streamed through an MDC unit.
/// Element (r, c) enters the unit on lane r at column-cycle c.
class Block {
 public:
  Block(int radix_log2, std::vector<ComplexSample> values);
  static Block zeros(int radix_log2);

  int radix_log2() const { return k_; }
  int columns() const { return 1 << (k_ - 1); }
  int size() const { return 1 << k_; }

  ComplexSample& at(int row, int col) { return values_[idx(row, col)]; }
  const ComplexSample& at(int row, int col) const { return values_[idx(row, col)]; }

  /// Flat view indexed by j = 2^(k-1)*row + col.
  std::vector<ComplexSample>& flat() { return values_; }
  const std::vector<ComplexSample>& flat() const { return values_; }

 private:
  std::size_t idx(int row, int col) const {
    return static_cast<std::size_t>(row * columns() + col);
  }
  int k_;
  std::vector<ComplexSample> values_;
};

struct MdcConfig {
  int radix_log2 = 5;        // k_s of this pass
  std::uint64_t subsize = 32;  // remaining transform length at this pass
  std::uint64_t offset = 0;    // index of this block inside its subproblem
};

/// Runs one block through the k butterfly columns with the rotators of the
/// modified radix-2^5 decomposition.  Output element for frequency digit
/// kappa is returned at flat position kappa (ascending digit order); the
/// streaming interleave to lane/cycle positions is block_output_position.
Block mdc_process_block(const Block& input, const MdcConfig& config);

/// Stream position (lane-bit << (k-1) | cycle offset) at which the output
/// with frequency digit kappa leaves the unit.
std::uint32_t block_output_position(std::uint32_t kappa, int radix_log2);

}  // namespace hfft
