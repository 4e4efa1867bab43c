#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "hybridfft/bitperm.hpp"
#include "hybridfft/mdc.hpp"

namespace hfft {

/// O(N^2) DFT by definition: X(k) = sum x(n) exp(-2*pi*i*n*k/N).
std::vector<ComplexSample> dft_direct(const std::vector<ComplexSample>& x);

/// Recursive radix-2 FFT, power-of-two lengths only.
std::vector<ComplexSample> fft_radix2(const std::vector<ComplexSample>& x);

/// Finds the bit-dimension permutation pi with simulated[pi.apply(i)] ~= reference[i]
/// for all i.  Requires reference entries to be pairwise distinct beyond the
/// tolerance; returns nullopt when no bit-dimension permutation fits.
/// Throws ConfigError("ambiguous...") when the reference has duplicates.
std::optional<BitPermutation> recover_output_order(const std::vector<ComplexSample>& simulated,
                                                   const std::vector<ComplexSample>& reference,
                                                   double tolerance = 1e-9);

/// Requirement on a stream layout: destination label bit `slot` must be fed
/// by position axis `axis`.
struct SlotCondition {
  int slot;
  int axis;
};

/// Emits the canonical reshuffle sequence driving `layout` (label <- axis
/// map, modified in place) to satisfy all conditions.  Order of emission:
/// condition slots currently holding a parallel axis are fixed first with a
/// single exchange (ascending slot), then remaining slots via three-exchange
/// conjugation through the lowest parallel axis.
std::vector<SwapStep> emit_swap_sequence(BitPermutation& layout,
                                         std::vector<SlotCondition> conditions,
                                         const IndexLayout& index_layout);

/// Shortest sequence of lane/serial exchanges transforming the stream
/// `from_order` into `to_order` (both are index streams over the same
/// multiset).  Ties resolve to the canonical emission order above.  Returns
/// nullopt when no sequence of at most max_steps exists or when the two
/// streams do not differ by a bit-dimension permutation.
std::optional<std::vector<SwapStep>> search_swap_sequence(
    const std::vector<std::uint64_t>& from_order, const std::vector<std::uint64_t>& to_order,
    int parallelism, int max_steps = 6);

/// Length of the shortest exchange sequence realizing exactly the position
/// permutation `target` (identity-to-target), by iterative deepening.  Used
/// to validate the canonical emitter.  `limit` bounds the search.
std::optional<int> min_swap_length(const BitPermutation& target, const IndexLayout& layout,
                                   int limit = 6);

}  // namespace hfft
