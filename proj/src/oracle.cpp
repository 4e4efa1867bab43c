#include "hybridfft/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

namespace hfft {

std::vector<ComplexSample> dft_direct(const std::vector<ComplexSample>& x) {
  const std::size_t n = x.size();
  if (n == 0) throw ConfigError("empty input");
  std::vector<ComplexSample> out(n);
  const double step = -2.0 * std::numbers::pi / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    ComplexSample acc{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      const double angle = step * static_cast<double>((i * k) % n);
      acc += x[i] * ComplexSample{std::cos(angle), std::sin(angle)};
    }
    out[k] = acc;
  }
  return out;
}

std::vector<ComplexSample> fft_radix2(const std::vector<ComplexSample>& x) {
  const std::size_t n = x.size();
  if (n == 0 || (n & (n - 1)) != 0) throw ConfigError("length must be a power of two");
  std::vector<ComplexSample> a(x);
  // Bit-reversal reorder.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  // Twiddles computed directly per index; a running-product recurrence loses
  // too much phase accuracy at the large sizes this oracle certifies.
  std::vector<ComplexSample> table(n / 2);
  const double step = -2.0 * std::numbers::pi / static_cast<double>(n);
  for (std::size_t j = 0; j < table.size(); ++j) {
    const double angle = step * static_cast<double>(j);
    table[j] = {std::cos(angle), std::sin(angle)};
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t j = 0; j < len / 2; ++j) {
        const ComplexSample u = a[i + j];
        const ComplexSample v = a[i + j + len / 2] * table[j * stride];
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
      }
    }
  }
  return a;
}

std::optional<BitPermutation> recover_output_order(const std::vector<ComplexSample>& simulated,
                                                   const std::vector<ComplexSample>& reference,
                                                   double tolerance) {
  const std::size_t n = reference.size();
  if (simulated.size() != n || n == 0 || (n & (n - 1)) != 0) {
    throw ConfigError("order recovery needs two power-of-two streams of equal length");
  }
  double scale = 1.0;
  for (const ComplexSample& v : reference) scale = std::max(scale, std::abs(v));
  const double tol = tolerance * scale;

  using Tagged = std::pair<ComplexSample, std::size_t>;
  auto by_value = [](const Tagged& a, const Tagged& b) {
    if (a.first.real() != b.first.real()) return a.first.real() < b.first.real();
    return a.first.imag() < b.first.imag();
  };
  std::vector<Tagged> ref(n), sim(n);
  for (std::size_t i = 0; i < n; ++i) {
    ref[i] = {reference[i], i};
    sim[i] = {simulated[i], i};
  }
  std::sort(ref.begin(), ref.end(), by_value);
  std::sort(sim.begin(), sim.end(), by_value);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(ref[i].first - ref[i + 1].first) <= 2 * tol) {
      throw ConfigError("ambiguous reference values, use a new probe input");
    }
  }
  std::vector<std::size_t> position(n);  // position[i] = where reference[i] sits in simulated
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(ref[i].first - sim[i].first) > tol) return std::nullopt;
    position[ref[i].second] = sim[i].second;
  }

  const int bits = std::countr_zero(n);
  if (position[0] != 0) return std::nullopt;
  std::vector<std::uint8_t> map(static_cast<std::size_t>(bits), 0);
  std::uint64_t seen = 0;
  for (int b = 0; b < bits; ++b) {
    const std::size_t img = position[std::size_t{1} << b];
    if (img == 0 || (img & (img - 1)) != 0) return std::nullopt;
    const int c = std::countr_zero(img);
    if ((seen >> c) & 1) return std::nullopt;
    seen |= std::uint64_t{1} << c;
    map[static_cast<std::size_t>(c)] = static_cast<std::uint8_t>(b);
  }
  BitPermutation perm(std::move(map));
  for (std::size_t i = 0; i < n; ++i) {
    if (perm.apply(i) != position[i]) return std::nullopt;
  }
  return perm;
}

namespace {

bool is_parallel_axis(int axis, const IndexLayout& lay) { return axis >= lay.lane_axis(); }

SwapStep step_for(int parallel_axis, int serial_axis, const IndexLayout& lay) {
  return SwapStep{1u << (parallel_axis - lay.lane_axis()), 1u << serial_axis};
}

void exchange_values(BitPermutation& layout, int a, int b) {
  std::vector<std::uint8_t> map = layout.map();
  for (std::uint8_t& v : map) {
    if (v == a) v = static_cast<std::uint8_t>(b);
    else if (v == b) v = static_cast<std::uint8_t>(a);
  }
  layout = BitPermutation(std::move(map));
}

}  // namespace

std::vector<SwapStep> emit_swap_sequence(BitPermutation& layout,
                                         std::vector<SlotCondition> conditions,
                                         const IndexLayout& lay) {
  if (layout.bits() != lay.bits) throw ConfigError("layout width mismatch");
  std::sort(conditions.begin(), conditions.end(),
            [](const SlotCondition& a, const SlotCondition& b) { return a.slot < b.slot; });
  std::vector<SwapStep> seq;
  const int center = lay.lane_axis();

  auto apply = [&](int parallel_axis, int serial_axis) {
    seq.push_back(step_for(parallel_axis, serial_axis, lay));
    exchange_values(layout, parallel_axis, serial_axis);
  };

  for (int guard = 0; guard < 4 * static_cast<int>(conditions.size()) + 4; ++guard) {
    // Single-exchange fixes first: a condition slot holding a parallel axis
    // while needing a serial one (or the reverse).
    const SlotCondition* direct = nullptr;
    const SlotCondition* pp = nullptr;
    const SlotCondition* conj = nullptr;
    for (const SlotCondition& c : conditions) {
      const int have = layout.source_of(c.slot);
      if (have == c.axis) continue;
      const bool have_par = is_parallel_axis(have, lay);
      const bool need_par = is_parallel_axis(c.axis, lay);
      if (have_par && !need_par) {
        if (!direct) direct = &c;
      } else if (need_par && !have_par) {
        if (!direct) direct = &c;  // swap(needed parallel, held serial) also lands in one step
      } else if (need_par && have_par) {
        if (!pp) pp = &c;
      } else if (!conj) {
        conj = &c;
      }
    }
    if (direct) {
      const int have = layout.source_of(direct->slot);
      if (is_parallel_axis(have, lay)) {
        apply(have, direct->axis);
      } else {
        apply(direct->axis, have);
      }
      continue;
    }
    if (pp) {
      // Both held and needed axes are parallel: route through a spare serial
      // axis that no condition pins and that sits outside the condition slots.
      int spare = -1;
      for (int axis = 0; axis < lay.serial() && spare < 0; ++axis) {
        bool usable = true;
        for (const SlotCondition& c : conditions) {
          usable = usable && c.axis != axis && layout.source_of(c.slot) != axis;
        }
        if (usable) spare = axis;
      }
      if (spare < 0) throw InternalError("no spare serial axis for parallel exchange");
      apply(layout.source_of(pp->slot), spare);
      apply(pp->axis, spare);
      continue;
    }
    if (conj) {
      const int held = layout.source_of(conj->slot);
      apply(center, held);
      apply(center, conj->axis);
      apply(center, held);
      continue;
    }
    return seq;  // all conditions satisfied
  }
  throw InternalError("reshuffle emission did not converge");
}

namespace {

// Depth-limited search for a swap sequence turning `state` into `target`.
// Each exchanged pair changes exactly two map entries, so half the mismatch
// count is an admissible remaining-depth bound.
bool dfs_swaps(BitPermutation& state, const BitPermutation& target, const IndexLayout& lay,
               int depth_left, int last_p, int last_s, std::vector<SwapStep>* out) {
  int mismatches = 0;
  for (int i = 0; i < state.bits(); ++i) {
    if (state.source_of(i) != target.source_of(i)) ++mismatches;
  }
  if (mismatches == 0) return true;
  if ((mismatches + 1) / 2 > depth_left) return false;
  for (int pa = lay.lane_axis(); pa < lay.bits; ++pa) {
    for (int sa = 0; sa < lay.serial(); ++sa) {
      if (pa == last_p && sa == last_s) continue;  // undoing the previous step is never shortest
      exchange_values(state, pa, sa);
      if (out) out->push_back(step_for(pa, sa, lay));
      if (dfs_swaps(state, target, lay, depth_left - 1, pa, sa, out)) return true;
      if (out) out->pop_back();
      exchange_values(state, pa, sa);
    }
  }
  return false;
}

}  // namespace

std::optional<int> min_swap_length(const BitPermutation& target, const IndexLayout& lay,
                                   int limit) {
  for (int depth = 0; depth <= limit; ++depth) {
    BitPermutation state = BitPermutation::identity(lay.bits);
    if (dfs_swaps(state, target, lay, depth, -1, -1, nullptr)) return depth;
  }
  return std::nullopt;
}

std::optional<std::vector<SwapStep>> search_swap_sequence(
    const std::vector<std::uint64_t>& from_order, const std::vector<std::uint64_t>& to_order,
    int parallelism, int max_steps) {
  const std::size_t n = from_order.size();
  if (n == 0 || (n & (n - 1)) != 0 || to_order.size() != n) {
    throw ConfigError("swap search needs two power-of-two streams of equal length");
  }
  const int bits = std::countr_zero(n);
  const IndexLayout lay(bits, std::countr_zero(static_cast<std::uint64_t>(2 * parallelism)));

  // g moves stream positions: to_order[g(pos)] == from_order[pos].
  std::vector<std::int64_t> where(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (to_order[i] >= n || where[to_order[i]] >= 0) {
      throw ConfigError("streams must enumerate the same index set exactly once");
    }
    where[to_order[i]] = static_cast<std::int64_t>(i);
  }
  std::vector<std::uint64_t> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (from_order[i] >= n || where[from_order[i]] < 0) {
      throw ConfigError("streams must enumerate the same index set exactly once");
    }
    g[i] = static_cast<std::uint64_t>(where[from_order[i]]);
  }

  // Extract g as a bit-dimension permutation; bail out if it is not one.
  if (g[0] != 0) return std::nullopt;
  std::vector<std::uint8_t> map(static_cast<std::size_t>(bits));
  std::uint64_t seen = 0;
  for (int b = 0; b < bits; ++b) {
    const std::uint64_t img = g[std::size_t{1} << b];
    if (img == 0 || (img & (img - 1)) != 0) return std::nullopt;
    const int c = std::countr_zero(img);
    if ((seen >> c) & 1) return std::nullopt;
    seen |= std::uint64_t{1} << c;
    map[static_cast<std::size_t>(c)] = static_cast<std::uint8_t>(b);
  }
  BitPermutation movement(std::move(map));
  for (std::size_t i = 0; i < n; ++i) {
    if (movement.apply(i) != g[i]) return std::nullopt;
  }

  // A sequence s1..sm applied as stream movements composes to sm o ... o s1;
  // its effect on the identity label<-axis map is inverse(g).
  const BitPermutation target = inverse(movement);
  std::optional<int> best;
  for (int depth = 0; depth <= max_steps; ++depth) {
    BitPermutation state = BitPermutation::identity(lay.bits);
    if (dfs_swaps(state, target, lay, depth, -1, -1, nullptr)) {
      best = depth;
      break;
    }
  }
  if (!best) return std::nullopt;

  // Prefer the canonical emission when it achieves the minimum.  Emission
  // runs in the scrambled-layout-to-natural-conditions frame so its exchange
  // order matches the planner's.
  BitPermutation scratch = inverse(target);
  std::vector<SlotCondition> conditions;
  for (int i = 0; i < lay.bits; ++i) {
    conditions.push_back({i, i});
  }
  std::vector<SwapStep> canonical = emit_swap_sequence(scratch, conditions, lay);
  if (static_cast<int>(canonical.size()) == *best) return canonical;

  std::vector<SwapStep> found;
  BitPermutation state = BitPermutation::identity(lay.bits);
  if (!dfs_swaps(state, target, lay, *best, -1, -1, &found)) {
    throw InternalError("swap search lost a previously found solution");
  }
  return found;
}

}  // namespace hfft
