#include "hybridfft/processor.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "hybridfft/oracle.hpp"

namespace hfft {

std::string to_string(Mode mode) { return mode == Mode::Pipeline ? "pipeline" : "memory"; }

Mode mode_from_string(const std::string& name) {
  if (name == "pipeline") return Mode::Pipeline;
  if (name == "memory" || name == "memory-based") return Mode::Memory;
  throw ConfigError("unknown mode: " + name);
}

namespace {

int log2_size(std::uint64_t n_samples) {
  if (n_samples < 2 || (n_samples & (n_samples - 1)) != 0) {
    throw ConfigError("transform size must be a power of two >= 2");
  }
  return std::countr_zero(n_samples);
}

constexpr std::uint64_t kMaxSamples = std::uint64_t{1} << 19;

void validate_basic(const PlanConfig& c) {
  log2_size(c.n_samples);
  if (c.n_samples > kMaxSamples) throw ConfigError("transform size exceeds 512K");
  if (c.radix_log2 < 1 || c.radix_log2 > 5) throw ConfigError("radix exponent must be in [1,5]");
  if (c.parallelism != 1 && c.parallelism != 2 && c.parallelism != 4) {
    throw ConfigError("parallelism must be 1, 2 or 4");
  }
}

void validate_for_run(const PlanConfig& c) {
  validate_basic(c);
  const int n = log2_size(c.n_samples);
  const int k = c.radix_log2;
  const int lp = std::countr_zero(static_cast<std::uint64_t>(c.parallelism));
  for (int ks : stage_radices(c.n_samples, k)) {
    if (n < ks + lp) {
      throw ConfigError("parallelism too high: a radix-2^" + std::to_string(ks) +
                        " stage needs at least 2^" + std::to_string(ks + lp) + " samples");
    }
  }
  if (c.mode == Mode::Memory) {
    if (n <= k || n > 3 * k) {
      throw ConfigError("memory-based mode supports 2^k < N <= 2^(3k)");
    }
    if (n <= 2 * k && !c.allow_short_inplace) {
      throw ConfigError("N <= 2^(2k) in-place runs are gated; enable the short in-place range");
    }
  }
}

}  // namespace

std::vector<int> stage_radices(std::uint64_t n_samples, int radix_log2) {
  const int n = log2_size(n_samples);
  if (radix_log2 < 1 || radix_log2 > 5) throw ConfigError("radix exponent must be in [1,5]");
  const int k = radix_log2;
  const int stages = (n + k - 1) / k;
  std::vector<int> out(static_cast<std::size_t>(stages), k);
  out[0] = n - k * (stages - 1);
  return out;
}

std::uint64_t stage_stride(std::uint64_t n_samples, int stage, const std::vector<int>& radices) {
  if (stage < 0 || stage > static_cast<int>(radices.size())) {
    throw ConfigError("stage index out of range");
  }
  int sum = 0;
  for (int s = 0; s < stage; ++s) sum += radices[static_cast<std::size_t>(s)];
  return n_samples >> sum;
}

std::vector<std::uint64_t> block_leading_indices(std::uint64_t n_samples, int stage,
                                                 const std::vector<int>& radices) {
  const int stages = static_cast<int>(radices.size());
  if (stage < 1 || stage > stages) throw ConfigError("stage index out of range");
  const int ks = radices[static_cast<std::size_t>(stage - 1)];
  std::vector<std::uint64_t> out;
  out.reserve(n_samples >> ks);
  if (stage != stages) {
    const std::uint64_t eps_prev = stage_stride(n_samples, stage - 1, radices);
    const std::uint64_t eps = stage_stride(n_samples, stage, radices);
    for (std::uint64_t v = 0; v < n_samples / eps_prev; ++v) {
      for (std::uint64_t o = 0; o < eps; ++o) out.push_back(v * eps_prev + o);
    }
  } else {
    for (std::uint64_t m = 0; m < n_samples; m += std::uint64_t{1} << ks) out.push_back(m);
  }
  return out;
}

std::vector<std::uint64_t> build_block(std::uint64_t n_samples, int stage,
                                       const std::vector<int>& radices, std::uint64_t m) {
  const int ks = radices[static_cast<std::size_t>(stage - 1)];
  const std::uint64_t eps = stage_stride(n_samples, stage, radices);
  std::vector<std::uint64_t> out(std::size_t{1} << ks);
  for (std::uint64_t j = 0; j < out.size(); ++j) {
    const std::uint64_t index = m + eps * j;
    if (index >= n_samples) throw ConfigError("block index exceeds the transform length");
    out[j] = index;
  }
  return out;
}

std::vector<std::uint64_t> block_output_indices(std::uint64_t n_samples, int stage,
                                                const std::vector<int>& radices, std::uint64_t m) {
  const int ks = radices[static_cast<std::size_t>(stage - 1)];
  const std::vector<std::uint64_t> in = build_block(n_samples, stage, radices, m);
  std::vector<std::uint64_t> out(in.size());
  for (std::uint32_t j = 0; j < in.size(); ++j) {
    out[block_output_position(j, ks)] = in[j];
  }
  return out;
}

namespace {

/// label bit -> source axis rewrite applied by the in-unit output interleave.
BitPermutation apply_block_output_rewrite(const BitPermutation& layout_in, int e, int ks,
                                          const IndexLayout& lay) {
  std::vector<std::uint8_t> map = layout_in.map();
  const auto src_axis = [&](int j) -> int {
    if (j == 0) return lay.lane_axis();
    if (j == ks - 1) return ks - 2;
    return j - 1;
  };
  for (int j = 0; j < ks; ++j) {
    map[static_cast<std::size_t>(e + j)] = static_cast<std::uint8_t>(src_axis(j));
  }
  return BitPermutation(std::move(map));
}

std::vector<SlotCondition> stage_conditions(int e, int ks, const IndexLayout& lay) {
  std::vector<SlotCondition> cond;
  for (int i = 0; i + 1 < ks; ++i) cond.push_back({e + i, i});
  cond.push_back({e + ks - 1, lay.lane_axis()});
  return cond;
}

bool conditions_hold(const BitPermutation& layout, const std::vector<SlotCondition>& cond) {
  for (const SlotCondition& c : cond) {
    if (layout.source_of(c.slot) != c.axis) return false;
  }
  return true;
}

/// Frequency digits sit in the flat label in descending stride fields; this
/// permutation maps a label to its true frequency index.
BitPermutation digit_reversal(int n, const std::vector<int>& radices) {
  std::vector<std::uint8_t> map(static_cast<std::size_t>(n));
  int consumed = 0;
  for (int ks : radices) {
    // label bits [n - consumed - ks, n - consumed) -> frequency bits
    // [consumed, consumed + ks), order preserved inside the field
    for (int i = 0; i < ks; ++i) {
      map[static_cast<std::size_t>(consumed + i)] =
          static_cast<std::uint8_t>(n - consumed - ks + i);
    }
    consumed += ks;
  }
  return BitPermutation(std::move(map));
}

struct StageChain {
  BitPermutation write_ext;  // inverse write perm, extended to position domain
  BitPermutation read_ext;
  BitPermutation lane_rev;
};

int relabel(const StageChain& chain, int axis) {
  return chain.lane_rev.source_of(
      chain.read_ext.source_of(chain.write_ext.source_of(axis)));
}

}  // namespace

StagePlan plan(const PlanConfig& config) {
  validate_for_run(config);
  const std::uint64_t N = config.n_samples;
  const int n = log2_size(N);
  const int k = config.radix_log2;
  const int P = config.parallelism;
  const int p = std::countr_zero(static_cast<std::uint64_t>(2 * P));

  StagePlan out;
  out.config = config;
  out.n = n;
  out.radices = stage_radices(N, k);
  out.stages = static_cast<int>(out.radices.size());
  out.layout = IndexLayout(n, p);
  out.sample_lanes = config.mode == Mode::Pipeline ? 2 * P : P;
  out.cycles_model = static_cast<std::uint64_t>(out.stages) *
                     (N / static_cast<std::uint64_t>(out.sample_lanes));

  const IndexLayout& lay = out.layout;
  const BitPermutation lane_rev = lane_reversal(lay);
  const int serial = lay.serial();
  const BitPermutation serial_id = BitPermutation::identity(std::max(serial, 1));

  auto rho = [&](int stage) {
    return config.mode == Mode::Pipeline ? serial_reversal(N, stage, k, P)
                                         : inplace_serial_reversal(N, stage, k, P);
  };

  BitPermutation mem_layout = BitPermutation::identity(n);
  CounterSchedule prev_schedule{0, serial_id, serial_id};
  int consumed = 0;

  for (int s = 1; s <= out.stages; ++s) {
    StageStep st;
    st.stage = s;
    st.radix_log2 = out.radices[static_cast<std::size_t>(s - 1)];
    st.subsize = N >> consumed;
    st.stride = st.subsize >> st.radix_log2;
    if (config.mode == Mode::Pipeline) {
      // Each stage boundary has its own bank pair; a single batch always
      // sees that pair's first schedule.
      st.w = reversal_width(N, s, k, P);
      st.schedule = first_schedule(rho(s));
      st.schedule.batch = s;
    } else {
      const InplaceWidths ws = inplace_reversal_widths(N, s, k, P);
      st.w = ws.w;
      st.w_tilde = ws.w_tilde;
      // In-place handover: the stage pattern composed with the inherited
      // write permutation makes the read counter come out as rho(s).
      st.schedule = s == 1 ? first_schedule(rho(1))
                           : next_schedule(prev_schedule,
                                           compose(rho(s), prev_schedule.read_perm));
    }

    BitPermutation cur = compose(mem_layout, extend_serial(st.schedule.read_perm, lay));
    cur = compose(cur, lane_rev);

    const int e = std::countr_zero(st.stride);
    const std::vector<SlotCondition> hard = stage_conditions(e, st.radix_log2, lay);
    st.reshuffle = emit_swap_sequence(cur, hard, lay);
    if (!conditions_hold(cur, hard)) {
      throw InternalError("stage plan failed to reach a valid unit input order");
    }

    // In-place runs can leave one stage a serial rearrangement the reshuffle
    // budget cannot absorb; spending spare exchanges here on the next
    // stage's requirements keeps each stage within the six-circuit budget.
    if (config.mode == Mode::Memory && s < out.stages) {
      const int ks_next = out.radices[static_cast<std::size_t>(s)];
      const std::uint64_t stride_next = st.stride >> ks_next;
      const std::vector<SlotCondition> next_hard =
          stage_conditions(std::countr_zero(stride_next), ks_next, lay);
      const StageChain chain{extend_serial(inverse(st.schedule.read_perm), lay),
                             extend_serial(rho(s + 1), lay), lane_rev};

      auto predict = [&](const BitPermutation& candidate) {
        BitPermutation next = apply_block_output_rewrite(candidate, e, st.radix_log2, lay);
        std::vector<std::uint8_t> map = next.map();
        for (std::uint8_t& v : map) v = static_cast<std::uint8_t>(relabel(chain, v));
        BitPermutation next_in{std::move(map)};
        return emit_swap_sequence(next_in, next_hard, lay).size();
      };

      std::size_t next_cost = predict(cur);
      for (const SlotCondition& nc : next_hard) {
        if (next_cost <= 6) break;
        if (nc.slot >= e) continue;  // inside this stage's output field
        // Pull the requirement back through the write/read/branch chain.
        int want = nc.axis;
        for (int axis = 0; axis < lay.bits; ++axis) {
          if (relabel(chain, axis) == nc.axis) {
            want = axis;
            break;
          }
        }
        if (cur.source_of(nc.slot) == want) continue;
        BitPermutation trial = cur;
        const std::vector<SwapStep> fix = emit_swap_sequence(trial, {{nc.slot, want}}, lay);
        if (st.reshuffle.size() + fix.size() > 6) continue;
        if (!conditions_hold(trial, hard)) continue;
        const std::size_t new_cost = predict(trial);
        if (new_cost >= next_cost) continue;
        cur = trial;
        st.reshuffle.insert(st.reshuffle.end(), fix.begin(), fix.end());
        next_cost = new_cost;
      }
    }
    if (st.reshuffle.size() > 6) out.reshuffle_over_budget = true;

    st.layout_in = cur;
    st.layout_out = apply_block_output_rewrite(cur, e, st.radix_log2, lay);

    const BitPermutation write_pattern =
        config.mode == Mode::Pipeline ? serial_id : st.schedule.read_perm;
    mem_layout = compose(st.layout_out, extend_serial(inverse(write_pattern), lay));
    prev_schedule = st.schedule;

    st.fill_latency = (std::uint64_t{1} << (st.radix_log2 - 1)) + (p > 1 ? 1 : 0);
    for (const SwapStep& step : st.reshuffle) st.fill_latency += step.l;

    out.steps.push_back(std::move(st));
    consumed += out.radices[static_cast<std::size_t>(s - 1)];
  }

  out.final_layout = mem_layout;
  out.output_perm = inverse(compose(digit_reversal(n, out.radices), mem_layout));
  return out;
}

RunResult run(const PlanConfig& config, const std::vector<ComplexSample>& input) {
  const StagePlan pl = plan(config);
  const std::uint64_t N = config.n_samples;
  if (input.size() != N) throw ConfigError("input length does not match the configured size");
  const int lanes = 2 * config.parallelism;
  const int serial = pl.layout.serial();
  const std::uint64_t ticks = N >> pl.layout.parallel;
  const bool pipeline = config.mode == Mode::Pipeline;

  const std::uint64_t depth = pipeline ? std::max<std::uint64_t>(N / 2, 1) : ticks;
  std::vector<BankArray> arrays;
  arrays.emplace_back(lanes, depth);
  if (pipeline) arrays.emplace_back(lanes, depth);

  RunResult result;
  AccessTrace& trace = result.trace;
  const auto global_bank = [&](std::size_t array, int b) {
    return static_cast<int>(array) * lanes + b;
  };

  // Natural-order load: bank q holds indices q*N/2P .. (q+1)*N/2P - 1.
  for (std::uint64_t t = 0; t < ticks; ++t) {
    for (int b = 0; b < lanes; ++b) {
      arrays[0].write(b, t, input[(static_cast<std::uint64_t>(b) << serial) | t]);
      trace.push_back({t, 'W', global_bank(0, b), t, 0});
    }
  }

  std::size_t cur = 0;
  std::uint64_t cycle = ticks;
  std::uint64_t cycles_observed = 0;
  std::vector<ComplexSample> stream(N), shuffled(N);

  for (const StageStep& st : pl.steps) {
    const std::size_t dst = pipeline ? cur ^ 1 : cur;
    for (std::uint64_t t = 0; t < ticks; ++t) {
      const std::uint64_t addr = st.schedule.read_perm.apply(t);
      for (int b = 0; b < lanes; ++b) {
        stream[(static_cast<std::uint64_t>(b) << serial) | t] = arrays[cur].read(b, addr);
        trace.push_back({cycle + t, 'R', global_bank(cur, b), addr, st.stage});
      }
    }

    BitPermutation movement = lane_reversal(pl.layout);
    for (const SwapStep& step : st.reshuffle) {
      movement = compose(lane_serial_swap(pl.layout, step), movement);
    }
    for (std::uint64_t pos = 0; pos < N; ++pos) shuffled[movement.apply(pos)] = stream[pos];

    const int ks = st.radix_log2;
    const std::uint64_t cols = std::uint64_t{1} << (ks - 1);
    const std::uint64_t slots = ticks / cols;
    std::vector<ComplexSample> block_values(std::uint64_t{1} << ks);
    for (int unit = 0; unit < config.parallelism; ++unit) {
      for (std::uint64_t slot = 0; slot < slots; ++slot) {
        const std::uint64_t base = slot * cols;
        for (int r = 0; r < 2; ++r) {
          const std::uint64_t lane = static_cast<std::uint64_t>(2 * unit + r) << serial;
          for (std::uint64_t c = 0; c < cols; ++c) {
            block_values[cols * static_cast<std::uint64_t>(r) + c] = shuffled[lane | (base + c)];
          }
        }
        const std::uint64_t lead =
            st.layout_in.apply((static_cast<std::uint64_t>(2 * unit) << serial) | base);
        const MdcConfig mdc_cfg{ks, st.subsize, lead % st.subsize};
        const Block processed = mdc_process_block(Block(ks, block_values), mdc_cfg);
        for (std::uint32_t kappa = 0; kappa < (1u << ks); ++kappa) {
          const std::uint32_t q = block_output_position(kappa, ks);
          const std::uint64_t lane = static_cast<std::uint64_t>(2 * unit + (q >> (ks - 1)))
                                     << serial;
          stream[lane | (base + (q & (cols - 1)))] = processed.flat()[kappa];
        }
      }
    }

    for (const ComplexSample& v : stream) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw InternalError("non-finite sample at stage " + std::to_string(st.stage));
      }
    }

    const BitPermutation& write_perm =
        pipeline ? BitPermutation::identity(std::max(serial, 1)) : st.schedule.read_perm;
    for (std::uint64_t t = 0; t < ticks; ++t) {
      const std::uint64_t addr = write_perm.apply(t);
      for (int b = 0; b < lanes; ++b) {
        arrays[dst].write(b, addr, stream[(static_cast<std::uint64_t>(b) << serial) | t]);
        trace.push_back({cycle + t, 'W', global_bank(dst, b), addr, st.stage});
      }
    }

    cycle += ticks;
    cycles_observed += ticks * (pipeline ? 1 : 2) + st.fill_latency;
    cur = dst;
  }

  result.raw_output.resize(N);
  for (std::uint64_t t = 0; t < ticks; ++t) {
    for (int b = 0; b < lanes; ++b) {
      result.raw_output[(static_cast<std::uint64_t>(b) << serial) | t] = arrays[cur].read(b, t);
    }
  }

  const ConflictReport audit =
      audit_conflicts(trace, static_cast<int>(arrays.size()) * lanes, depth);
  if (audit.conflicts != 0) {
    const AccessEvent& ev = *audit.first_offender;
    throw InternalError("bank conflict: op=" + std::string(1, ev.op) + " bank=" +
                        std::to_string(ev.bank) + " address=" + std::to_string(ev.address) +
                        " batch=" + std::to_string(ev.batch) + " cycle=" +
                        std::to_string(ev.cycle));
  }

  result.unscrambled.resize(N);
  for (std::uint64_t f = 0; f < N; ++f) {
    result.unscrambled[f] = result.raw_output[pl.output_perm.apply(f)];
  }
  const std::vector<ComplexSample> reference = fft_radix2(input);
  double max_err = 0.0;
  for (std::uint64_t f = 0; f < N; ++f) {
    max_err = std::max(max_err, std::abs(result.unscrambled[f] - reference[f]));
  }

  const Metrics m = metrics(config);
  SimReport& rep = result.report;
  rep.n_samples = N;
  rep.radix_log2 = config.radix_log2;
  rep.mode = config.mode;
  rep.parallelism = config.parallelism;
  rep.stages = pl.stages;
  rep.radices = pl.radices;
  rep.iterations = m.iterations;
  rep.cycles_model = pl.cycles_model;
  rep.cycles_observed = cycles_observed;
  rep.conflicts = audit.conflicts;
  rep.utilization = m.utilization;
  rep.max_abs_error = max_err;
  rep.output_permutation = pl.output_perm.map();
  return result;
}

Metrics metrics(const PlanConfig& config) {
  validate_basic(config);
  const int n = log2_size(config.n_samples);
  const int k = config.radix_log2;
  const int stages = (n + k - 1) / k;
  Metrics m;
  m.iterations = stages;
  m.sample_lanes = config.mode == Mode::Pipeline ? 2 * config.parallelism : config.parallelism;
  m.cycles_model = (static_cast<std::uint64_t>(stages) * config.n_samples) /
                   static_cast<std::uint64_t>(m.sample_lanes);
  // Provisioned: four units of five butterflies; a P-way setup keeps P batch
  // paths of n active butterflies in flight.  In-place mode reuses one set
  // of units across its iterations.
  const double active = static_cast<double>(config.parallelism) * static_cast<double>(n);
  m.utilization = config.mode == Mode::Pipeline ? active / 20.0
                                                : active / (20.0 * static_cast<double>(stages));
  return m;
}

std::vector<std::vector<SwapStep>> stage1_reshuffle_table(int radix_log2, int parallelism) {
  if (radix_log2 < 2 || radix_log2 > 5) throw ConfigError("table radix exponent must be in [2,5]");
  const int lp = std::countr_zero(static_cast<std::uint64_t>(parallelism));
  std::vector<std::vector<SwapStep>> rows;
  for (int residue = 0; residue < radix_log2; ++residue) {
    int n = residue;
    while (n <= radix_log2 || n < radix_log2 + lp || n % radix_log2 != residue) ++n;
    if (n > 19) throw ConfigError("no supported size for this residue");
    PlanConfig cfg;
    cfg.n_samples = std::uint64_t{1} << n;
    cfg.radix_log2 = radix_log2;
    cfg.parallelism = parallelism;
    cfg.mode = Mode::Pipeline;
    rows.push_back(plan(cfg).steps.front().reshuffle);
  }
  return rows;
}

}  // namespace hfft
