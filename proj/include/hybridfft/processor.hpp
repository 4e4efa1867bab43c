#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hybridfft/banks.hpp"
#include "hybridfft/bitperm.hpp"
#include "hybridfft/mdc.hpp"

namespace hfft {

enum class Mode : std::uint8_t { Pipeline, Memory };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& name);

struct PlanConfig {
  std::uint64_t n_samples = 0;
  int radix_log2 = 5;
  int parallelism = 1;
  Mode mode = Mode::Pipeline;
  /// Admits in-place runs for 2^k < N <= 2^(2k); the default in-place range
  /// is 2^(2k) < N <= 2^(3k).
  bool allow_short_inplace = false;
};

/// Per-stage radix exponents: S = ceil(n/k) stages, k_1 = n - k*(S-1),
/// the rest equal to k.
std::vector<int> stage_radices(std::uint64_t n_samples, int radix_log2);

/// Stride unit eps_s = N / 2^(k_1 + ... + k_s); eps_0 = N.
std::uint64_t stage_stride(std::uint64_t n_samples, int stage, const std::vector<int>& radices);

/// Leading sample indices of the butterfly blocks of stage s, in enumeration
/// order.
std::vector<std::uint64_t> block_leading_indices(std::uint64_t n_samples, int stage,
                                                 const std::vector<int>& radices);

/// Sample indices of one input block, 2 x 2^(k_s-1), flat j = 2^(k_s-1)*r + c:
/// index(j) = m + eps_s * j.
std::vector<std::uint64_t> build_block(std::uint64_t n_samples, int stage,
                                       const std::vector<int>& radices, std::uint64_t m);

/// Sample indices of the same block as they leave the unit, indexed by the
/// output stream position q = (lane << (k_s-1)) | cycle.
std::vector<std::uint64_t> block_output_indices(std::uint64_t n_samples, int stage,
                                                const std::vector<int>& radices, std::uint64_t m);

struct StageStep {
  int stage = 1;              // 1-based
  int radix_log2 = 1;         // k_s
  std::uint64_t stride = 1;   // eps_s
  std::uint64_t subsize = 2;  // eps_{s-1}: twiddle length of this pass
  int w = 0;                  // serial reversal width
  int w_tilde = 0;            // extra top reversal width (in-place mode)
  CounterSchedule schedule;   // counter write/read permutations (serial bits)
  std::vector<SwapStep> reshuffle;  // lane/serial exchanges after the branch reversal
  BitPermutation layout_in{BitPermutation::identity(1)};   // label <- position axis at the unit inputs
  BitPermutation layout_out{BitPermutation::identity(1)};  // label <- position axis at the unit outputs
  std::uint64_t fill_latency = 0;
};

struct StagePlan {
  PlanConfig config;
  int n = 0;  // log2 N
  int stages = 0;
  std::vector<int> radices;
  IndexLayout layout{1, 1};
  std::vector<StageStep> steps;
  BitPermutation final_layout{BitPermutation::identity(1)};   // label <- memory position
  BitPermutation output_perm{BitPermutation::identity(1)};    // X(f) = raw[output_perm(f)]
  std::uint64_t cycles_model = 0;
  int sample_lanes = 0;  // P_c
  /// True when some stage needs more than six reshuffle exchanges.
  bool reshuffle_over_budget = false;
};

/// Builds the full permutation/schedule plan.  Throws ConfigError for
/// unsupported (N, k, P, mode) combinations.
StagePlan plan(const PlanConfig& config);

struct SimReport {
  std::uint64_t n_samples = 0;
  int radix_log2 = 5;
  Mode mode = Mode::Pipeline;
  int parallelism = 1;
  int stages = 0;
  std::vector<int> radices;
  int iterations = 0;
  std::uint64_t cycles_model = 0;
  std::uint64_t cycles_observed = 0;
  std::uint64_t conflicts = 0;
  double utilization = 0.0;
  double max_abs_error = 0.0;
  std::vector<std::uint8_t> output_permutation;
};

struct RunResult {
  std::vector<ComplexSample> raw_output;  // bank-major memory order
  std::vector<ComplexSample> unscrambled;
  SimReport report;
  AccessTrace trace;
};

/// Executes the planned dataflow on `input` (length N).  The raw output is
/// returned in memory order together with the unscrambled spectrum and a
/// populated report.  Aborts with InternalError on a bank conflict or a
/// non-finite sample.
RunResult run(const PlanConfig& config, const std::vector<ComplexSample>& input);

struct Metrics {
  int iterations = 0;
  std::uint64_t cycles_model = 0;
  double utilization = 0.0;
  int sample_lanes = 0;  // P_c: 2P streaming, P in-place
};

/// Closed-form iteration/cycle/utilization model.  Provisioning: four
/// five-column units (20 butterflies); a P-way configuration keeps P batch
/// paths of n active butterflies each in flight, so pipeline utilization is
/// P*n/20 and the in-place mode divides by its iteration count.
Metrics metrics(const PlanConfig& config);

/// Stage-1 reshuffle sequences per n-mod-k residue (the reconfiguration
/// table of the first stage).  Row r uses the smallest supported length with
/// n % k == r; entries are (h, l) pairs, empty rows mean no exchange.
std::vector<std::vector<SwapStep>> stage1_reshuffle_table(int radix_log2, int parallelism);

}  // namespace hfft
