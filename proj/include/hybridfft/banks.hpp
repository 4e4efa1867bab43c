#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hybridfft/bitperm.hpp"
#include "hybridfft/mdc.hpp"

namespace hfft {

/// 2P memory banks of equal depth holding complex samples.
class BankArray {
 public:
  BankArray(int bank_count, std::uint64_t depth);

  int bank_count() const { return static_cast<int>(banks_.size()); }
  std::uint64_t depth() const { return depth_; }

  ComplexSample read(int bank, std::uint64_t address) const;
  void write(int bank, std::uint64_t address, ComplexSample value);

 private:
  std::uint64_t depth_;
  std::vector<std::vector<ComplexSample>> banks_;
};

/// Read/write address permutations of the circular counter for one batch.
/// The counter runs over the serial bits; all banks share the address bus.
struct CounterSchedule {
  int batch = 1;
  BitPermutation write_perm{BitPermutation::identity(1)};  // W_A = write_perm(counter)
  BitPermutation read_perm{BitPermutation::identity(1)};   // R_A = read_perm(counter)
};

/// Initial schedule: data loaded in natural counter order and read through
/// `mem_perm`, so write_perm = identity and read_perm = mem_perm.
CounterSchedule first_schedule(const BitPermutation& mem_perm);

/// Advances the interleaved schedule: the next batch writes into the
/// addresses the previous batch has read (write' = read), and reads through
/// read' = mem_perm o inverse(write').
CounterSchedule next_schedule(const CounterSchedule& prev, const BitPermutation& mem_perm);

/// One recorded bank access.
struct AccessEvent {
  std::uint64_t cycle = 0;
  char op = 'R';  // 'R' or 'W'
  int bank = 0;
  std::uint64_t address = 0;
  int batch = 0;
};

using AccessTrace = std::vector<AccessEvent>;

struct ConflictReport {
  std::uint64_t conflicts = 0;
  std::optional<AccessEvent> first_offender;
};

/// Replays a trace and counts locations that are overwritten while still
/// holding an unread value, or read while holding none.  Events are ordered
/// by cycle with reads serviced before writes inside a cycle.
ConflictReport audit_conflicts(const AccessTrace& trace, int bank_count, std::uint64_t depth);

/// Reads `count` counter positions through the schedule, one word per bank
/// per counter tick, appending to `trace` when given.
struct LaneWord {
  int bank;
  std::uint64_t address;
  ComplexSample value;
};
std::vector<LaneWord> read_batch(const BankArray& banks, const CounterSchedule& schedule,
                                 std::uint64_t count, AccessTrace* trace = nullptr,
                                 std::uint64_t cycle_base = 0);

/// Writes a stream produced by read_batch order (bank-major per counter
/// tick) through the schedule's write permutation.
void write_batch(BankArray& banks, const CounterSchedule& schedule,
                 const std::vector<ComplexSample>& stream, AccessTrace* trace = nullptr,
                 std::uint64_t cycle_base = 0);

/// Serializes a trace as newline-delimited JSON records
/// {"cycle":..,"op":"R","bank":..,"address":..,"batch":..}.
std::string trace_to_ndjson(const AccessTrace& trace);

}  // namespace hfft
