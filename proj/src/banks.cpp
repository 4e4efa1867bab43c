#include "hybridfft/banks.hpp"

#include <algorithm>
#include <sstream>

namespace hfft {

BankArray::BankArray(int bank_count, std::uint64_t depth) : depth_(depth) {
  if (bank_count < 1 || depth < 1) throw ConfigError("bank array needs banks and depth");
  banks_.assign(static_cast<std::size_t>(bank_count), std::vector<ComplexSample>(depth));
}

ComplexSample BankArray::read(int bank, std::uint64_t address) const {
  if (bank < 0 || bank >= bank_count() || address >= depth_) {
    throw InternalError("bank read out of range");
  }
  return banks_[static_cast<std::size_t>(bank)][address];
}

void BankArray::write(int bank, std::uint64_t address, ComplexSample value) {
  if (bank < 0 || bank >= bank_count() || address >= depth_) {
    throw InternalError("bank write out of range");
  }
  banks_[static_cast<std::size_t>(bank)][address] = value;
}

CounterSchedule first_schedule(const BitPermutation& mem_perm) {
  return {1, BitPermutation::identity(mem_perm.bits()), mem_perm};
}

CounterSchedule next_schedule(const CounterSchedule& prev, const BitPermutation& mem_perm) {
  if (prev.read_perm.bits() != mem_perm.bits()) {
    throw ConfigError("schedule width mismatch");
  }
  BitPermutation write = prev.read_perm;
  BitPermutation read = compose(mem_perm, inverse(write));
  return {prev.batch + 1, std::move(write), std::move(read)};
}

ConflictReport audit_conflicts(const AccessTrace& trace, int bank_count, std::uint64_t depth) {
  std::vector<AccessEvent> events(trace);
  std::stable_sort(events.begin(), events.end(), [](const AccessEvent& a, const AccessEvent& b) {
    if (a.cycle != b.cycle) return a.cycle < b.cycle;
    return a.op == 'R' && b.op == 'W';  // reads drain before writes land
  });

  // Per location: does it hold a value nobody has read yet?
  std::vector<std::uint8_t> unread(static_cast<std::size_t>(bank_count) * depth, 0);
  ConflictReport report;
  for (const AccessEvent& ev : events) {
    const std::size_t loc = static_cast<std::size_t>(ev.bank) * depth + ev.address;
    if (ev.op == 'R') {
      if (!unread[loc]) {
        ++report.conflicts;
        if (!report.first_offender) report.first_offender = ev;
      }
      unread[loc] = 0;
    } else {
      if (unread[loc]) {
        ++report.conflicts;
        if (!report.first_offender) report.first_offender = ev;
      }
      unread[loc] = 1;
    }
  }
  return report;
}

std::vector<LaneWord> read_batch(const BankArray& banks, const CounterSchedule& schedule,
                                 std::uint64_t count, AccessTrace* trace,
                                 std::uint64_t cycle_base) {
  std::vector<LaneWord> out;
  out.reserve(count * static_cast<std::uint64_t>(banks.bank_count()));
  for (std::uint64_t t = 0; t < count; ++t) {
    const std::uint64_t addr = schedule.read_perm.apply(t);
    for (int b = 0; b < banks.bank_count(); ++b) {
      out.push_back({b, addr, banks.read(b, addr)});
      if (trace) trace->push_back({cycle_base + t, 'R', b, addr, schedule.batch});
    }
  }
  return out;
}

void write_batch(BankArray& banks, const CounterSchedule& schedule,
                 const std::vector<ComplexSample>& stream, AccessTrace* trace,
                 std::uint64_t cycle_base) {
  const std::uint64_t lanes = static_cast<std::uint64_t>(banks.bank_count());
  if (stream.size() % lanes != 0) throw ConfigError("stream length is not a whole batch");
  const std::uint64_t count = stream.size() / lanes;
  for (std::uint64_t t = 0; t < count; ++t) {
    const std::uint64_t addr = schedule.write_perm.apply(t);
    for (int b = 0; b < banks.bank_count(); ++b) {
      banks.write(b, addr, stream[t * lanes + static_cast<std::uint64_t>(b)]);
      if (trace) trace->push_back({cycle_base + t, 'W', b, addr, schedule.batch});
    }
  }
}

std::string trace_to_ndjson(const AccessTrace& trace) {
  std::ostringstream os;
  for (const AccessEvent& ev : trace) {
    os << "{\"cycle\":" << ev.cycle << ",\"op\":\"" << ev.op << "\",\"bank\":" << ev.bank
       << ",\"address\":" << ev.address << ",\"batch\":" << ev.batch << "}\n";
  }
  return os.str();
}

}  // namespace hfft
