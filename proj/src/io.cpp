#include "hybridfft/io.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

namespace hfft {

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

double unit_double(std::mt19937_64& rng) {
  // Top 53 bits, mapped to [0,1); independent of library distributions.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::vector<ComplexSample> load_samples(const std::string& path) {
  std::vector<ComplexSample> out;
  if (ends_with(path, ".csv")) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const std::size_t comma = line.find(',');
      if (comma == std::string::npos) throw IoError("malformed sample row in " + path);
      try {
        out.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
      } catch (const std::exception&) {
        throw IoError("malformed sample row in " + path);
      }
    }
    return out;
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::array<char, 16> buf;
  while (in.read(buf.data(), buf.size())) {
    double re, im;
    std::memcpy(&re, buf.data(), 8);
    std::memcpy(&im, buf.data() + 8, 8);
    out.emplace_back(re, im);
  }
  if (in.gcount() != 0) throw IoError("truncated sample pair in " + path);
  return out;
}

void store_samples(const std::string& path, const std::vector<ComplexSample>& samples) {
  if (ends_with(path, ".csv")) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out.precision(17);
    for (const ComplexSample& v : samples) out << v.real() << ',' << v.imag() << '\n';
    if (!out) throw IoError("failed writing " + path);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  for (const ComplexSample& v : samples) {
    const double re = v.real(), im = v.imag();
    std::array<char, 16> buf;
    std::memcpy(buf.data(), &re, 8);
    std::memcpy(buf.data() + 8, &im, 8);
    out.write(buf.data(), buf.size());
  }
  if (!out) throw IoError("failed writing " + path);
}

std::vector<ComplexSample> random_samples(std::uint64_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<ComplexSample> out;
  out.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    const double re = 2.0 * unit_double(rng) - 1.0;
    const double im = 2.0 * unit_double(rng) - 1.0;
    out.emplace_back(re, im);
  }
  return out;
}

std::vector<ComplexSample> probe_samples(std::uint64_t count) {
  return random_samples(count, 0x9E3779B97F4A7C15ull);
}

std::string report_to_json(const SimReport& r) {
  nlohmann::ordered_json j;
  j["n"] = r.n_samples;
  j["k"] = r.radix_log2;
  j["mode"] = to_string(r.mode);
  j["parallelism"] = r.parallelism;
  j["stages"] = r.stages;
  j["radices"] = r.radices;
  j["iterations"] = r.iterations;
  j["cycles_model"] = r.cycles_model;
  j["cycles_observed"] = r.cycles_observed;
  j["conflicts"] = r.conflicts;
  j["utilization"] = r.utilization;
  j["max_abs_error"] = r.max_abs_error;
  j["output_permutation"] = r.output_permutation;
  return j.dump(2) + "\n";
}

void store_report(const std::string& path, const SimReport& report) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << report_to_json(report);
  if (!out) throw IoError("failed writing " + path);
}

}  // namespace hfft
