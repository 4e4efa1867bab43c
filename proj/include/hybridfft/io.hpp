#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hybridfft/mdc.hpp"
#include "hybridfft/processor.hpp"

namespace hfft {

/// Samples as "re,im" text rows when the path ends in .csv, otherwise
/// little-endian float64 pairs.
std::vector<ComplexSample> load_samples(const std::string& path);
void store_samples(const std::string& path, const std::vector<ComplexSample>& samples);

/// Deterministic complex noise in [-1,1) x [-1,1); the generator is fully
/// pinned so identical seeds give identical files on any platform.
std::vector<ComplexSample> random_samples(std::uint64_t count, std::uint64_t seed);

/// Probe with pairwise-distinct spectrum values for order recovery.
std::vector<ComplexSample> probe_samples(std::uint64_t count);

std::string report_to_json(const SimReport& report);
void store_report(const std::string& path, const SimReport& report);

}  // namespace hfft
