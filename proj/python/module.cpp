#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hybridfft/io.hpp"
#include "hybridfft/oracle.hpp"
#include "hybridfft/processor.hpp"

namespace py = pybind11;

namespace {

std::vector<hfft::ComplexSample> to_vector(const py::array_t<std::complex<double>>& arr) {
  const auto buf = arr.request();
  if (buf.ndim != 1) throw hfft::ConfigError("expected a one-dimensional complex array");
  const auto* data = static_cast<const std::complex<double>*>(buf.ptr);
  return {data, data + buf.shape[0]};
}

py::array_t<std::complex<double>> to_array(const std::vector<hfft::ComplexSample>& v) {
  py::array_t<std::complex<double>> arr(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), static_cast<std::complex<double>*>(arr.request().ptr));
  return arr;
}

hfft::PlanConfig make_config(std::uint64_t n, const std::string& mode, int parallelism, int k,
                             bool allow_short_memory) {
  hfft::PlanConfig cfg;
  cfg.n_samples = n;
  cfg.radix_log2 = k;
  cfg.parallelism = parallelism;
  cfg.mode = hfft::mode_from_string(mode);
  cfg.allow_short_inplace = allow_short_memory;
  return cfg;
}

py::dict report_dict(const hfft::SimReport& r) {
  py::dict d;
  d["n"] = r.n_samples;
  d["k"] = r.radix_log2;
  d["mode"] = hfft::to_string(r.mode);
  d["parallelism"] = r.parallelism;
  d["stages"] = r.stages;
  d["radices"] = r.radices;
  d["iterations"] = r.iterations;
  d["cycles_model"] = r.cycles_model;
  d["cycles_observed"] = r.cycles_observed;
  d["conflicts"] = r.conflicts;
  d["utilization"] = r.utilization;
  d["max_abs_error"] = r.max_abs_error;
  d["output_permutation"] = r.output_permutation;
  return d;
}

}  // namespace

PYBIND11_MODULE(hybridfft, m) {
  m.doc() = "Bit-true simulator of a hybrid pipeline/memory radix-2^k FFT processor";

  m.def(
      "run",
      [](const py::array_t<std::complex<double>>& x, const std::string& mode, int parallelism,
         int k, bool allow_short_memory) {
        const auto input = to_vector(x);
        const auto cfg = make_config(input.size(), mode, parallelism, k, allow_short_memory);
        const hfft::RunResult r = hfft::run(cfg, input);
        py::dict out;
        out["spectrum"] = to_array(r.unscrambled);
        out["raw"] = to_array(r.raw_output);
        out["report"] = report_dict(r.report);
        return out;
      },
      py::arg("x"), py::arg("mode") = "pipeline", py::arg("parallelism") = 1, py::arg("k") = 5,
      py::arg("allow_short_memory") = false,
      "Simulate one transform; returns the unscrambled spectrum, the raw memory-order "
      "output and the run report.");

  m.def(
      "metrics",
      [](std::uint64_t n, const std::string& mode, int parallelism, int k) {
        const hfft::Metrics v = hfft::metrics(make_config(n, mode, parallelism, k, true));
        py::dict d;
        d["iterations"] = v.iterations;
        d["cycles_model"] = v.cycles_model;
        d["utilization"] = v.utilization;
        d["sample_lanes"] = v.sample_lanes;
        return d;
      },
      py::arg("n"), py::arg("mode") = "pipeline", py::arg("parallelism") = 1, py::arg("k") = 5,
      "Closed-form iteration/cycle/utilization model.");

  m.def(
      "stage_radices",
      [](std::uint64_t n, int k) { return hfft::stage_radices(n, k); },
      py::arg("n"), py::arg("k") = 5);

  m.def(
      "stage1_reshuffle_table",
      [](int k, int parallelism) {
        std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> rows;
        for (const auto& row : hfft::stage1_reshuffle_table(k, parallelism)) {
          std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
          for (const hfft::SwapStep& s : row) out.emplace_back(s.h, s.l);
          rows.push_back(std::move(out));
        }
        return rows;
      },
      py::arg("k") = 5, py::arg("parallelism") = 1,
      "First-stage reshuffle (h, l) sequences per n-mod-k residue.");

  m.def(
      "dft_direct",
      [](const py::array_t<std::complex<double>>& x) { return to_array(hfft::dft_direct(to_vector(x))); },
      py::arg("x"), "Reference O(N^2) DFT.");

  m.def(
      "fft_radix2",
      [](const py::array_t<std::complex<double>>& x) { return to_array(hfft::fft_radix2(to_vector(x))); },
      py::arg("x"), "Reference radix-2 FFT.");

  m.def(
      "random_samples",
      [](std::uint64_t count, std::uint64_t seed) { return to_array(hfft::random_samples(count, seed)); },
      py::arg("count"), py::arg("seed") = 0,
      "Deterministic complex noise matching the CLI's --random input.");

  py::register_exception<hfft::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<hfft::InternalError>(m, "InternalError", PyExc_RuntimeError);
}
