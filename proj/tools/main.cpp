#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "hybridfft/io.hpp"
#include "hybridfft/oracle.hpp"
#include "hybridfft/processor.hpp"

namespace {

struct CommonArgs {
  std::uint64_t n = 0;
  int k = 5;
  std::string mode = "pipeline";
  int parallelism = 1;
  std::string input_path;
  bool random = false;
  std::uint64_t seed = 0;
  std::string output_path;
  std::string report_path;
  std::string trace_path;
  bool allow_short_memory = false;
  std::string inject_fault;
};

void add_common(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("--n", args->n, "transform length (power of two)")->required();
  cmd->add_option("--k", args->k, "radix exponent (default 5)");
  cmd->add_option("--mode", args->mode, "pipeline | memory")
      ->check(CLI::IsMember({"pipeline", "memory", "memory-based"}));
  cmd->add_option("--parallelism", args->parallelism, "MDC rows: 1, 2 or 4");
  cmd->add_option("--input", args->input_path, "sample file (.csv or raw float64 pairs)");
  cmd->add_flag("--random", args->random, "generate input samples from --seed");
  cmd->add_option("--seed", args->seed, "seed for --random");
  cmd->add_option("--output", args->output_path, "write raw-order output samples here");
  cmd->add_option("--report", args->report_path, "write the JSON run report here");
  cmd->add_option("--trace", args->trace_path, "dump the bank access trace (NDJSON)");
  cmd->add_flag("--allow-short-memory", args->allow_short_memory,
                "admit memory mode for 2^k < N <= 2^(2k)");
  cmd->add_option("--inject-fault", args->inject_fault, "test hook")->group("");
}

hfft::PlanConfig to_config(const CommonArgs& args) {
  hfft::PlanConfig cfg;
  cfg.n_samples = args.n;
  cfg.radix_log2 = args.k;
  cfg.parallelism = args.parallelism;
  cfg.mode = hfft::mode_from_string(args.mode);
  cfg.allow_short_inplace = args.allow_short_memory;
  return cfg;
}

std::vector<hfft::ComplexSample> gather_input(const CommonArgs& args) {
  if (args.random && !args.input_path.empty()) {
    throw hfft::ConfigError("--random and --input are mutually exclusive");
  }
  if (!args.random && args.input_path.empty()) {
    throw hfft::ConfigError("provide --input FILE or --random");
  }
  if (args.random) return hfft::random_samples(args.n, args.seed);
  std::vector<hfft::ComplexSample> samples = hfft::load_samples(args.input_path);
  if (samples.size() != args.n) {
    throw hfft::ConfigError("input holds " + std::to_string(samples.size()) +
                            " samples, expected " + std::to_string(args.n));
  }
  return samples;
}

void write_artifacts(const CommonArgs& args, const hfft::RunResult& result) {
  if (!args.output_path.empty()) hfft::store_samples(args.output_path, result.raw_output);
  if (!args.report_path.empty()) hfft::store_report(args.report_path, result.report);
  if (!args.trace_path.empty()) {
    std::ofstream out(args.trace_path);
    if (!out) throw hfft::IoError("cannot write " + args.trace_path);
    out << hfft::trace_to_ndjson(result.trace);
  }
}

std::string width_summary(const hfft::StagePlan& plan) {
  std::ostringstream os;
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    if (i) os << " / ";
    os << plan.steps[i].w;
    if (plan.steps[i].w_tilde) os << "," << plan.steps[i].w_tilde;
  }
  return os.str();
}

void warn_over_budget(const hfft::PlanConfig& cfg) {
  if (hfft::plan(cfg).reshuffle_over_budget) {
    std::cerr << "note: some stage needs more than six reshuffle exchanges; "
                 "a hardware realization would need extra stream buffering\n";
  }
}

int cmd_run(const CommonArgs& args) {
  if (!args.inject_fault.empty()) throw hfft::InternalError("injected fault: " + args.inject_fault);
  const hfft::PlanConfig cfg = to_config(args);
  warn_over_budget(cfg);
  const hfft::RunResult result = hfft::run(cfg, gather_input(args));
  write_artifacts(args, result);
  std::cout << "n=" << args.n << " mode=" << hfft::to_string(cfg.mode)
            << " parallelism=" << cfg.parallelism << " iterations=" << result.report.iterations
            << " cycles=" << result.report.cycles_observed
            << " conflicts=" << result.report.conflicts
            << " max_abs_error=" << result.report.max_abs_error << "\n";
  return 0;
}

int cmd_verify(const CommonArgs& args, double tolerance) {
  if (!args.inject_fault.empty()) throw hfft::InternalError("injected fault: " + args.inject_fault);
  const hfft::PlanConfig cfg = to_config(args);
  warn_over_budget(cfg);
  const std::vector<hfft::ComplexSample> input = gather_input(args);
  const hfft::RunResult result = hfft::run(cfg, input);
  write_artifacts(args, result);

  const std::vector<hfft::ComplexSample> reference =
      args.n <= 4096 ? hfft::dft_direct(input) : hfft::fft_radix2(input);
  double max_err = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    max_err = std::max(max_err, std::abs(result.unscrambled[i] - reference[i]));
  }
  const bool ok = max_err <= tolerance && result.report.conflicts == 0;
  std::cout << "reversal widths: " << width_summary(hfft::plan(cfg)) << "\n"
            << "max_abs_error=" << max_err << " tolerance=" << tolerance
            << " conflicts=" << result.report.conflicts << " -> "
            << (ok ? "PASS" : "FAIL") << "\n";
  return ok ? 0 : 1;
}

int cmd_tables(int k, int parallelism, int stage, bool as_json) {
  if (stage != 1) throw hfft::ConfigError("only the first-stage table is defined");
  const auto rows = hfft::stage1_reshuffle_table(k, parallelism);
  if (as_json) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (std::size_t r = 0; r < rows.size(); ++r) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      for (const hfft::SwapStep& s : rows[r]) row.push_back({{"h", s.h}, {"l", s.l}});
      j.push_back({{"residue", r}, {"exchanges", row}});
    }
    std::cout << j.dump(2) << "\n";
    return 0;
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::cout << "n%" << k << "=" << r << ":";
    if (rows[r].empty()) {
      std::cout << " (none)";
    } else {
      for (const hfft::SwapStep& s : rows[r]) std::cout << " (" << s.h << "," << s.l << ")";
    }
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hybrid pipeline/memory FFT processor simulator"};
  app.require_subcommand(1);

  CommonArgs run_args;
  CLI::App* run_cmd = app.add_subcommand("run", "execute one transform and report");
  add_common(run_cmd, &run_args);

  CommonArgs verify_args;
  double tolerance = 1e-9;
  CLI::App* verify_cmd = app.add_subcommand("verify", "run and compare against the reference DFT");
  add_common(verify_cmd, &verify_args);
  verify_cmd->add_option("--tolerance", tolerance, "max abs error accepted (default 1e-9)");

  int tbl_k = 5, tbl_p = 1, tbl_stage = 1;
  bool tbl_json = false;
  CLI::App* tables_cmd = app.add_subcommand("tables", "print first-stage reshuffle sequences");
  tables_cmd->add_option("--k", tbl_k, "radix exponent");
  tables_cmd->add_option("--parallelism", tbl_p, "MDC rows: 1, 2 or 4");
  tables_cmd->add_option("--stage", tbl_stage, "stage index (1)");
  tables_cmd->add_flag("--json", tbl_json, "emit JSON");

  try {
    app.parse(argc, argv);
    if (run_cmd->parsed()) return cmd_run(run_args);
    if (verify_cmd->parsed()) return cmd_verify(verify_args, tolerance);
    return cmd_tables(tbl_k, tbl_p, tbl_stage, tbl_json);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const hfft::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const hfft::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const hfft::InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
