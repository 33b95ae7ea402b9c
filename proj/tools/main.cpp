#include <chrono>
#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "gpwb/io.hpp"
#include "gpwb/experiments/config.hpp"
#include "gpwb/experiments/runner.hpp"

namespace ex = gpwb::experiments;

namespace {

constexpr int kConfigError = 2;
constexpr int kIoError = 3;

struct Overrides {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> workers;
  std::optional<double> tol;
  std::optional<int> lattice;
};

std::string description(ex::Mode mode) {
  switch (mode) {
    case ex::Mode::kempf_ness: return "finite-dimensional stability verdicts against the moment-map flow";
    case ex::Mode::vortex_threshold: return "bisect the vortex existence threshold on a torus";
    case ex::Mode::pair: return "tensor pairs: exact verdict and lattice heat flow";
    case ex::Mode::triple: return "triples with the second bundle held fixed";
    case ex::Mode::coherent_system: return "coherent systems";
    case ex::Mode::twisted_triple: return "twisted triples";
    case ex::Mode::higgs: return "Higgs bundles";
    case ex::Mode::invariant_suite: return "reduced-size run of the acceptance checks";
  }
  return {};
}

int execute(ex::Mode mode, const Overrides& o) {
  ex::ExperimentConfig config = o.config.empty() ? ex::default_config(mode) : ex::load_config(o.config, mode);
  if (o.seed) config.seed = *o.seed;
  if (o.out) config.out_dir = *o.out;
  if (o.workers) config.workers = *o.workers;
  if (o.tol) config.flow.tol = *o.tol;
  if (o.lattice) config.lattice_size = *o.lattice;
  if (config.workers < 1) throw ex::ConfigError(0, "workers", "must be at least 1");

  const auto start = std::chrono::steady_clock::now();
  ex::Timings timings;
  const auto report = ex::run(config, &timings);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const auto files = report.write(config.out_dir);
  std::ofstream timing(config.out_dir / "timing.txt");
  for (const auto& [name, s] : timings) timing << name << " = " << gpwb::format_double(s) << '\n';
  if (!timing) throw std::ios_base::failure("cannot write timing.txt");

  std::cout << report.text();
  for (const auto& f : files) std::cout << "wrote " << f.generic_string() << '\n';
  std::cout << fmt::format("wall_clock_seconds = {:.3f}\n", seconds);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gauge-theoretic stability experiments"};
  app.require_subcommand(1);
  Overrides o;
  std::optional<ex::Mode> chosen;
  for (ex::Mode mode : ex::kAllModes) {
    auto* sub = app.add_subcommand(ex::to_string(mode), description(mode));
    sub->add_option("-c,--config", o.config, "YAML configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("-o,--out", o.out, "output directory");
    sub->add_option("-j,--workers", o.workers, "worker threads (does not change results)");
    sub->add_option("--tol", o.tol, "flow residual tolerance");
    sub->add_option("-n,--lattice", o.lattice, "lattice size N");
    sub->callback([&chosen, mode] { chosen = mode; });
  }
  CLI11_PARSE(app, argc, argv);

  try {
    return execute(*chosen, o);
  } catch (const ex::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const gpwb::FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kIoError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kIoError;
  }
}
