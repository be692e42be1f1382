#include "sparsecirc/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include "../io/text.hpp"
#include "sparsecirc/errors.hpp"
#include "sparsecirc/io.hpp"

namespace sparsecirc {

namespace {

namespace fs = std::filesystem;

std::size_t resolve_workers(std::optional<std::size_t> flag) {
  if (flag) {
    if (*flag < 1) throw ConfigError(0, "--workers must be at least 1");
    return *flag;
  }
  if (const char* env = std::getenv("SPARSECIRC_WORKERS"); env && *env) {
    const auto v = detail::to_u64(detail::trim(env));
    if (!v || *v < 1 || *v > 1024) throw ConfigError(0, "SPARSECIRC_WORKERS must be an integer in [1, 1024]");
    return static_cast<std::size_t>(*v);
  }
  return 1;
}

int cmd_list(std::ostream& out) {
  for (const auto& e : experiment_catalog())
    out << e.name << "\t" << e.anchor << "\t" << e.description << "\n";
  return kExitOk;
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            std::optional<std::size_t> workers, const std::string& out_dir, std::ostream& out) {
  auto doc = load_config(config_path);
  if (seed) doc.run.master_seed = *seed;
  if (!out_dir.empty()) doc.output.directory = out_dir;
  RunOptions options;
  options.workers = resolve_workers(workers);
  options.keep_spectra = doc.output.spectra;

  const auto report = run_experiment(doc.run, options);

  const fs::path dir(doc.output.directory);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir.string(), ec.message());
  const auto report_path = dir / (std::string(experiment_name(doc.run.experiment)) + ".report");
  write_report(report, report_path);
  if (doc.output.spectra) {
    fs::create_directories(dir / "spectra", ec);
    if (ec) throw IoError((dir / "spectra").string(), ec.message());
    for (const auto& s : report.spectra) write_eigenvalues_csv(s.esd, dir / "spectra" / (s.label + ".csv"));
  }

  for (const auto& row : report.summary) {
    out << "n=" << row.n;
    for (const auto& [k, v] : row.values) out << " " << k << "=" << detail::shortest(v);
    out << "\n";
  }
  for (const auto& f : report.flags)
    out << (f.state == FlagState::Pass ? "PASS " : "FAIL ") << f.id << " [" << f.criterion << "] " << f.detail
        << "\n";
  out << "exceptional trials: " << report.exceptions << " of " << report.records.size() << "\n";
  out << "report: " << report_path.string() << "\n";
  return report.passed() ? kExitOk : kExitAssertion;
}

int cmd_figure(const std::string& spec_path, const std::string& output_override, std::ostream& out) {
  const fs::path p(spec_path);
  auto spec = parse_figure_spec(detail::read_text(p), p.parent_path());
  if (!output_override.empty()) spec.output = output_override;
  const auto svg = render_scatter_svg(spec);
  if (spec.output.empty()) {
    out << svg;
  } else {
    detail::write_text(spec.output, svg);
    out << "figure: " << spec.output.string() << "\n";
  }
  return kExitOk;
}

int cmd_verify(std::ostream& out) {
  bool ok = true;
  for (const auto& c : run_verify_suite()) {
    out << (c.passed ? "PASS " : "FAIL ") << c.name;
    if (!c.detail.empty()) out << " (" << c.detail << ")";
    out << "\n";
    ok = ok && c.passed;
  }
  return ok ? kExitOk : kExitAssertion;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse random matrix spectra: experiments, figures and self-checks", "sparsecirc"};
  app.require_subcommand(1);

  std::string config_path, figure_path, out_dir, figure_out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;

  auto* run = app.add_subcommand("run", "Execute the experiment described by a config file");
  run->add_option("config", config_path, "Config file")->required();
  run->add_option("--seed", seed, "Override master_seed");
  run->add_option("--workers", workers, "Worker threads (default: SPARSECIRC_WORKERS or 1)");
  run->add_option("--out", out_dir, "Override the output directory");

  auto* figure = app.add_subcommand("figure", "Render an eigenvalue scatter plot as SVG");
  figure->add_option("spec", figure_path, "Figure description file")->required();
  figure->add_option("-o,--output", figure_out, "SVG destination (default: spec output or stdout)");

  auto* verify = app.add_subcommand("verify", "Run the invariant and oracle self-checks");
  auto* list = app.add_subcommand("list", "List experiments with their anchors");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (*list) return cmd_list(out);
    if (*verify) return cmd_verify(out);
    if (*figure) return cmd_figure(figure_path, figure_out, out);
    if (*run) return cmd_run(config_path, seed, workers, out_dir, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ContractError& e) {
    err << "invalid request: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "invalid parameter: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ResourceError& e) {
    err << "resource limit: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitAssertion;
  }
  return kExitUsage;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace sparsecirc
