// kubo: configuration-driven runner for Kubo-transformed correlation
// functions computed by the external-source method on 1D quantum systems.
//
// Subcommands:
//   exact   direct exact correlator (CSV)
//   esm     external-source pipeline with the exact reconstruction (CSV)
//   oracle  closed-form harmonic-oscillator curves (CSV)
//   scan    convergence scan over one axis (CSV)
//   verify  invariant suite (table; exit 4 on any failed check)
//
// Exit codes: 0 success, 1 usage/parse error, 2 validation error,
// 3 numerical failure, 4 verify-suite failure.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "esm/esm.hpp"

namespace {

struct Common {
  std::string config_path;
  std::string out_path;
  std::vector<std::string> sets;
  int threads = 1;
};

void add_common_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "Run configuration file (INI-style)");
  cmd->add_option("--out", c.out_path, "Output file (default: stdout)");
  cmd->add_option("--set", c.sets, "Override a config entry: section.key=value")
      ->type_name("KEY=VALUE");
  cmd->add_option("--threads", c.threads, "Worker thread count")->check(CLI::PositiveNumber);
}

std::string load_config_text(const std::string& path) {
  if (path.empty()) return "";
  std::ifstream in(path);
  if (!in) throw esm::ParseError("cannot open config file \"" + path + "\"", 0);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Returns false on I/O failure.
bool write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return static_cast<bool>(std::cout);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) return false;
  out << text;
  return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kubo-transformed correlation functions by the external-source method"};
  app.require_subcommand(1);
  Common common;

  CLI::App* cmd_exact = app.add_subcommand("exact", "Direct exact correlator");
  CLI::App* cmd_esm = app.add_subcommand("esm", "External-source pipeline and reconstruction");
  CLI::App* cmd_oracle = app.add_subcommand("oracle", "Closed-form harmonic curves");
  CLI::App* cmd_scan = app.add_subcommand("scan", "Convergence scan over one axis");
  CLI::App* cmd_verify = app.add_subcommand("verify", "Run the invariant suite");
  for (CLI::App* cmd : {cmd_exact, cmd_esm, cmd_oracle, cmd_scan, cmd_verify}) {
    add_common_flags(cmd, common);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  }

  esm::set_thread_count(common.threads);

  try {
    const std::string text = load_config_text(common.config_path);

    if (cmd_scan->parsed()) {
      const esm::ScanConfig scan = esm::parse_scan_config(text, common.sets);
      const std::string path =
          common.out_path.empty() ? scan.base.output.path : common.out_path;
      if (!write_output(esm::run_scan(scan), path)) {
        std::cerr << "cannot write output file \"" << path << "\"\n";
        return 1;
      }
      return 0;
    }

    const esm::RunConfig cfg = esm::parse_config(text, common.sets);
    // The --out flag wins over the config's [output] path; empty means stdout.
    const std::string path = common.out_path.empty() ? cfg.output.path : common.out_path;

    if (cmd_verify->parsed()) {
      const esm::VerifyReport report = esm::run_verify(cfg);
      if (!write_output(report.text(), path)) {
        std::cerr << "cannot write output file \"" << path << "\"\n";
        return 1;
      }
      return report.all_passed ? 0 : 4;
    }

    std::string out;
    if (cmd_exact->parsed()) out = esm::run_exact(cfg);
    else if (cmd_esm->parsed()) out = esm::run_esm(cfg);
    else out = esm::run_oracle(cfg);

    if (!write_output(out, path)) {
      std::cerr << "cannot write output file \"" << path << "\"\n";
      return 1;
    }
    return 0;
  } catch (const esm::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const esm::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const esm::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
