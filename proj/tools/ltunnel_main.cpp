// ltunnel: analytic, oracle and comparison runs for a Gaussian packet tunneling through a
// rectangular barrier.
//
// exit codes: 0 ok, 2 configuration error, 3 validation/acceptance gate failed, 4 numeric failure.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ltunnel/cli_io.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ltunnel::io::ConfigError("--config", "cannot read " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Laplace-domain tunneling of Gaussian packets"};
  app.set_version_flag("--version", std::string(ltunnel::kVersion));
  app.require_subcommand(1);

  std::string config_path, out;
  std::vector<std::string> overrides;
  bool force = false, print_config = false;

  const char* modes[] = {"analytic", "oracle", "compare", "figure1", "validate", "packet-info"};
  const char* help[] = {
      "evaluate the region-wise analytic wavefunction on a grid",
      "run the Crank-Nicolson reference solver",
      "compare oracle transmission and delay with the analytic predictions",
      "regenerate the first three transmitted terms at the figure parameters",
      "run the built-in identity checks",
      "print packet and window diagnostics",
  };
  for (int i = 0; i < 6; ++i) {
    auto* sub = app.add_subcommand(modes[i], help[i]);
    sub->add_option("-c,--config", config_path, "JSON configuration file");
    sub->add_option("-o,--out", out, "output prefix (overrides the config)");
    sub->add_option("-s,--override", overrides, "override a config key, e.g. packet.L=30 (repeatable)")->take_all();
    sub->add_flag("--force", force, "run compare outside the oracle-safe range");
    sub->add_flag("--print-config", print_config, "echo the normalized configuration and exit");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  std::string mode;
  for (auto* s : app.get_subcommands()) mode = s->get_name();

  try {
    std::vector<std::string> ov = overrides;
    ov.insert(ov.begin(), "mode=\"" + mode + "\"");
    if (!out.empty()) ov.push_back("output=\"" + out + "\"");
    const std::string text = config_path.empty() ? std::string("{}") : slurp(config_path);
    const auto cfg = ltunnel::io::parse_config(text, ov);
    if (print_config) {
      std::cout << ltunnel::io::echo_config(cfg);
      return 0;
    }
    const auto res = ltunnel::io::run(cfg, force);
    if (cfg.mode == ltunnel::io::Mode::validate)
      std::cout << ltunnel::io::format_validation(ltunnel::io::validate_suite());
    std::cout << res.summary_json;
    return res.exit_code;
  } catch (const ltunnel::io::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ltunnel::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const ltunnel::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
