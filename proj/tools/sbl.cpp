// Command-line front end: verify | classify | integrate | surface.
// Settings precedence: flags, then SBL_* environment variables, then the
// --config file. Exit codes: 0 all identities pass, 1 identity failure,
// 2 usage or configuration error.

#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sbl/verify.hpp"

namespace {

struct Options {
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> given;
  std::vector<std::string> set_tol;
  CLI::Option* set_tol_opt = nullptr;
  std::string config;
  CLI::Option* config_opt = nullptr;
};

void add_options(CLI::App* app, Options& o) {
  struct OptionDef {
    const char* key;
    const char* help;
  };
  static const OptionDef option_defs[] = {
      {"metric", "catalog metric: euclidean3, sphere3, hyperbolic3, halfspace, heisenberg, perturbed, flat2d, "
                 "sphere2, hyperbolic2, perturbed2d"},
      {"c", "curvature parameter of the metric"},
      {"eps", "perturbation size for perturbed metrics"},
      {"s", "sphere bundle radius"},
      {"seed", "random seed"},
      {"samples", "sample points per identity"},
      {"backend", "derivative backend: dual or fd"},
      {"tol", "override every tolerance"},
      {"suites", "comma-separated: structure,hodge,rho,ricci,fiber,lagrangian,surface,2d"},
      {"format", "text or json"},
      {"out", "write the report to this path"},
      {"surface", "surface: horosphere, geodesic_sphere, vertical_plane, euclidean_sphere, graph"},
      {"a", "surface radius parameter"},
      {"h", "horosphere height"},
      {"amp", "graph amplitude"},
      {"t0", "Lagrangian coefficient t0"},
      {"branch", "upper or lower sign branch"},
      {"x", "base point x1,x2[,x3]"},
  };
  for (const OptionDef& s : option_defs) {
    std::string& slot = o.values[s.key];
    o.given[s.key] = app->add_option(std::string("--") + s.key, slot, s.help);
  }
  o.set_tol_opt = app->add_option("--set-tol", o.set_tol, "named tolerance override name=value (repeatable)");
  o.config_opt = app->add_option("--config", o.config, "key = value configuration file");
}

std::map<std::string, std::string> flag_settings(const Options& o) {
  std::map<std::string, std::string> flags;
  for (const auto& [k, opt] : o.given)
    if (opt->count() > 0) flags[k] = o.values.at(k);
  for (const std::string& kv : o.set_tol) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw sbl::ConfigError("--set-tol expects name=value, got '" + kv + "'");
    flags["tol." + kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  return flags;
}

std::optional<std::string> getenv_opt(const std::string& name) {
  const char* v = std::getenv(name.c_str());
  if (!v) return std::nullopt;
  return std::string(v);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sphere bundle identity verification"};
  app.set_help_flag("--help", "print help");  // -h is the horosphere height
  app.require_subcommand(1);
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"verify", "run verification suites"},
      {"classify", "Ricci type classification"},
      {"integrate", "fibre integral identities at a base point"},
      {"surface", "Legendre lift and Weingarten functional of a catalog surface"}};
  std::map<std::string, Options> opts;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    subs[name] = app.add_subcommand(name, help);
    add_options(subs[name], opts[name]);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::string command;
  for (const auto& [name, sub] : subs)
    if (sub->parsed()) command = name;
  const Options& o = opts[command];

  sbl::RunConfig cfg;
  try {
    std::map<std::string, std::string> file;
    std::string config_path = o.config_opt->count() > 0 ? o.config : getenv_opt("SBL_CONFIG").value_or("");
    if (!config_path.empty()) file = sbl::read_config_file(config_path);
    auto settings = sbl::merge_settings(file, getenv_opt, flag_settings(o));
    settings["command"] = command;
    cfg = sbl::config_from_settings(settings);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  sbl::VerificationReport report;
  try {
    report = sbl::run_command(cfg);
  } catch (const sbl::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  try {
    sbl::emit_report(report, cfg.format, cfg.out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return report.exit_code();
}
