// ep3 command-line front end.
//
//   ep3 <command> [--config FILE] [--out DIR] [--<key> VALUE ...]
//
// Every configuration key is also a flag (underscores become dashes); flags
// override the config file.

#include "ep3/commands.hpp"
#include "ep3/config.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <memory>

namespace {

std::string dashed(std::string key) {
  for (char& c : key) {
    if (c == '_') c = '-';
  }
  return key;
}

struct SubcommandArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::map<std::string, std::string> values;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EP3 simulation and analysis toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ep3::kToolVersion);

  std::map<std::string, std::unique_ptr<SubcommandArgs>> args;
  for (const auto& name : ep3::command_names()) {
    auto* sub = app.add_subcommand(name, ep3::command_help(name));
    auto& a = args[name] = std::make_unique<SubcommandArgs>();
    sub->add_option("--config", a->config_path, "key = value configuration file");
    sub->add_option("--out", a->out_dir, "output directory")->capture_default_str();
    for (const auto& key : ep3::config_keys()) {
      std::string help = key.help;
      if (!key.default_value.empty()) help += " [" + key.default_value + "]";
      sub->add_option("--" + dashed(key.name), a->values[key.name], help);
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  for (const auto& name : ep3::command_names()) {
    auto* sub = app.get_subcommand(name);
    if (!sub->parsed()) continue;
    const SubcommandArgs& a = *args[name];
    try {
      ep3::ParamConfig cfg = a.config_path.empty() ? ep3::ParamConfig{} : ep3::ParamConfig::load(a.config_path);
      for (const auto& key : ep3::config_keys()) {
        if (sub->count("--" + dashed(key.name)) > 0) {
          cfg.set(key.name, a.values.at(key.name), "--" + dashed(key.name));
        }
      }
      const ep3::CommandOutput out = ep3::run_command(name, cfg);
      const auto manifest = ep3::write_outputs(a.out_dir, name, cfg, out);
      std::cout << out.summary << "manifest: " << manifest.string() << "\n";
      return out.ok ? 0 : 3;
    } catch (const ep3::ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }
  return 1;
}
