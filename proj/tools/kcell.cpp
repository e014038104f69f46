#include <algorithm>
#include <atomic>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "scenario.hpp"

using namespace kcell::cli;

namespace {

struct Flags {
  std::vector<std::string> files;
  std::string range, strategy, format = "json";
  std::optional<std::uint64_t> seed;
  unsigned jobs = 1;
};

int run_files(const Flags& f, const std::optional<std::string>& task) {
  Overrides o;
  try {
    if (!f.range.empty()) o.range = parse_range(f.range);
  } catch (const kcell::Error& e) {
    std::cerr << e.what() << "\n";
    return kInputError;
  }
  if (!f.strategy.empty()) o.strategy = f.strategy;
  o.seed = f.seed;
  o.task = task;

  std::vector<Outcome> outs(f.files.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < f.files.size(); i = next++) outs[i] = run_file(f.files[i], o);
  };
  const unsigned n = std::max(1u, std::min<unsigned>(f.jobs, static_cast<unsigned>(f.files.size())));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  int code = kOk;
  json all = json::array();
  for (const auto& out : outs) {
    code = std::max(code, out.exit_code);
    all.push_back(out.report);
  }
  const json& shown = outs.size() == 1 ? all[0] : all;
  if (f.format == "tsv")
    std::cout << to_tsv(shown);
  else
    std::cout << shown.dump(2) << "\n";
  return code;
}

void add_run_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("scenario", f.files, "scenario JSON files")->required()->check(CLI::ExistingFile);
  cmd->add_option("--range", f.range, "Ext range a:b");
  cmd->add_option("--strategy", f.strategy, "auto, p-group, nilpotent, cyclic, nilpotent-action or extension");
  cmd->add_option("--format", f.format, "json or tsv")->check(CLI::IsMember({"json", "tsv"}));
  cmd->add_option("--seed", f.seed, "seed for randomized tasks");
  cmd->add_option("--jobs", f.jobs, "scenarios run in parallel")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"k-cellular approximations over group algebras"};
  app.require_subcommand(1);
  Flags flags;
  std::string list_format = "json";

  auto* run = app.add_subcommand("run", "run scenario files");
  add_run_flags(run, flags);
  auto* list = app.add_subcommand("list-builtins", "print the built-in catalog");
  list->add_option("--format", list_format, "json or tsv")->check(CLI::IsMember({"json", "tsv"}));

  const std::vector<std::pair<std::string, std::string>> aliases = {
      {"emss-e2", "E2 page against the cellular target"},
      {"emss-target", "cellular target of a fibration model"},
      {"postnikov-ss", "Postnikov spectral sequence"},
  };
  std::vector<std::pair<CLI::App*, std::string>> alias_cmds;
  for (const auto& [name, help] : aliases) {
    auto* cmd = app.add_subcommand(name, help + " (runs the scenario with this task)");
    add_run_flags(cmd, flags);
    alias_cmds.emplace_back(cmd, name);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }

  if (*list) {
    bool ok = true;
    const json cat = builtin_catalog(&ok);
    if (list_format == "tsv")
      std::cout << to_tsv(cat);
    else
      std::cout << cat.dump(2) << "\n";
    return ok ? kOk : kMismatch;
  }
  if (*run) return run_files(flags, std::nullopt);
  for (const auto& [cmd, name] : alias_cmds)
    if (*cmd) return run_files(flags, name);
  return kInputError;
}
