#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "chaoslab/harness.hpp"

namespace {

std::vector<int> parse_n_list(const std::string& text) {
  std::vector<int> out;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t comma = text.find(',', pos);
    if (comma == std::string::npos) comma = text.size();
    out.push_back(std::stoi(text.substr(pos, comma - pos)));
    pos = comma + 1;
  }
  return out;
}

void add_common(CLI::App* cmd, chaoslab::RunConfig& config, std::string& n_list) {
  cmd->add_option("--seed", config.seed, "64-bit decimal seed");
  cmd->add_option("--trials", config.trials, "Monte-Carlo trial count");
  cmd->add_option("--workers", config.workers, "worker thread count");
  cmd->add_option("--out", config.out_path, "output CSV path (default: stdout)");
  cmd->add_option("--lambda", config.lambda_spec, "lambda grid min:max:count");
  cmd->add_option("--n-list", n_list, "comma-separated n values");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chaoslab: simulation and verification engine for multiple stochastic "
               "integrals over discretized independently scattered measures"};
  app.require_subcommand(1);

  chaoslab::RunConfig config;
  config.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::string n_list;

  CLI::App* lk = app.add_subcommand("lk", "Levy-Khinchine exponent of a first-order kernel");
  lk->add_option("--kernel", config.kernel_path, "order-1 kernel JSON")->required();
  lk->add_option("--partition", config.partition_path, "partition JSON");
  lk->add_option("--law", config.law, "gaussian | cpoisson");
  add_common(lk, config, n_list);

  CLI::App* simulate = app.add_subcommand("simulate", "sample measure increments");
  simulate->add_option("--partition", config.partition_path, "partition JSON")->required();
  simulate->add_option("--law", config.law, "gaussian | cpoisson");
  add_common(simulate, config, n_list);

  CLI::App* chaos_check =
      app.add_subcommand("chaos-check", "per-trial exact identity battery");
  add_common(chaos_check, config, n_list);

  CLI::App* poc = app.add_subcommand("poc-verify", "decoupling verdict for a scenario");
  poc->add_option("--scenario", config.scenario, "block | switching | control")->required();
  poc->add_option("--steps", config.steps, "time grid steps (switching)");
  poc->add_option("--subcells", config.subcells, "per-cell refinement (block)");
  add_common(poc, config, n_list);

  CLI::App* clt = app.add_subcommand("clt", "double-Poisson CLT diagnostics");
  clt->add_option("--family", config.scenario, "block | negative-control");
  clt->add_option("--subcells", config.subcells, "per-cell refinement for the poc route");
  add_common(clt, config, n_list);

  CLI::App* scenario = app.add_subcommand("scenario", "worked end-to-end examples");
  scenario->require_subcommand(1);
  CLI::App* block = scenario->add_subcommand("block", "explicit double-Poisson block family");
  add_common(block, config, n_list);
  CLI::App* switching = scenario->add_subcommand("switching", "quadratic Brownian functional");
  switching->add_option("--steps", config.steps, "time grid steps");
  add_common(switching, config, n_list);

  CLI11_PARSE(app, argc, argv);

  try {
    if (!n_list.empty()) config.n_list = parse_n_list(n_list);
  } catch (const std::exception&) {
    std::fprintf(stderr, "config error: bad --n-list \"%s\"\n", n_list.c_str());
    return 1;
  }

  if (lk->parsed()) config.subcommand = "lk";
  if (simulate->parsed()) config.subcommand = "simulate";
  if (chaos_check->parsed()) config.subcommand = "chaos-check";
  if (poc->parsed()) config.subcommand = "poc-verify";
  if (clt->parsed()) config.subcommand = "clt";
  if (scenario->parsed()) {
    config.subcommand = "scenario";
    config.scenario = block->parsed() ? "block" : "switching";
  }

  return chaoslab::run(config);
}
