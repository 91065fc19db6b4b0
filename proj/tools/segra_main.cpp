#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <string>

#include "segra/cli.hpp"
#include "segra/log.hpp"

namespace {

void add_common_options(CLI::App* cmd, segra::RunConfig& config, std::string& discount_name) {
  cmd->add_option("--tau", config.tau, "quality floor in (0,1)");
  cmd->add_option("--k", config.k, "number of rewiring operations");
  cmd->add_option("--discount", discount_name, "rank discount: uniform | invlog")
      ->check(CLI::IsMember({"uniform", "invlog"}));
  cmd->add_option("--tol", config.tol, "fixed-point tolerance (max-norm)");
  cmd->add_option("--max-iter", config.max_iter, "iteration cap, 0 = automatic");
  cmd->add_option("--seed", config.seed, "random seed");
  cmd->add_option("--threads", config.threads, "worker threads, 0 = hardware");
  cmd->add_option("--guard", config.guard, "dense-oracle harmful-node cap");
  cmd->add_option("--out-dir", config.out_dir, "output directory");
  cmd->add_option("--cache-cap", config.cache_cap, "column cache cap, 0 = unbounded");
  cmd->add_flag("--no-timing", config.no_timing, "zero wall_time_ms columns for byte-stable output");
  cmd->set_config("--config", "", "flat key=value config file; flags override");
}

int dispatch(int code) { return code; }

}  // namespace

int main(int argc, char** argv) {
  segra::init_log_level_from_env();

  CLI::App app{"segregation-aware rewiring of recommendation graphs"};
  app.require_subcommand(1);

  segra::RunConfig config;
  std::string discount_name = "uniform";

  auto* build = app.add_subcommand("build", "ingest relevance + labels into a graph dump");
  build->add_option("--relevance", config.relevance_path, "CSV src,dst,score")->required();
  build->add_option("--labels", config.labels_path, "CSV node,label")->required();
  build->add_option("--d", config.d, "out-degree")->required();
  add_common_options(build, config, discount_name);

  auto* optimize = app.add_subcommand("optimize", "run a rewiring algorithm on a graph dump");
  optimize->add_option("--graph", config.graph_path, "CSV src,dst,rank,prob,score")->required();
  optimize->add_option("--relevance", config.relevance_path, "CSV src,dst,score")->required();
  optimize->add_option("--labels", config.labels_path, "CSV node,label")->required();
  optimize->add_option("--algorithm", config.algorithm, "heu | bsl1 | bsl2 | rnd | brute")
      ->check(CLI::IsMember({"heu", "bsl1", "bsl2", "rnd", "brute"}));
  optimize->add_flag("--dump-z", config.dump_z, "also write z_before.csv / z_after.csv");
  add_common_options(optimize, config, discount_name);

  auto* verify = app.add_subcommand("verify", "cross-check solver, rank-one updates and walks");
  verify->add_option("--graph", config.graph_path, "CSV src,dst,rank,prob,score")->required();
  verify->add_option("--relevance", config.relevance_path, "CSV src,dst,score")->required();
  verify->add_option("--labels", config.labels_path, "CSV node,label")->required();
  verify->add_option("--samples", config.samples, "sampled ops / nodes per check");
  verify->add_option("--trials", config.trials, "Monte-Carlo walks per node");
  add_common_options(verify, config, discount_name);

  auto* gadget = app.add_subcommand("gadget", "vertex-cover reduction fixture, end to end");
  gadget->add_option("--edges", config.edges_path, "undirected edge list, one 'a b' pair per line")
      ->required();
  add_common_options(gadget, config, discount_name);

  CLI11_PARSE(app, argc, argv);

  try {
    config.discount = segra::discount_kind_from_string(discount_name);
    if (build->parsed()) return dispatch(segra::run_build(config));
    if (optimize->parsed()) return dispatch(segra::run_optimize(config));
    if (verify->parsed()) return dispatch(segra::run_verify(config));
    if (gadget->parsed()) return dispatch(segra::run_gadget(config));
  } catch (const segra::NotConverged& e) {
    SEGRA_LOG_ERROR("%s", e.what());
    return segra::kExitNotConverged;
  } catch (const segra::UnreachableHarmfulComponent& e) {
    SEGRA_LOG_ERROR("%s", e.what());
    return segra::kExitValidation;
  } catch (const segra::TooFewCandidates& e) {
    SEGRA_LOG_ERROR("%s", e.what());
    return segra::kExitValidation;
  } catch (const segra::InvalidScore& e) {
    SEGRA_LOG_ERROR("%s", e.what());
    return segra::kExitValidation;
  } catch (const segra::ConfigError& e) {
    SEGRA_LOG_ERROR("%s", e.what());
    return segra::kExitUsage;
  } catch (const segra::IoError& e) {
    SEGRA_LOG_ERROR("%s", e.what());
    return segra::kExitUsage;
  } catch (const std::exception& e) {
    SEGRA_LOG_ERROR("%s", e.what());
    return segra::kExitUsage;
  }
  return segra::kExitUsage;
}
