// Copyright 2026 The SeqRank Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// seqrank: train, evaluate and analyse sequential recommenders from the
// command line. Run `seqrank --help` for usage.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "seqrank/seqrank.hpp"

namespace fs = std::filesystem;
using namespace seqrank;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitDivergence = 4;
constexpr int kExitGradCheck = 5;

struct GlobalFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> threads;
};

void apply_overrides(RunConfig& c, const GlobalFlags& g) {
  if (g.seed) c.train.seed = *g.seed;
  if (g.out) c.out = *g.out;
  if (g.threads) c.eval.threads = *g.threads;
}

RunConfig require_config(const GlobalFlags& g, bool require_data) {
  if (g.config.empty()) throw ConfigError("this command needs --config <path>");
  RunConfig c = load_run_config(g.config, require_data);
  apply_overrides(c, g);
  if (c.eval.threads == 0) throw ConfigError("threads must be at least 1");
  return c;
}

std::ofstream open_out(const fs::path& path, bool binary = false) {
  std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
  if (!f) throw DataError("cannot write '" + path.string() + "'");
  return f;
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  auto f = open_out(path);
  f << j.dump(2) << '\n';
}

void print_warnings(const Dataset& ds) {
  for (const auto& w : ds.features.warnings) std::cerr << "warning: " << w << '\n';
}

// Loads the dataset for models needing the union of the given masks.
Dataset load_for(RunConfig& c, FeatureMask needs) {
  auto errs = path_problems(c, needs);
  if (!errs.empty()) {
    std::string msg = "invalid run config:";
    for (const auto& e : errs) msg += "\n  - " + e;
    throw ConfigError(msg);
  }
  Dataset ds = load_dataset(c);
  print_warnings(ds);
  return ds;
}

int cmd_train(const GlobalFlags& g) {
  RunConfig c = require_config(g, true);
  Dataset ds = load_for(c, c.hyper.mask);
  c.hyper.validate();
  fs::create_directories(c.out);
  const fs::path out(c.out);

  const nlohmann::json resolved = to_json(c);
  write_json(out / "resolved_config.json", resolved);
  std::cout << resolved.dump(2) << '\n';

  auto log = open_out(out / "train.log");
  log << "epoch\tmean_ln_sigma\tparam_norm\n";
  std::cout << "epoch\tmean_ln_sigma\tparam_norm\n";
  auto on_epoch = [&](const EpochStats& s) {
    std::ostringstream line;
    line << s.epoch << '\t' << std::setprecision(10) << s.mean_ln_sigma << '\t' << s.param_norm << '\n';
    log << line.str() << std::flush;
    std::cout << line.str() << std::flush;
  };
  auto ranker = train_ranker(c.kind, ds, c.hyper, c.train, on_epoch);
  const fs::path ckpt = out / (std::string(kind_name(c.kind)) + ".ckpt");
  save_checkpoint(ckpt.string(), ranker->to_checkpoint(ds));
  std::cout << "checkpoint: " << ckpt.string() << '\n';
  return kExitOk;
}

struct LoadedRanker {
  std::string name;
  Checkpoint ck;
  std::unique_ptr<Ranker> ranker;
};

std::vector<Checkpoint> read_checkpoints(const std::vector<std::string>& paths) {
  std::vector<Checkpoint> out;
  for (const auto& p : paths) {
    try {
      out.push_back(load_checkpoint(p));
    } catch (const DataError& e) {
      throw DataError("checkpoint '" + p + "': " + e.what());
    }
  }
  return out;
}

FeatureMask union_mask(const std::vector<Checkpoint>& cks) {
  FeatureMask m{false, false, false};
  for (const auto& ck : cks) {
    const auto k = FeatureMask::from_bits(ck.mask);
    m.latent = m.latent || k.latent;
    m.visual = m.visual || k.visual;
    m.textual = m.textual || k.textual;
  }
  return m;
}

int cmd_eval(const GlobalFlags& g, const std::string& checkpoint) {
  RunConfig c = require_config(g, false);
  auto cks = read_checkpoints({checkpoint});
  const Checkpoint& ck = cks.front();
  if (c.kind_explicit && kind_name(c.kind) != ck.kind)
    throw ConfigError("config model '" + std::string(kind_name(c.kind)) + "' does not match checkpoint kind '" +
                      ck.kind + "'");
  Dataset ds = load_for(c, union_mask(cks));
  auto ranker = ranker_from_checkpoint(ck, ds);
  const EvalReport rep = evaluate(*ranker, ds, c.eval);

  fs::create_directories(c.out);
  const fs::path out(c.out);
  const nlohmann::json j = to_json(rep);
  write_json(out / ("eval_" + ck.kind + ".json"), j);
  {
    auto f = open_out(out / ("eval_" + ck.kind + ".csv"));
    write_csv_header(f);
    write_csv(f, rep);
  }
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

std::pair<std::string, std::string> parse_pair(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == s.size())
    throw ConfigError("--pair expects model:baseline, got '" + s + "'");
  return {s.substr(0, colon), s.substr(colon + 1)};
}

int cmd_coldstart(const GlobalFlags& g, const std::vector<std::string>& checkpoints,
                  const std::vector<std::string>& pair_flags, std::optional<std::size_t> k_flag) {
  RunConfig c = require_config(g, false);
  auto cks = read_checkpoints(checkpoints);

  std::vector<std::string> names;
  std::map<std::string, int> seen;
  for (const auto& ck : cks) {
    const int n = ++seen[ck.kind];
    names.push_back(n == 1 ? ck.kind : ck.kind + "#" + std::to_string(n));
  }
  std::vector<std::pair<std::string, std::string>> pairs = c.pairs;
  if (!pair_flags.empty()) {
    pairs.clear();
    for (const auto& p : pair_flags) pairs.push_back(parse_pair(p));
  }
  if (pairs.empty()) {
    if (names.size() < 2) throw ConfigError("coldstart needs two checkpoints or an explicit --pair");
    pairs.emplace_back(names[0], names[1]);
  }
  std::vector<std::string> errs;
  for (const auto& [a, b] : pairs)
    for (const auto& n : {a, b})
      if (std::find(names.begin(), names.end(), n) == names.end())
        errs.push_back("pair member '" + n + "' is not among the loaded checkpoints");
  if (!errs.empty()) {
    std::string msg = "invalid cold-start pairs:";
    for (const auto& e : errs) msg += "\n  - " + e;
    throw ConfigError(msg);
  }
  const std::size_t k = k_flag.value_or(c.coldstart_k);
  if (k == 0) throw ConfigError("--k must be positive");

  Dataset ds = load_for(c, union_mask(cks));
  std::vector<NamedRankings> named;
  for (std::size_t r = 0; r < cks.size(); ++r) {
    auto ranker = ranker_from_checkpoint(cks[r], ds);
    named.push_back({names[r], rank_users(*ranker, ds, c.eval.threads)});
  }
  const ColdStartReport rep = cold_start_bins(ds.corpus, named, k, c.eval.bins, pairs);

  fs::create_directories(c.out);
  const fs::path out(c.out);
  const nlohmann::json j = to_json(rep);
  write_json(out / "coldstart.json", j);
  {
    auto f = open_out(out / "coldstart.csv");
    write_csv(f, rep);
  }
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_gradcheck(const GlobalFlags& g, double perturb) {
  GradCheckConfig gc;
  if (g.seed) gc.seed = *g.seed;
  gc.perturb = perturb;
  const auto reports = grad_check_all(gc);
  bool ok = true;
  nlohmann::json j = nlohmann::json::array();
  std::cout << "model\tblock\tmax_rel_error\tentries\tstatus\n";
  for (const auto& r : reports) {
    nlohmann::json blocks = nlohmann::json::array();
    for (const auto& b : r.blocks) {
      const bool pass = b.max_rel_error < r.tolerance;
      std::cout << r.model << '\t' << b.block << '\t' << std::scientific << std::setprecision(3) << b.max_rel_error
                << std::defaultfloat << '\t' << b.entries << '\t' << (pass ? "pass" : "FAIL") << '\n';
      blocks.push_back({{"block", b.block}, {"max_rel_error", b.max_rel_error}, {"entries", b.entries}});
    }
    ok = ok && r.passed();
    j.push_back({{"model", r.model}, {"passed", r.passed()}, {"blocks", blocks}});
  }
  if (g.out) {
    fs::create_directories(*g.out);
    write_json(fs::path(*g.out) / "gradcheck.json", j);
  }
  std::cout << (ok ? "gradcheck: pass" : "gradcheck: FAIL") << '\n';
  return ok ? kExitOk : kExitGradCheck;
}

int cmd_synth(const GlobalFlags& g) {
  SynthConfig sc;
  if (!g.config.empty()) {
    std::ifstream in(g.config);
    if (!in) throw ConfigError("cannot open config '" + g.config + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("config '" + g.config + "' is not valid JSON: " + e.what());
    }
    sc = synth_config_from_json(j);
  }
  if (g.seed) sc.seed = *g.seed;
  sc.validate();
  const std::string out = g.out.value_or("out");
  const SynthResult r = synth_corpus(sc);
  const SynthPaths p = write_synth(r, out);
  nlohmann::json resolved = sc;
  write_json(fs::path(out) / "synth_config.json", resolved);
  std::cout << resolved.dump(2) << '\n';
  std::cout << "sequences: " << p.sequences << " (" << r.sequences.user_ids.size() << " users)\n"
            << "visual: " << p.visual << " (" << r.visual.ids.size() << " items)\n"
            << "textual: " << p.textual << " (" << r.textual.ids.size() << " items)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sequential recommendation with visual and textual recurrent networks."};
  app.require_subcommand(1);
  GlobalFlags g;
  app.add_option("--config", g.config, "JSON run config (generator config for synth)");
  app.add_option("--seed", g.seed, "Override the seed");
  app.add_option("--out", g.out, "Output directory");
  app.add_option("--threads", g.threads, "Evaluation threads");

  auto* train = app.add_subcommand("train", "Fit a model and write a checkpoint plus training log");
  std::string eval_ckpt;
  auto* eval = app.add_subcommand("eval", "Rank test items and write metric reports");
  eval->add_option("--checkpoint", eval_ckpt, "Checkpoint to evaluate")->required();
  std::vector<std::string> cold_ckpts, cold_pairs;
  std::optional<std::size_t> cold_k;
  auto* cold = app.add_subcommand("coldstart", "Per-bin recall and growth rates for checkpoint pairs");
  cold->add_option("--checkpoint", cold_ckpts, "Checkpoint (repeatable)")->required();
  cold->add_option("--pair", cold_pairs, "model:baseline growth pair (repeatable)");
  cold->add_option("--k", cold_k, "Recall cutoff");
  double perturb = 0.0;
  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of every analytic gradient");
  gradcheck->add_option("--perturb", perturb)->group("");
  auto* synth = app.add_subcommand("synth", "Write a planted synthetic corpus");
  for (auto* sub : {train, eval, cold, gradcheck, synth}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*train) return cmd_train(g);
    if (*eval) return cmd_eval(g, eval_ckpt);
    if (*cold) return cmd_coldstart(g, cold_ckpts, cold_pairs, cold_k);
    if (*gradcheck) return cmd_gradcheck(g, perturb);
    if (*synth) return cmd_synth(g);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const SamplingError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
