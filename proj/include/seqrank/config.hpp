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

#ifndef SEQRANK_CONFIG_HPP_
#define SEQRANK_CONFIG_HPP_

// JSON run configuration for the command-line tool. Every field has an
// explicit default, and the resolved configuration (defaults filled in) is
// echoed back so a run can be reproduced from it alone.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "seqrank/baselines.hpp"
#include "seqrank/dataio.hpp"
#include "seqrank/error.hpp"
#include "seqrank/evaluator.hpp"
#include "seqrank/model.hpp"
#include "seqrank/trainer.hpp"

namespace seqrank {

struct RunConfig {
  std::string sequences;
  std::string visual;
  std::string textual;
  std::string out = "out";
  RankerKind kind = RankerKind::kVTRNN;
  bool kind_explicit = false;

  std::size_t min_len = 10;
  double split = 0.9;
  std::optional<std::size_t> visual_dim;   // taken from the file header when unset
  std::optional<std::size_t> textual_dim;
  double visual_lo = 0.0, visual_hi = 0.5;
  double textual_lo = -0.5, textual_hi = 0.5;

  Hyper hyper;
  TrainConfig train;
  EvalConfig eval;
  std::size_t coldstart_k = 30;
  std::vector<std::pair<std::string, std::string>> pairs;
};

namespace detail {

class ConfigReader {
 public:
  explicit ConfigReader(const nlohmann::json& j) : j_(j) {}

  std::vector<std::string> errors;

  template <typename F>
  void field(const char* key, F&& assign, const char* expected) {
    seen_.push_back(key);
    if (!j_.contains(key)) return;
    const auto& v = j_.at(key);
    if (!assign(v)) errors.push_back(std::string(key) + ": expected " + expected);
  }

  void count(const char* key, std::size_t& dst) {
    field(
        key,
        [&](const nlohmann::json& v) {
          if (!v.is_number_integer() || v.get<long long>() < 0) return false;
          dst = v.get<std::size_t>();
          return true;
        },
        "non-negative integer");
  }

  void optional_count(const char* key, std::optional<std::size_t>& dst) {
    field(
        key,
        [&](const nlohmann::json& v) {
          if (v.is_null()) return true;
          if (!v.is_number_integer() || v.get<long long>() < 0) return false;
          dst = v.get<std::size_t>();
          return true;
        },
        "non-negative integer or null");
  }

  void real(const char* key, double& dst) {
    field(
        key,
        [&](const nlohmann::json& v) {
          if (!v.is_number()) return false;
          dst = v.get<double>();
          return true;
        },
        "number");
  }

  void string(const char* key, std::string& dst) {
    field(
        key,
        [&](const nlohmann::json& v) {
          if (!v.is_string()) return false;
          dst = v.get<std::string>();
          return true;
        },
        "string");
  }

  void flag(const char* key, bool& dst) {
    field(
        key,
        [&](const nlohmann::json& v) {
          if (!v.is_boolean()) return false;
          dst = v.get<bool>();
          return true;
        },
        "boolean");
  }

  void counts(const char* key, std::vector<std::size_t>& dst) {
    field(
        key,
        [&](const nlohmann::json& v) {
          if (!v.is_array()) return false;
          std::vector<std::size_t> out;
          for (const auto& e : v) {
            if (!e.is_number_integer() || e.get<long long>() < 0) return false;
            out.push_back(e.get<std::size_t>());
          }
          dst = std::move(out);
          return true;
        },
        "array of non-negative integers");
  }

  void range(const char* key, double& lo, double& hi) {
    field(
        key,
        [&](const nlohmann::json& v) {
          if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) return false;
          lo = v[0].get<double>();
          hi = v[1].get<double>();
          return lo <= hi;
        },
        "[lo, hi] with lo <= hi");
  }

  void report_unknown() {
    for (const auto& [key, _] : j_.items())
      if (std::find(seen_.begin(), seen_.end(), key) == seen_.end()) errors.push_back("unknown key '" + key + "'");
  }

 private:
  const nlohmann::json& j_;
  std::vector<std::string> seen_;
};

inline void throw_if_errors(const std::vector<std::string>& errs, const std::string& what) {
  if (errs.empty()) return;
  std::string msg = what + ":";
  for (const auto& e : errs) msg += "\n  - " + e;
  throw ConfigError(msg);
}

}  // namespace detail

// Missing or nonexistent data paths for a model needing the given slices.
inline std::vector<std::string> path_problems(const RunConfig& c, FeatureMask needs) {
  namespace fs = std::filesystem;
  std::vector<std::string> errs;
  auto need = [&](const std::string& path, const char* key, bool required) {
    if (path.empty()) {
      if (required) errs.push_back(std::string(key) + ": path required by the configured model");
      return;
    }
    if (!fs::exists(path)) errs.push_back(std::string(key) + ": no such file '" + path + "'");
  };
  need(c.sequences, "sequences", true);
  need(c.visual, "visual", needs.visual);
  need(c.textual, "textual", needs.textual);
  return errs;
}

// Reads and validates a run configuration. All problems are collected and
// thrown together as one ConfigError. Paths are checked for existence only
// when require_data is set.
inline RunConfig run_config_from_json(const nlohmann::json& j, bool require_data = true) {
  if (!j.is_object()) throw ConfigError("run config must be a JSON object");
  RunConfig c;
  detail::ConfigReader r(j);
  r.string("sequences", c.sequences);
  r.string("visual", c.visual);
  r.string("textual", c.textual);
  r.string("out", c.out);
  r.field(
      "model",
      [&](const nlohmann::json& v) {
        if (!v.is_string()) return false;
        try {
          c.kind = parse_kind(v.get<std::string>());
          c.kind_explicit = true;
        } catch (const ConfigError&) {
          return false;
        }
        return true;
      },
      "one of random, pop, mf, bpr, vbpr, tbpr, vtbpr, rnn, vrnn, trnn, vtrnn");
  c.hyper.mask = mask_for(c.kind);
  c.hyper.alpha = default_alpha(c.kind);

  r.count("min_len", c.min_len);
  r.real("split", c.split);
  r.optional_count("visual_dim", c.visual_dim);
  r.optional_count("textual_dim", c.textual_dim);
  r.range("visual_range", c.visual_lo, c.visual_hi);
  r.range("textual_range", c.textual_lo, c.textual_hi);

  r.count("d", c.hyper.d);
  r.real("alpha", c.hyper.alpha);
  r.real("lambda_theta", c.hyper.lambda_theta);
  r.real("lambda_e", c.hyper.lambda_e);
  r.real("lambda_v", c.hyper.lambda_v);
  r.real("init_lo", c.hyper.init_lo);
  r.real("init_hi", c.hyper.init_hi);

  r.count("epochs", c.train.epochs);
  r.field(
      "seed",
      [&](const nlohmann::json& v) {
        if (!v.is_number_integer()) return false;
        c.train.seed = v.get<std::uint64_t>();
        return true;
      },
      "integer");
  r.flag("shuffle_users", c.train.shuffle_users);
  r.flag("frozen_negatives", c.train.frozen_negatives);
  r.field(
      "clip_norm",
      [&](const nlohmann::json& v) {
        if (v.is_null()) return true;
        if (!v.is_number()) return false;
        c.train.clip_norm = v.get<double>();
        return true;
      },
      "number or null");

  r.counts("cutoffs", c.eval.cutoffs);
  r.counts("bins", c.eval.bins);
  r.count("threads", c.eval.threads);
  r.count("coldstart_k", c.coldstart_k);
  r.field(
      "pairs",
      [&](const nlohmann::json& v) {
        if (!v.is_array()) return false;
        for (const auto& p : v) {
          if (!p.is_array() || p.size() != 2 || !p[0].is_string() || !p[1].is_string()) return false;
          c.pairs.emplace_back(p[0].get<std::string>(), p[1].get<std::string>());
        }
        return true;
      },
      "array of [model, baseline] name pairs");
  r.report_unknown();

  auto errs = std::move(r.errors);
  if (!(c.split > 0.0 && c.split < 1.0)) errs.push_back("split must lie in (0, 1)");
  if (c.min_len < 2) errs.push_back("min_len must be at least 2");
  if (c.coldstart_k == 0) errs.push_back("coldstart_k must be positive");
  for (auto& p : c.train.problems()) errs.push_back(std::move(p));
  for (auto& p : c.eval.problems()) errs.push_back(std::move(p));
  {
    // Feature dimensions are only known after reading files; validate the
    // remaining hyperparameters with placeholders.
    Hyper probe = c.hyper;
    probe.visual_dim = probe.textual_dim = 1;
    for (auto& p : probe.problems()) errs.push_back(std::move(p));
  }
  if (require_data)
    for (auto& p : path_problems(c, c.hyper.mask)) errs.push_back(std::move(p));
  detail::throw_if_errors(errs, "invalid run config");
  return c;
}

inline RunConfig load_run_config(const std::string& path, bool require_data = true) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return run_config_from_json(j, require_data);
}

// Fully resolved configuration, every default explicit.
inline nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["sequences"] = c.sequences;
  j["visual"] = c.visual;
  j["textual"] = c.textual;
  j["out"] = c.out;
  j["model"] = std::string(kind_name(c.kind));
  j["min_len"] = c.min_len;
  j["split"] = c.split;
  j["visual_dim"] = c.visual_dim ? nlohmann::json(*c.visual_dim) : nlohmann::json(nullptr);
  j["textual_dim"] = c.textual_dim ? nlohmann::json(*c.textual_dim) : nlohmann::json(nullptr);
  j["visual_range"] = {c.visual_lo, c.visual_hi};
  j["textual_range"] = {c.textual_lo, c.textual_hi};
  j["d"] = c.hyper.d;
  j["alpha"] = c.hyper.alpha;
  j["lambda_theta"] = c.hyper.lambda_theta;
  j["lambda_e"] = c.hyper.lambda_e;
  j["lambda_v"] = c.hyper.lambda_v;
  j["init_lo"] = c.hyper.init_lo;
  j["init_hi"] = c.hyper.init_hi;
  j["epochs"] = c.train.epochs;
  j["seed"] = c.train.seed;
  j["shuffle_users"] = c.train.shuffle_users;
  j["frozen_negatives"] = c.train.frozen_negatives;
  j["clip_norm"] = c.train.clip_norm ? nlohmann::json(*c.train.clip_norm) : nlohmann::json(nullptr);
  j["cutoffs"] = c.eval.cutoffs;
  j["bins"] = c.eval.bins;
  j["threads"] = c.eval.threads;
  j["coldstart_k"] = c.coldstart_k;
  auto pairs = nlohmann::json::array();
  for (const auto& [a, b] : c.pairs) pairs.push_back({a, b});
  j["pairs"] = pairs;
  return j;
}

// Dimension declared in a feature file's '#dims' header.
inline std::size_t peek_feature_dims(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open feature file '" + path + "'");
  std::string line;
  std::getline(in, line);
  std::istringstream hs(line);
  std::string tag;
  long long dims = -1;
  if (!(hs >> tag >> dims) || tag != "#dims" || dims < 0)
    throw ParseError(path, 1, "expected header '#dims <F>'");
  return static_cast<std::size_t>(dims);
}

// Loads the corpus and whichever feature files are configured; fills the
// feature dimensions into the config's Hyper.
inline Dataset load_dataset(RunConfig& c) {
  Dataset ds;
  ds.corpus = load_corpus(c.sequences, c.min_len, c.split);
  std::optional<FeatureTable> visual, textual;
  if (!c.visual.empty()) {
    if (!c.visual_dim) c.visual_dim = peek_feature_dims(c.visual);
    visual = load_features(c.visual, *c.visual_dim, c.visual_lo, c.visual_hi);
  }
  if (!c.textual.empty()) {
    if (!c.textual_dim) c.textual_dim = peek_feature_dims(c.textual);
    textual = load_features(c.textual, *c.textual_dim, c.textual_lo, c.textual_hi);
  }
  ds.features = attach_features(ds.corpus, visual ? &*visual : nullptr, textual ? &*textual : nullptr);
  c.hyper.visual_dim = ds.features.visual_dim();
  c.hyper.textual_dim = ds.features.textual_dim();
  return ds;
}

}  // namespace seqrank

#endif  // SEQRANK_CONFIG_HPP_
