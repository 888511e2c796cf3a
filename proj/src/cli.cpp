// Copyright 2026 The vmhan Authors.
// SPDX-License-Identifier: Apache-2.0

#include "vmhan/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "vmhan/dataio.hpp"
#include "vmhan/error.hpp"
#include "vmhan/parallel.hpp"
#include "vmhan/probe.hpp"
#include "vmhan/synth.hpp"
#include "vmhan/trainer.hpp"

namespace vmhan {

namespace fs = std::filesystem;

namespace {

std::string fixed(double v, int digits = 4) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string format_metrics(const Metrics& m) {
  return "accuracy=" + fixed(m.accuracy) + " precision=" + fixed(m.precision) +
         " recall=" + fixed(m.recall) + " f1=" + fixed(m.f1) +
         " n=" + std::to_string(m.count);
}

// VMHAN_THREADS wins over the config file when it is set.
int effective_threads(int from_config) {
  return std::getenv("VMHAN_THREADS") ? configured_threads() : from_config;
}

Dataset load_dataset(const fs::path& manifest, const ModelConfig& config) {
  return build_dataset(load_manifest(manifest, config.relations), config);
}

struct SynthArgs {
  std::string out;
  SynthConfig config;
  std::string mode = "cross";
  std::vector<std::size_t> split;
};

struct TrainArgs {
  std::string manifest;
  std::string val;
  std::string config;
  std::string vocab;
  std::string out;
  std::string log;
};

struct ModelArgs {
  std::string manifest;
  std::string model;
  std::string out;
};

struct InspectArgs {
  std::string manifest;
  std::string id;
  std::size_t k = 3;
  bool no_inter_modal = false;
};

int run_synth(const SynthArgs& a, std::ostream& out) {
  SynthConfig config = a.config;
  config.mode = parse_synth_mode(a.mode);
  const SynthOutput result = generate_synth(config, a.out);
  out << "wrote " << config.n << " instances to " << result.manifest.string()
      << '\n';
  out << "label counts";
  for (std::size_t c : result.label_counts) out << ' ' << c;
  out << '\n';
  if (!a.split.empty()) {
    for (const auto& part : split_manifest(result.manifest, a.split)) {
      out << "split " << part.string() << '\n';
    }
  }
  return 0;
}

int run_train(const TrainArgs& a, std::ostream& out) {
  ExperimentConfig exp = a.config.empty()
                             ? parse_experiment_config("")
                             : load_experiment_config(a.config);
  exp.model.relations = load_vocabulary(
      a.vocab.empty() ? default_vocabulary_path(a.manifest) : fs::path(a.vocab));
  exp.model.validate();
  exp.train.threads = effective_threads(exp.train.threads);

  const Dataset train_set = load_dataset(a.manifest, exp.model);
  const Dataset val_set =
      a.val.empty() ? Dataset{} : load_dataset(a.val, exp.model);

  TrainConfig chosen = exp.train;
  if (!exp.train.grid.empty()) {
    if (val_set.empty()) {
      throw ValidationError("a grid search needs --val");
    }
    const GridResult grid =
        grid_search(exp.model, train_set, val_set, exp.train);
    for (std::size_t i = 0; i < grid.trials.size(); ++i) {
      const auto& trial = grid.trials[i];
      out << "grid";
      for (const auto& [key, value] : trial.point) out << ' ' << key << '=' << value;
      out << " val_f1=" << fixed(trial.validation.f1)
          << (i == grid.best_index ? " *" : "") << '\n';
    }
    chosen = grid.best;
  }

  std::ofstream log;
  if (!a.log.empty()) {
    log.open(a.log, std::ios::trunc);
    if (!log) throw ValidationError("cannot write log '" + a.log + "'");
  }
  const TrainResult result =
      train(exp.model, train_set, val_set, chosen, [&](const EpochRecord& r) {
        if (log.is_open()) log << to_json_line(r) << '\n' << std::flush;
      });
  save_snapshot(a.out, result.model);
  out << "trained " << result.history.size() << " epochs, best epoch "
      << result.best_epoch << '\n';
  if (!result.history.empty()) {
    out << "final loss " << fixed(result.history.back().loss, 6) << '\n';
  }
  out << "saved " << a.out << '\n';
  return 0;
}

int run_eval(const ModelArgs& a, std::ostream& out) {
  const VmHanModel model = load_snapshot(a.model);
  const Dataset data = load_dataset(a.manifest, model.config());
  out << format_metrics(evaluate(model, data, configured_threads())) << '\n';
  return 0;
}

int run_predict(const ModelArgs& a, std::ostream& out) {
  const VmHanModel model = load_snapshot(a.model);
  const Dataset data = load_dataset(a.manifest, model.config());
  const auto preds = predict_all(model, data, configured_threads());
  std::ofstream file(a.out, std::ios::trunc);
  if (!file) throw ValidationError("cannot write '" + a.out + "'");
  for (std::size_t i = 0; i < data.size(); ++i) {
    nlohmann::ordered_json j;
    j["id"] = data[i].id;
    j["label"] = model.config().relations.label(preds[i].label);
    j["probability"] = preds[i].probability;
    file << j.dump() << '\n';
  }
  out << "wrote " << data.size() << " predictions to " << a.out << '\n';
  return 0;
}

int run_gradcheck(const ModelGradcheckCase& c, std::ostream& out) {
  const GradcheckReport report = gradcheck_model(c);
  out << "checked " << report.checked << " components\n";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3e", report.max_rel_error);
  out << "max rel err " << buf << " (" << report.worst_param << '['
      << report.worst_index << "])\n";
  out << (report.passed ? "PASS" : "FAIL") << '\n';
  return report.passed ? 0 : 1;
}

int run_inspect(const InspectArgs& a, std::ostream& out) {
  const fs::path vocab_path = default_vocabulary_path(a.manifest);
  const Manifest manifest =
      load_manifest(a.manifest, load_vocabulary(vocab_path));
  const auto it =
      std::find_if(manifest.records.begin(), manifest.records.end(),
                   [&](const ManifestRecord& r) { return r.id == a.id; });
  if (it == manifest.records.end()) {
    throw ValidationError("no instance with id '" + a.id + "'");
  }

  ModelConfig config;
  config.relations = load_vocabulary(vocab_path);
  config.max_objects = a.k;
  config.inter_modal = !a.no_inter_modal;
  // Dimensions come from the instance itself so any corpus can be inspected.
  config.encoder.text_dim =
      probe_feature(manifest.base_dir / it->head_feature).back();
  config.encoder.visual_dim =
      probe_feature(manifest.base_dir / it->image_feature).back();
  const Dataset one = build_dataset(Manifest{manifest.base_dir, {*it}}, config);
  const MultiModalHypergraph& g = one.front().graph;

  out << "instance " << it->id << " relation " << it->relation << '\n';
  out << "nodes " << g.node_count() << '\n';
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const Node& n = g.node(i);
    out << "  n" << i << ' ' << to_string(n.kind) << ' '
        << (n.modality == Modality::Text ? "text" : "visual")
        << " dim=" << n.feature->size() << '\n';
  }
  out << "edges " << g.edge_count() << '\n';
  for (std::size_t j = 0; j < g.edge_count(); ++j) {
    out << "  e" << j << ' ' << to_string(g.edge(j).kind) << " {";
    const auto& members = g.edge(j).members;
    for (std::size_t m = 0; m < members.size(); ++m) {
      out << (m ? "," : "") << members[m];
    }
    out << "}\n";
  }
  const IncidenceMatrix h = incidence(g);
  out << "incidence\n    ";
  for (std::size_t j = 0; j < h.cols(); ++j) out << " e" << j;
  out << '\n';
  for (std::size_t i = 0; i < h.rows(); ++i) {
    out << "  n" << i;
    for (std::size_t j = 0; j < h.cols(); ++j) out << "  " << int(h(i, j));
    out << '\n';
  }
  out << "column sums";
  for (std::size_t s : h.column_sums()) out << ' ' << s;
  out << "\nincidences " << h.total() << '\n';
  return 0;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out,
                 std::ostream& err) {
  CLI::App app{"vmhan: multi-modal hypergraph relation extraction"};
  app.name("vmhan");
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "emit a synthetic dataset");
  s->add_option("--out", synth.out, "output directory")->required();
  s->add_option("--n", synth.config.n, "instances");
  s->add_option("--k", synth.config.k, "objects per instance");
  s->add_option("--relations", synth.config.relations, "relations (excl. none)");
  s->add_option("--mode", synth.mode, "cross|text");
  s->add_option("--seed", synth.config.seed, "seed");
  s->add_option("--noise", synth.config.noise, "feature noise scale");
  s->add_option("--scale", synth.config.scale, "feature norm per latent unit");
  s->add_option("--text-dim", synth.config.text_dim, "text feature dim");
  s->add_option("--visual-dim", synth.config.visual_dim, "visual feature dim");
  s->add_option("--split", synth.split,
                "consecutive part sizes, e.g. --split 500 200")
      ->expected(1, -1);

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "train a model");
  t->add_option("--manifest", tr.manifest, "training manifest")->required();
  t->add_option("--val", tr.val, "validation manifest");
  t->add_option("--config", tr.config, "key=value experiment config");
  t->add_option("--vocab", tr.vocab, "relation vocabulary file");
  t->add_option("--out", tr.out, "snapshot path")->required();
  t->add_option("--log", tr.log, "JSONL epoch log");

  ModelArgs ev;
  auto* e = app.add_subcommand("eval", "print metrics of a model");
  e->add_option("--manifest", ev.manifest, "manifest")->required();
  e->add_option("--model", ev.model, "snapshot")->required();

  ModelArgs pr;
  auto* p = app.add_subcommand("predict", "write per-instance predictions");
  p->add_option("--manifest", pr.manifest, "manifest")->required();
  p->add_option("--model", pr.model, "snapshot")->required();
  p->add_option("--out", pr.out, "JSONL output")->required();

  ModelGradcheckCase gc;
  auto* g = app.add_subcommand("gradcheck", "finite-difference gradient check");
  g->add_option("--d", gc.d, "hidden size");
  g->add_option("--k", gc.k, "objects");
  g->add_option("--seed", gc.seed, "seed");
  g->add_option("--step", gc.step, "difference step");
  g->add_option("--tol", gc.tol, "max relative error");
  g->add_option("--layers", gc.layers, "layers");
  g->add_option("--heads", gc.heads, "attention heads");

  InspectArgs in;
  auto* i = app.add_subcommand("inspect", "print one instance's hypergraph");
  i->add_option("--manifest", in.manifest, "manifest")->required();
  i->add_option("--id", in.id, "instance id")->required();
  i->add_option("--k", in.k, "objects kept");
  i->add_flag("--no-inter-modal", in.no_inter_modal, "drop inter-modal edges");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& ex) {
    err << "error: " << ex.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (s->parsed()) return run_synth(synth, out);
    if (t->parsed()) return run_train(tr, out);
    if (e->parsed()) return run_eval(ev, out);
    if (p->parsed()) return run_predict(pr, out);
    if (g->parsed()) return run_gradcheck(gc, out);
    if (i->parsed()) return run_inspect(in, out);
  } catch (const Error& ex) {
    err << "error: " << ex.what() << '\n';
    return 1;
  } catch (const fs::filesystem_error& ex) {
    err << "error: " << ex.what() << '\n';
    return 1;
  }
  return 2;
}

int cli_dispatch(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_dispatch(args, std::cout, std::cerr);
}

}  // namespace vmhan
