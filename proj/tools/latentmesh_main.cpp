// latentmesh command-line driver: sample cascades, infer transmission
// rates, train embeddings and run the evaluation experiments, glued
// together by a flat "key = value" config file that CLI flags override.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "latentmesh/diffusion.hpp"
#include "latentmesh/eval.hpp"
#include "latentmesh/graph.hpp"
#include "latentmesh/inference.hpp"
#include "latentmesh/laae.hpp"
#include "latentmesh/rng.hpp"
#include "latentmesh/text_format.hpp"

using json = nlohmann::ordered_json;
using namespace latentmesh;

namespace {

struct PipelineConfig {
  // Paths.
  std::string edges;
  std::string cascades = "cascades.txt";
  std::string matrix = "matrix.txt";
  std::string embeddings = "embeddings.txt";
  std::string history = "history.txt";
  std::string metrics = "metrics.json";
  std::string labels;

  // Graph / diffusion.
  bool directed = false;
  double window = 10.0;
  double rate = 1.0;
  int repetitions = 1;

  // Inference.
  double tau = 0.0;
  std::string likelihood = "paper";  // or "survival"
  bool mle = false;
  int mle_steps = 50;
  double mle_step_size = 1e-4;

  // Training (mirrors TrainConfig).
  TrainConfig train;

  // Ablations.
  bool no_latent = false;
  bool no_adversarial = false;

  // Evaluation.
  double fraction = 0.5;  // 0 disables the link-prediction stage
  std::string op = "hadamard";  // or "weighted-l2"
  std::string ratios = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9";
  int runs = 10;

  std::uint64_t seed = 42;

  // Sweep.
  std::string dims = "8,16,32,64,128,256";
};

class UsageError : public std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw UsageError("bad " + what + " entry: '" + tok + "'");
    }
  }
  if (out.empty()) throw UsageError(what + " list is empty");
  return out;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& what) {
  std::vector<int> out;
  for (double v : parse_double_list(text, what)) {
    if (v < 1 || v != static_cast<int>(v))
      throw UsageError(what + " entries must be positive integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

LikelihoodMode parse_mode(const std::string& name) {
  if (name == "survival") return LikelihoodMode::Survival;
  if (name == "paper") return LikelihoodMode::PaperLiteral;
  throw UsageError("unknown likelihood mode: '" + name + "' (survival|paper)");
}

EdgeOperator parse_operator(const std::string& name) {
  if (name == "hadamard") return EdgeOperator::Hadamard;
  if (name == "weighted-l2") return EdgeOperator::WeightedL2;
  throw UsageError("unknown edge operator: '" + name + "' (hadamard|weighted-l2)");
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw UsageError("bad boolean for '" + key + "': '" + v + "'");
}

// Ordered list of (key, setter/getter) pairs shared by the config-file
// loader, print-config and the config echo.
struct ConfigField {
  std::string key;
  std::function<void(PipelineConfig&, const std::string&)> set;
  std::function<std::string(const PipelineConfig&)> get;
};

const std::vector<ConfigField>& config_fields() {
  auto str = [](std::string PipelineConfig::*m) {
    return ConfigField{"", [m](PipelineConfig& c, const std::string& v) { c.*m = v; },
                       [m](const PipelineConfig& c) { return c.*m; }};
  };
  auto dbl = [](double PipelineConfig::*m) {
    return ConfigField{"",
                       [m](PipelineConfig& c, const std::string& v) {
                         try {
                           c.*m = std::stod(v);
                         } catch (const std::exception&) {
                           throw UsageError("bad real value: '" + v + "'");
                         }
                       },
                       [m](const PipelineConfig& c) { return format_real(c.*m); }};
  };
  auto iv = [](int PipelineConfig::*m) {
    return ConfigField{"",
                       [m](PipelineConfig& c, const std::string& v) {
                         try {
                           c.*m = std::stoi(v);
                         } catch (const std::exception&) {
                           throw UsageError("bad integer value: '" + v + "'");
                         }
                       },
                       [m](const PipelineConfig& c) { return std::to_string(c.*m); }};
  };
  auto bl = [](bool PipelineConfig::*m) {
    return ConfigField{"",
                       [m](PipelineConfig& c, const std::string& v) {
                         c.*m = parse_bool(v, "bool");
                       },
                       [m](const PipelineConfig& c) { return (c.*m) ? "true" : "false"; }};
  };
  auto tdbl = [](double TrainConfig::*m) {
    return ConfigField{"",
                       [m](PipelineConfig& c, const std::string& v) {
                         try {
                           c.train.*m = std::stod(v);
                         } catch (const std::exception&) {
                           throw UsageError("bad real value: '" + v + "'");
                         }
                       },
                       [m](const PipelineConfig& c) { return format_real(c.train.*m); }};
  };
  auto tint = [](int TrainConfig::*m) {
    return ConfigField{"",
                       [m](PipelineConfig& c, const std::string& v) {
                         try {
                           c.train.*m = std::stoi(v);
                         } catch (const std::exception&) {
                           throw UsageError("bad integer value: '" + v + "'");
                         }
                       },
                       [m](const PipelineConfig& c) { return std::to_string(c.train.*m); }};
  };

  auto named = [](ConfigField f, const std::string& key) {
    f.key = key;
    return f;
  };

  static const std::vector<ConfigField> fields = {
      named(str(&PipelineConfig::edges), "edges"),
      named(str(&PipelineConfig::cascades), "cascades"),
      named(str(&PipelineConfig::matrix), "matrix"),
      named(str(&PipelineConfig::embeddings), "embeddings"),
      named(str(&PipelineConfig::history), "history"),
      named(str(&PipelineConfig::metrics), "metrics"),
      named(str(&PipelineConfig::labels), "labels"),
      named(bl(&PipelineConfig::directed), "directed"),
      named(dbl(&PipelineConfig::window), "window"),
      named(dbl(&PipelineConfig::rate), "rate"),
      named(iv(&PipelineConfig::repetitions), "repetitions"),
      named(dbl(&PipelineConfig::tau), "tau"),
      named(str(&PipelineConfig::likelihood), "likelihood"),
      named(bl(&PipelineConfig::mle), "mle"),
      named(iv(&PipelineConfig::mle_steps), "mle_steps"),
      named(dbl(&PipelineConfig::mle_step_size), "mle_step_size"),
      named(tint(&TrainConfig::d), "d"),
      named(tint(&TrainConfig::z_dim), "z_dim"),
      named(tdbl(&TrainConfig::lambda1), "lambda1"),
      named(tdbl(&TrainConfig::lambda2), "lambda2"),
      named(tdbl(&TrainConfig::clip_c), "clip_c"),
      named(tint(&TrainConfig::batch), "batch"),
      named(tint(&TrainConfig::iterations), "iterations"),
      named(tint(&TrainConfig::critic_steps), "critic_steps"),
      named(tint(&TrainConfig::hidden), "hidden"),
      named(tint(&TrainConfig::hidden_adv), "hidden_adv"),
      named(tdbl(&TrainConfig::lr_ae), "lr_ae"),
      named(tdbl(&TrainConfig::lr_critic), "lr_critic"),
      named(bl(&PipelineConfig::no_latent), "no_latent"),
      named(bl(&PipelineConfig::no_adversarial), "no_adversarial"),
      named(dbl(&PipelineConfig::fraction), "fraction"),
      named(str(&PipelineConfig::op), "operator"),
      named(str(&PipelineConfig::ratios), "ratios"),
      named(iv(&PipelineConfig::runs), "runs"),
      named(str(&PipelineConfig::dims), "dims"),
      named(ConfigField{"",
                        [](PipelineConfig& c, const std::string& v) {
                          try {
                            c.seed = std::stoull(v);
                          } catch (const std::exception&) {
                            throw UsageError("bad seed: '" + v + "'");
                          }
                        },
                        [](const PipelineConfig& c) { return std::to_string(c.seed); }},
            "seed"),
  };
  return fields;
}

void load_config_file(PipelineConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError(path + ":" + std::to_string(line_no) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    bool found = false;
    for (const ConfigField& f : config_fields()) {
      if (f.key != key) continue;
      f.set(cfg, value);
      found = true;
      break;
    }
    if (!found)
      throw UsageError(path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
  }
}

json config_echo(const PipelineConfig& cfg) {
  json echo = json::object();
  for (const ConfigField& f : config_fields()) echo[f.key] = f.get(cfg);
  return echo;
}

json roc_json(const std::vector<RocPoint>& roc) {
  json arr = json::array();
  for (const RocPoint& p : roc) arr.push_back(json::array({p.fpr, p.tpr}));
  return arr;
}

json metrics_json(const MetricsReport& rep, const PipelineConfig& cfg) {
  json out;
  out["auc"] = rep.auc;
  out["roc"] = roc_json(rep.roc);
  out["micro_f1"] = rep.micro_f1;
  out["macro_f1"] = rep.macro_f1;
  json per_ratio = json::object();
  for (const auto& [ratio, mm] : rep.per_ratio)
    per_ratio[format_real(ratio)] = {{"micro", mm.first}, {"macro", mm.second}};
  out["per_ratio"] = per_ratio;
  out["config_echo"] = config_echo(cfg);
  return out;
}

void write_json_file(const json& doc, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << doc.dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<int> read_labels_file(const std::string& path, int num_nodes) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open labels file: " + path);
  std::vector<int> labels(num_nodes, -1);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    int node, label;
    if (!(ss >> node)) continue;
    if (!(ss >> label))
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected 'node label'");
    if (node < 0 || node >= num_nodes)
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": node id out of range");
    labels[node] = label;
  }
  for (int i = 0; i < num_nodes; ++i)
    if (labels[i] < 0) throw std::runtime_error(path + ": no label for node " + std::to_string(i));
  return labels;
}

Graph load_graph(const PipelineConfig& cfg) {
  if (cfg.edges.empty()) throw UsageError("no edge file given (key 'edges' or --edges)");
  return load_edge_list_file(cfg.edges, cfg.directed);
}

// ---------------------------------------------------------------------
// Stages.

CascadeSet stage_sample(const PipelineConfig& cfg, const Graph& g, bool write) {
  CascadeSet set = sample_cascades(g, cfg.rate, cfg.window, cfg.repetitions, cfg.seed);
  if (write) write_cascades_file(set, cfg.cascades);
  double mean_size = 0.0;
  for (const Cascade& c : set.cascades) mean_size += static_cast<double>(c.events.size());
  if (!set.cascades.empty()) mean_size /= static_cast<double>(set.cascades.size());
  std::printf("sampled K=%zu cascades, mean size %s\n", set.cascades.size(),
              format_real(mean_size).c_str());
  return set;
}

TransmissionMatrix stage_infer(const PipelineConfig& cfg, const Graph& g,
                               const CascadeSet& set, bool write) {
  TransmissionMatrix w = closed_form_estimate(set, cfg.tau);
  if (cfg.mle) w = mle_estimate(set, w, cfg.mle_steps, cfg.mle_step_size,
                                parse_mode(cfg.likelihood));
  if (write) write_transmission_matrix_file(w, cfg.matrix);
  long nonzero = 0, latent = 0;
  for (int i = 0; i < w.num_nodes; ++i)
    for (int j = 0; j < w.num_nodes; ++j) {
      if (w.values(i, j) <= 0.0) continue;
      ++nonzero;
      if (!g.has_edge(i, j)) ++latent;
    }
  if (nonzero == 0) std::fprintf(stderr, "warning: inferred matrix is empty (tau too large?)\n");
  std::printf("inferred %ld nonzero rates, %ld latent ties\n", nonzero, latent);
  return w;
}

TrainResult stage_embed(const PipelineConfig& cfg, const Graph& g, const TransmissionMatrix* w,
                        bool write) {
  TrainConfig tc = cfg.train;
  tc.seed = cfg.seed;
  if (cfg.no_adversarial) tc.lambda2 = 0.0;

  Eigen::MatrixXd x, wsym;
  if (cfg.no_latent || w == nullptr) {
    TransmissionMatrix adj{g.num_nodes(), adjacency_matrix(g)};
    x = feature_matrix(adj);
    wsym = symmetric_weights(adj);
  } else {
    x = feature_matrix(*w);
    wsym = symmetric_weights(*w);
  }
  TrainResult res = train(x, wsym, tc);
  if (write) {
    write_embeddings_file(res.embeddings, cfg.embeddings);
    write_history_file(res.history, cfg.history);
  }
  std::printf("trained %d iterations, final L_glo %s\n", tc.iterations,
              format_real(res.history.empty() ? 0.0 : res.history.back().global).c_str());
  return res;
}

MetricsReport run_pipeline(const PipelineConfig& cfg) {
  Graph g = load_graph(cfg);
  MetricsReport rep;

  if (cfg.fraction > 0.0) {
    EdgeSplit split = split_edges(g, cfg.fraction, Rng::mix(cfg.seed, 0x5e11));
    CascadeSet set;
    TransmissionMatrix w;
    const TransmissionMatrix* wp = nullptr;
    const bool persist = cfg.labels.empty();  // full-graph chain wins otherwise
    if (!cfg.no_latent) {
      set = stage_sample(cfg, split.train_graph, persist);
      w = stage_infer(cfg, split.train_graph, set, persist);
      wp = &w;
    }
    TrainResult res = stage_embed(cfg, split.train_graph, wp, persist);
    MetricsReport link = link_prediction_experiment(g, res.embeddings, split,
                                                    parse_operator(cfg.op),
                                                    Rng::mix(cfg.seed, 0x11a));
    rep.auc = link.auc;
    rep.roc = link.roc;
  }

  if (!cfg.labels.empty()) {
    std::vector<int> labels = read_labels_file(cfg.labels, g.num_nodes());
    CascadeSet set;
    TransmissionMatrix w;
    const TransmissionMatrix* wp = nullptr;
    if (!cfg.no_latent) {
      set = stage_sample(cfg, g, true);
      w = stage_infer(cfg, g, set, true);
      wp = &w;
    }
    TrainResult res = stage_embed(cfg, g, wp, true);
    MetricsReport cls = node_classification_experiment(
        res.embeddings, labels, parse_double_list(cfg.ratios, "ratios"), cfg.runs,
        Rng::mix(cfg.seed, 0xc1a));
    rep.micro_f1 = cls.micro_f1;
    rep.macro_f1 = cls.macro_f1;
    rep.per_ratio = cls.per_ratio;
  }

  if (cfg.fraction <= 0.0 && cfg.labels.empty())
    throw UsageError("pipeline needs fraction > 0 and/or a labels file");
  return rep;
}

int classify_exit(const std::exception& e) {
  if (dynamic_cast<const UsageError*>(&e)) return 1;
  if (dynamic_cast<const std::invalid_argument*>(&e)) return 1;
  const std::string msg = e.what();
  if (msg.find("non-finite") != std::string::npos || msg.find("overflow") != std::string::npos)
    return 3;
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"latentmesh: latent network embeddings from diffusion cascades"};
  app.require_subcommand(1);

  PipelineConfig cfg;

  // The config file must apply before flag overrides, so scan for it
  // ahead of the main parse.
  try {
    for (int i = 1; i < argc; ++i) {
      const std::string arg = argv[i];
      if (arg == "--config" && i + 1 < argc)
        load_config_file(cfg, argv[i + 1]);
      else if (arg.rfind("--config=", 0) == 0)
        load_config_file(cfg, arg.substr(9));
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return classify_exit(e);
  }

  std::string config_path;  // consumed above; registered so CLI11 accepts it
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "flat key = value config file");
    sub->add_option("--edges", cfg.edges, "edge list file");
    sub->add_flag("--directed", cfg.directed, "treat the edge list as directed");
    sub->add_option("--seed", cfg.seed, "master seed");
    sub->add_option("--metrics", cfg.metrics, "metrics JSON output path");
  };

  CLI::App* c_sample = app.add_subcommand("sample", "simulate diffusion cascades");
  add_common(c_sample);
  c_sample->add_option("--cascades", cfg.cascades, "cascade output file");
  c_sample->add_option("--window", cfg.window, "observation window T");
  c_sample->add_option("--rate", cfg.rate, "edge transmission rate");
  c_sample->add_option("--repetitions", cfg.repetitions, "cascades per root");

  CLI::App* c_infer = app.add_subcommand("infer", "estimate the transmission matrix");
  add_common(c_infer);
  c_infer->add_option("--cascades", cfg.cascades, "cascade input file");
  c_infer->add_option("--matrix", cfg.matrix, "matrix output file");
  c_infer->add_option("--tau", cfg.tau, "sparsification threshold");
  c_infer->add_flag("--mle", cfg.mle, "refine by projected gradient ascent");
  c_infer->add_option("--mle-steps", cfg.mle_steps, "ascent steps");
  c_infer->add_option("--mle-step-size", cfg.mle_step_size, "ascent step size");
  c_infer->add_option("--likelihood", cfg.likelihood, "survival|paper");

  CLI::App* c_embed = app.add_subcommand("embed", "train the auto-encoder embeddings");
  add_common(c_embed);
  c_embed->add_option("--matrix", cfg.matrix, "matrix input file");
  c_embed->add_option("--embeddings", cfg.embeddings, "embedding output file");
  c_embed->add_option("--history", cfg.history, "loss history output file");
  c_embed->add_option("--d", cfg.train.d, "embedding dimension");
  c_embed->add_option("--iterations", cfg.train.iterations, "training iterations");
  c_embed->add_option("--batch", cfg.train.batch, "batch size");
  c_embed->add_option("--lambda1", cfg.train.lambda1, "local-loss weight");
  c_embed->add_option("--lambda2", cfg.train.lambda2, "adversarial weight");
  c_embed->add_flag("--no-latent", cfg.no_latent, "use the adjacency matrix instead of W");
  c_embed->add_flag("--no-adversarial", cfg.no_adversarial, "set lambda2 = 0");

  CLI::App* c_link = app.add_subcommand("eval-link", "link-prediction metrics");
  add_common(c_link);
  c_link->add_option("--embeddings", cfg.embeddings, "embedding input file");
  c_link->add_option("--fraction", cfg.fraction, "removed edge fraction");
  c_link->add_option("--operator", cfg.op, "hadamard|weighted-l2");

  CLI::App* c_class = app.add_subcommand("eval-class", "node-classification metrics");
  add_common(c_class);
  c_class->add_option("--embeddings", cfg.embeddings, "embedding input file");
  c_class->add_option("--labels", cfg.labels, "node label file");
  c_class->add_option("--ratios", cfg.ratios, "comma-separated training ratios");
  c_class->add_option("--runs", cfg.runs, "splits per ratio");

  CLI::App* c_pipe = app.add_subcommand("pipeline", "run every stage end to end");
  add_common(c_pipe);
  c_pipe->add_option("--labels", cfg.labels, "node label file (enables classification)");
  c_pipe->add_option("--fraction", cfg.fraction, "removed edge fraction (0 disables)");
  c_pipe->add_option("--operator", cfg.op, "hadamard|weighted-l2");
  c_pipe->add_option("--d", cfg.train.d, "embedding dimension");
  c_pipe->add_option("--iterations", cfg.train.iterations, "training iterations");
  c_pipe->add_flag("--no-latent", cfg.no_latent, "ablation: adjacency features");
  c_pipe->add_flag("--no-adversarial", cfg.no_adversarial, "ablation: lambda2 = 0");
  c_pipe->add_flag("--mle", cfg.mle, "refine inference by gradient ascent");

  CLI::App* c_sweep = app.add_subcommand("sweep", "pipeline across embedding dimensions");
  add_common(c_sweep);
  c_sweep->add_option("--labels", cfg.labels, "node label file");
  c_sweep->add_option("--fraction", cfg.fraction, "removed edge fraction");
  c_sweep->add_option("--dims", cfg.dims, "comma-separated dimension list");

  CLI::App* c_print = app.add_subcommand("print-config", "print the resolved configuration");
  c_print->add_option("--config", config_path, "flat key = value config file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (*c_print) {
      for (const ConfigField& f : config_fields())
        std::printf("%s = %s\n", f.key.c_str(), f.get(cfg).c_str());
      return 0;
    }
    if (*c_sample) {
      Graph g = load_graph(cfg);
      stage_sample(cfg, g, true);
      return 0;
    }
    if (*c_infer) {
      Graph g = load_graph(cfg);
      CascadeSet set = read_cascades_file(cfg.cascades);
      stage_infer(cfg, g, set, true);
      return 0;
    }
    if (*c_embed) {
      Graph g = load_graph(cfg);
      if (cfg.no_latent) {
        stage_embed(cfg, g, nullptr, true);
      } else {
        TransmissionMatrix w = read_transmission_matrix_file(cfg.matrix);
        stage_embed(cfg, g, &w, true);
      }
      return 0;
    }
    if (*c_link) {
      Graph g = load_graph(cfg);
      Eigen::MatrixXd emb = read_embeddings_file(cfg.embeddings);
      EdgeSplit split = split_edges(g, cfg.fraction, Rng::mix(cfg.seed, 0x5e11));
      MetricsReport rep = link_prediction_experiment(g, emb, split, parse_operator(cfg.op),
                                                     Rng::mix(cfg.seed, 0x11a));
      write_json_file(metrics_json(rep, cfg), cfg.metrics);
      std::printf("auc %s -> %s\n", format_real(rep.auc).c_str(), cfg.metrics.c_str());
      return 0;
    }
    if (*c_class) {
      Eigen::MatrixXd emb = read_embeddings_file(cfg.embeddings);
      std::vector<int> labels = read_labels_file(cfg.labels, static_cast<int>(emb.rows()));
      MetricsReport rep = node_classification_experiment(
          emb, labels, parse_double_list(cfg.ratios, "ratios"), cfg.runs,
          Rng::mix(cfg.seed, 0xc1a));
      write_json_file(metrics_json(rep, cfg), cfg.metrics);
      std::printf("micro %s macro %s -> %s\n", format_real(rep.micro_f1).c_str(),
                  format_real(rep.macro_f1).c_str(), cfg.metrics.c_str());
      return 0;
    }
    if (*c_pipe) {
      MetricsReport rep = run_pipeline(cfg);
      write_json_file(metrics_json(rep, cfg), cfg.metrics);
      std::printf("metrics -> %s\n", cfg.metrics.c_str());
      return 0;
    }
    if (*c_sweep) {
      json out;
      json per_dim = json::object();
      for (int d : parse_int_list(cfg.dims, "dims")) {
        PipelineConfig run_cfg = cfg;
        run_cfg.train.d = d;
        run_cfg.train.z_dim = 0;
        MetricsReport rep = run_pipeline(run_cfg);
        json entry = metrics_json(rep, run_cfg);
        entry.erase("config_echo");
        per_dim[std::to_string(d)] = entry;
        std::printf("d=%d done\n", d);
      }
      out["per_dim"] = per_dim;
      out["config_echo"] = config_echo(cfg);
      write_json_file(out, cfg.metrics);
      std::printf("metrics -> %s\n", cfg.metrics.c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return classify_exit(e);
  }
  return 1;
}
