#include "onto/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "onto/corpus.hpp"
#include "onto/errors.hpp"
#include "onto/features.hpp"
#include "onto/ontology.hpp"
#include "onto/textio.hpp"

namespace onto {

const char kSpaceFileName[] = "space.json";

namespace {

const std::vector<std::string> kModes = {"concept-detect", "concept-classify", "relation-detect",
                                         "relation-classify"};

// A float for the one-line summaries: always shows a decimal point so that
// whole numbers read as probabilities/scores ("1.0", not "1").
std::string show_double(double x) {
  std::string s = format_double(x);
  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
      s.find("inf") == std::string::npos && s.find("nan") == std::string::npos) {
    s += ".0";
  }
  return s;
}

std::string doc_id_for(const std::string& path) {
  const std::string stem = std::filesystem::path(path).stem().string();
  return stem.empty() ? "doc" : stem;
}

std::uint64_t config_u64(const std::string& key, const std::string& value) {
  bool ok = false;
  const std::uint64_t parsed = parse_u64(value, ok);
  if (!ok) {
    throw ConfigError("config key '" + key + "': expected an unsigned integer, got '" + value +
                      "'");
  }
  return parsed;
}

double config_double(const std::string& key, const std::string& value) {
  bool ok = false;
  const double parsed = parse_double(value, ok);
  if (!ok) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + value + "'");
  }
  return parsed;
}

std::vector<std::size_t> parse_layer_widths(const std::string& key, const std::string& value) {
  std::vector<std::size_t> widths;
  if (value.empty()) return widths;  // explicit empty list: softmax on raw input
  for (const std::string& field : split(value, ',')) {
    const std::uint64_t w = config_u64(key, field);
    if (w == 0) throw ConfigError("config key '" + key + "': layer width must be positive");
    widths.push_back(static_cast<std::size_t>(w));
  }
  return widths;
}

void apply_config_line(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "input") {
    cfg.input = value;
  } else if (key == "out") {
    cfg.out = value;
  } else if (key == "format") {
    cfg.format = value;
  } else if (key == "mode") {
    cfg.mode = value;
  } else if (key == "concepts") {
    cfg.concepts_path = value;
  } else if (key == "space") {
    cfg.space_path = value;
  } else if (key == "gold") {
    cfg.gold_path = value;
  } else if (key == "pred") {
    cfg.pred_path = value;
  } else if (key == "models") {
    cfg.models_dir = value;
  } else if (key == "ntriples") {
    cfg.ntriples_path = value;
  } else if (key == "seed") {
    cfg.seed = config_u64(key, value);
  } else if (key == "n_max") {
    cfg.concept_cfg.n_max = static_cast<std::size_t>(config_u64(key, value));
  } else if (key == "top_k") {
    cfg.concept_cfg.k = static_cast<std::size_t>(config_u64(key, value));
  } else if (key == "min_df") {
    cfg.concept_cfg.min_df = config_u64(key, value);
  } else if (key == "layers") {
    cfg.train_cfg.layer_widths = parse_layer_widths(key, value);
  } else if (key == "cd_k") {
    cfg.train_cfg.cd_k = static_cast<std::size_t>(config_u64(key, value));
  } else if (key == "pretrain_epochs") {
    cfg.train_cfg.pretrain_epochs = static_cast<std::size_t>(config_u64(key, value));
  } else if (key == "finetune_epochs") {
    cfg.train_cfg.finetune_epochs = static_cast<std::size_t>(config_u64(key, value));
  } else if (key == "lr") {
    cfg.train_cfg.learning_rate = config_double(key, value);
  } else if (key == "batch") {
    cfg.train_cfg.batch_size = static_cast<std::size_t>(config_u64(key, value));
  } else if (key == "threshold") {
    cfg.extraction_cfg.detect_threshold = config_double(key, value);
  } else if (key == "negative_ratio") {
    cfg.extraction_cfg.negative_ratio = config_double(key, value);
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

std::string trim(std::string_view text) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && (text[b] == ' ' || text[b] == '\t' || text[b] == '\r')) ++b;
  while (e > b && (text[e - 1] == ' ' || text[e - 1] == '\t' || text[e - 1] == '\r')) --e;
  return std::string(text.substr(b, e - b));
}

}  // namespace

RunConfig load_config(const std::string& path) {
  RunConfig cfg;
  const std::string bytes = read_file(path);
  const std::vector<std::string> lines = split_lines(bytes);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string line = lines[i];
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(i + 1) + ": expected key=value, got '" +
                        line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError("config line " + std::to_string(i + 1) + ": empty key");
    }
    apply_config_line(cfg, key, value);
  }
  return cfg;
}

std::string model_file_name(const std::string& mode) { return mode + ".model.json"; }
std::string training_file_name(const std::string& mode) { return mode + ".svt"; }

namespace {

// --- shared loading helpers -------------------------------------------------

Corpus load_corpus(const std::string& path, const std::string& format) {
  namespace fs = std::filesystem;
  std::vector<std::string> files;
  if (fs::is_directory(path)) {
    // one document per regular file, filename order, dotfiles skipped
    for (const auto& entry : fs::directory_iterator(path)) {
      if (!entry.is_regular_file()) continue;
      const std::string name = entry.path().filename().string();
      if (name.empty() || name[0] == '.') continue;
      files.push_back(entry.path().string());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw IoError("no input files in directory " + path);
  } else {
    files.push_back(path);
  }
  Corpus corpus;
  for (const std::string& file : files) {
    const std::string bytes = read_file(file);
    if (format == "text") {
      corpus.documents.push_back(load_plain_text(bytes, doc_id_for(file), file));
    } else {
      std::vector<Document> docs = load_tagged_tsv_multi(bytes, doc_id_for(file), file);
      corpus.documents.insert(corpus.documents.end(), std::make_move_iterator(docs.begin()),
                              std::make_move_iterator(docs.end()));
    }
  }
  return corpus;
}

std::vector<ConceptCandidate> load_concepts_file(const std::string& path) {
  return parse_concepts_tsv(read_file(path));
}

FeatureSpace load_space_file(const std::string& path) {
  return parse_feature_space(read_file(path));
}

std::size_t sentence_count(const Corpus& corpus) {
  std::size_t n = 0;
  for (const Document& d : corpus.documents) n += d.sentences.size();
  return n;
}

// Missing required flag: usage-class failure (exit 1), reported on stderr.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

void require_flag(const std::string& value, const char* flag, const char* command) {
  if (value.empty()) {
    throw UsageError(std::string(command) + " requires " + flag);
  }
}

// --- subcommand bodies ------------------------------------------------------

int cmd_preprocess(const RunConfig& cfg) {
  require_flag(cfg.input, "--input", "preprocess");
  require_flag(cfg.out, "--out", "preprocess");
  const Corpus corpus = load_corpus(cfg.input, cfg.format);
  write_file(cfg.out, export_tagged_tsv(corpus));
  std::cout << "preprocess: " << corpus.documents.size() << " document(s), "
            << sentence_count(corpus) << " sentence(s) -> " << cfg.out << "\n";
  return 0;
}

int cmd_concepts(const RunConfig& cfg) {
  require_flag(cfg.input, "--input", "concepts");
  require_flag(cfg.out, "--out", "concepts");
  // Stages after preprocess always read the canonical tagged-TSV corpus.
  const Corpus corpus = load_corpus(cfg.input, "tsv");
  const std::vector<ConceptCandidate> concepts = find_concepts(corpus, cfg.concept_cfg);
  write_file(cfg.out, export_concepts_tsv(concepts));
  std::cout << "concepts: kept " << concepts.size() << " concept(s), n_max " << cfg.concept_cfg.n_max
            << " -> " << cfg.out << "\n";
  return 0;
}

int cmd_features(const RunConfig& cfg) {
  require_flag(cfg.input, "--input", "features");
  require_flag(cfg.concepts_path, "--concepts", "features");
  require_flag(cfg.out, "--out", "features");
  const Corpus corpus = load_corpus(cfg.input, "tsv");
  const std::vector<ConceptCandidate> concepts = load_concepts_file(cfg.concepts_path);
  const FeatureSpace space = build_feature_space(concepts, corpus, cfg.concept_cfg.min_df);

  std::filesystem::create_directories(cfg.out);
  const std::filesystem::path dir(cfg.out);
  write_file((dir / kSpaceFileName).string(), export_feature_space(space));

  std::size_t sets = 0;
  if (!cfg.gold_path.empty()) {
    const std::vector<RelationTriple> gold = parse_triples_tsv(read_file(cfg.gold_path));
    const TrainingSet base = generate_pair_instances(corpus, concepts, space, gold, cfg.extraction_cfg);
    const std::vector<std::string> parents = candidate_parents(concepts, gold);
    write_training_file(derive_concept_detect_set(base),
                        (dir / training_file_name("concept-detect")).string());
    write_training_file(derive_concept_classify_set(base, parents),
                        (dir / training_file_name("concept-classify")).string());
    write_training_file(derive_relation_detect_set(base),
                        (dir / training_file_name("relation-detect")).string());
    write_training_file(derive_relation_classify_set(base),
                        (dir / training_file_name("relation-classify")).string());
    sets = 4;
  }
  std::cout << "features: dims " << space.dims() << ", " << space.term_count() << " term(s), "
            << sets << " training set(s) -> " << cfg.out << "\n";
  return 0;
}

int cmd_train(const RunConfig& cfg) {
  require_flag(cfg.input, "--input", "train");
  require_flag(cfg.space_path, "--space", "train");
  require_flag(cfg.mode, "--mode", "train");
  require_flag(cfg.out, "--out", "train");
  const FeatureSpace space = load_space_file(cfg.space_path);
  const TrainingSet train = read_training_file(cfg.input);
  if (train.dims != space.dims()) {
    throw CompatibilityError("train: SVT dims " + std::to_string(train.dims) +
                             " do not match the feature space dims " +
                             std::to_string(space.dims()));
  }
  if (cfg.mode == "concept-detect" || cfg.mode == "relation-detect") {
    if (train.class_names != std::vector<std::string>{"no", "yes"}) {
      throw CompatibilityError("train: " + cfg.mode + " expects class names [no, yes]");
    }
  } else if (cfg.mode == "relation-classify") {
    if (train.class_names != relation_class_names()) {
      throw CompatibilityError(
          "train: relation-classify expects the 11 relation labels as classes");
    }
  }  // concept-classify: any non-empty parent list the SVT carries

  const DbnModel model = train_dbn(train, cfg.train_cfg, space.fingerprint_hex());
  save_model(model, cfg.out);
  std::cout << "train: " << cfg.mode << " model, " << model.layers.size() << " layer(s), "
            << train.instances.size() << " instance(s), loss "
            << show_double(mean_cross_entropy(model, train)) << " -> " << cfg.out << "\n";
  return 0;
}

int cmd_extract(const RunConfig& cfg) {
  require_flag(cfg.input, "--input", "extract");
  require_flag(cfg.models_dir, "--models", "extract");
  require_flag(cfg.space_path, "--space", "extract");
  require_flag(cfg.out, "--out", "extract");
  const Corpus corpus = load_corpus(cfg.input, "tsv");
  const FeatureSpace space = load_space_file(cfg.space_path);
  const std::filesystem::path dir(cfg.models_dir);
  PipelineModels models;
  models.concept_detect = load_model((dir / model_file_name("concept-detect")).string());
  models.concept_classify = load_model((dir / model_file_name("concept-classify")).string());
  models.relation_detect = load_model((dir / model_file_name("relation-detect")).string());
  models.relation_classify = load_model((dir / model_file_name("relation-classify")).string());

  const PipelineResult result = run_pipeline(corpus, models, space, cfg.concept_cfg, cfg.extraction_cfg);
  write_file(cfg.out, export_triples_tsv(result.triples));
  std::cout << "extract: " << result.triples.size() << " triple(s) from " << result.pairs_total
            << " pair(s) -> " << cfg.out << "\n";
  return 0;
}

int cmd_evaluate(const RunConfig& cfg) {
  require_flag(cfg.pred_path, "--pred", "evaluate");
  require_flag(cfg.gold_path, "--gold", "evaluate");
  const std::vector<RelationTriple> pred = parse_triples_tsv(read_file(cfg.pred_path));
  const std::vector<RelationTriple> gold = parse_triples_tsv(read_file(cfg.gold_path));
  const Metrics metrics = evaluate(pred, gold);
  if (!cfg.out.empty()) write_file(cfg.out, format_metrics(metrics));
  std::cout << "evaluate: micro-F1 " << show_double(metrics.micro.f1) << ", precision "
            << show_double(metrics.micro.precision) << ", recall "
            << show_double(metrics.micro.recall) << " over " << metrics.micro.gold
            << " gold triple(s)\n";
  return 0;
}

int cmd_export(const RunConfig& cfg) {
  require_flag(cfg.input, "--input", "export");
  require_flag(cfg.out, "--out", "export");
  const std::vector<RelationTriple> triples = parse_triples_tsv(read_file(cfg.input));
  std::vector<ConceptCandidate> concepts;
  if (!cfg.concepts_path.empty()) concepts = load_concepts_file(cfg.concepts_path);

  OntologyGraph graph = build_ontology(triples, concepts);
  graph = merge_equals(std::move(graph));
  IsaDagResult repaired = enforce_isa_dag(std::move(graph));
  write_file(cfg.out, export_graph(repaired.graph));
  if (!cfg.ntriples_path.empty()) {
    write_file(cfg.ntriples_path, export_ntriples(repaired.graph));
  }
  std::cout << "export: " << repaired.graph.nodes.size() << " node(s), "
            << repaired.graph.edges.size() << " edge(s), " << repaired.dropped.size()
            << " cycle edge(s) dropped -> " << cfg.out << "\n";
  return 0;
}

// Registers the full flag set on one subcommand, bound into cfg. CLI11 only
// writes a bound value when its flag is present, which is exactly the
// file-then-flags precedence the config contract asks for.
void add_common_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--input", cfg.input, "input file");
  cmd->add_option("--out", cfg.out, "output file or directory");
  cmd->add_option("--format", cfg.format, "input format")
      ->check(CLI::IsMember({"text", "tsv"}));
  cmd->add_option("--mode", cfg.mode, "model role")->check(CLI::IsMember(kModes));
  cmd->add_option("--config", cfg.config_path, "config file (applied before flags)");
  cmd->add_option("--concepts", cfg.concepts_path, "ranked concepts TSV");
  cmd->add_option("--space", cfg.space_path, "feature-space JSON");
  cmd->add_option("--gold", cfg.gold_path, "gold triples TSV");
  cmd->add_option("--pred", cfg.pred_path, "predicted triples TSV");
  cmd->add_option("--models", cfg.models_dir, "directory holding the four trained models");
  cmd->add_option("--ntriples", cfg.ntriples_path, "also write an N-Triples export here");
  cmd->add_option("--seed", cfg.seed, "master random seed");
  cmd->add_option("--n-max", cfg.concept_cfg.n_max, "max n-gram order");
  cmd->add_option("--top-k", cfg.concept_cfg.k, "concepts kept after ranking");
  cmd->add_option("--threshold", cfg.extraction_cfg.detect_threshold, "detection cutoff");
  cmd->add_option("--layers", cfg.train_cfg.layer_widths, "hidden layer widths")
      ->delimiter(',');
  cmd->add_option("--epochs", cfg.train_cfg.finetune_epochs, "fine-tune epochs");
  cmd->add_option("--pretrain-epochs", cfg.train_cfg.pretrain_epochs, "pretraining epochs");
  cmd->add_option("--lr", cfg.train_cfg.learning_rate, "learning rate");
  cmd->add_option("--batch", cfg.train_cfg.batch_size, "mini-batch size");
  cmd->add_option("--cd-k", cfg.train_cfg.cd_k, "contrastive divergence steps");
}

}  // namespace

int dispatch(std::vector<std::string> args) {
  // The config file seeds the defaults, so it must load before flag parsing.
  RunConfig cfg;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) {
        std::cerr << "error: --config requires a path\n";
        return 1;
      }
      path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      continue;
    }
    try {
      cfg = load_config(path);
    } catch (const ConfigError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    } catch (const IoError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
    break;
  }

  CLI::App app{"ontology learning pipeline", "ontogen"};
  app.require_subcommand(0, 1);
  struct Command {
    const char* name;
    const char* blurb;
    int (*handler)(const RunConfig&);
  };
  const std::vector<Command> commands = {
      {"preprocess", "ingest raw text or tagged TSV into a canonical corpus", cmd_preprocess},
      {"concepts", "rank concept candidates by TF/IDF", cmd_concepts},
      {"features", "build the feature space and per-model training sets", cmd_features},
      {"train", "pretrain and fine-tune one model", cmd_train},
      {"extract", "run the detection/classification pipeline over a corpus", cmd_extract},
      {"evaluate", "score predicted triples against gold", cmd_evaluate},
      {"export", "assemble triples into an ontology graph file", cmd_export},
  };
  for (const Command& c : commands) {
    CLI::App* cmd = app.add_subcommand(c.name, c.blurb);
    add_common_options(cmd, cfg);
  }

  if (args.empty()) {
    std::cerr << app.help();
    return 1;
  }

  try {
    std::reverse(args.begin(), args.end());  // CLI11's vector API wants it reversed
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  CLI::App* chosen = nullptr;
  for (CLI::App* sub : app.get_subcommands()) chosen = sub;
  if (chosen == nullptr) {
    std::cerr << app.help();
    return 1;
  }
  // The seed is single-sourced: every stage derives from cfg.seed.
  cfg.train_cfg.seed = cfg.seed;
  cfg.extraction_cfg.seed = cfg.seed;
  cfg.extraction_cfg.k = cfg.concept_cfg.k;

  const auto handler =
      std::find_if(commands.begin(), commands.end(),
                   [&](const Command& c) { return c.name == chosen->get_name(); })
          ->handler;
  try {
    return handler(cfg);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const CompatibilityError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DecodeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace onto
