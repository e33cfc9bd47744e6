#ifndef ONTO_CLI_HPP
#define ONTO_CLI_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "onto/concepts.hpp"
#include "onto/dbn.hpp"
#include "onto/extraction.hpp"

namespace onto {

// Everything a subcommand can consume: stage IO paths plus the concept,
// training, and extraction knobs. Populated from defaults, then a config
// file, then command-line flags (later sources win).
struct RunConfig {
  // Stage inputs/outputs.
  std::string input;
  std::string out;
  std::string format = "text";  // input format: text | tsv
  std::string mode;             // concept-detect | concept-classify |
                                // relation-detect | relation-classify
  std::string config_path;
  std::string concepts_path;
  std::string space_path;
  std::string gold_path;
  std::string pred_path;
  std::string models_dir;
  std::string ntriples_path;

  ConceptConfig concept_cfg;
  TrainConfig train_cfg;
  ExtractionConfig extraction_cfg;
  std::uint64_t seed = 42;  // the single seed every stage derives from
};

// key=value per line, `#` starts a comment, blank lines ignored. Unknown keys
// and unparsable values throw ConfigError naming the key. The file may set
// any RunConfig field under its flag name (input, out, format, mode,
// concepts, space, gold, pred, models, ntriples, seed, n_max, top_k, min_df,
// layers, cd_k, pretrain_epochs, finetune_epochs, lr, batch, threshold,
// negative_ratio).
RunConfig load_config(const std::string& path);

// Runs one subcommand (preprocess | concepts | features | train | extract |
// evaluate | export) and returns the process exit code: 0 success, 1 usage
// error, 2 data/parse error, 3 compatibility error. args excludes the
// program name. Prints a one-line summary to stdout on success.
int dispatch(std::vector<std::string> args);

// Fixed artifact names used inside --models / features output directories.
std::string model_file_name(const std::string& mode);     // <mode>.model.json
std::string training_file_name(const std::string& mode);  // <mode>.svt
extern const char kSpaceFileName[];                       // space.json

}  // namespace onto

#endif  // ONTO_CLI_HPP
