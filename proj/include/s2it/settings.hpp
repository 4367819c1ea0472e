#pragma once

#include <filesystem>
#include <optional>

#include "s2it/corpus.hpp"
#include "s2it/decode.hpp"
#include "s2it/graph.hpp"
#include "s2it/promptgen.hpp"

namespace s2it {

// Everything a config file can set. Relative file references inside the
// config ("relations", "templates", "categories") resolve against the config
// file's directory.
struct Settings {
  PromptConfig prompt;
  MergeStrategy merge = MergeStrategy::union_;
  bool filter_to_sentence = false;
  AlignOptions align;
  PolarityMap polarity;
  RelationMap relations;
  CategorySet categories;

  static Settings load(const std::filesystem::path& path);
};

// --config wins, then $S2IT_CONFIG, then built-in defaults.
Settings resolve_settings(const std::optional<std::filesystem::path>& explicit_path);

}  // namespace s2it
