#include "s2it/settings.hpp"

#include <cstdlib>
#include <fstream>

#include "json.hpp"

namespace s2it {

Settings Settings::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  const auto base = path.parent_path();
  auto resolve = [&](const std::string& p) { return std::filesystem::path(p).is_absolute() ? std::filesystem::path(p) : base / p; };

  Settings s;
  try {
    if (j.contains("style")) s.prompt.style = parse_syntax_style(j["style"].get<std::string>());
    if (j.contains("hops")) s.prompt.hops = j["hops"].get<int>();
    if (j.contains("merge")) s.merge = parse_merge_strategy(j["merge"].get<std::string>());
    s.filter_to_sentence = j.value("filter_to_sentence", false);
    s.prompt.empty_literal = j.value("empty_literal", s.prompt.empty_literal);
    s.prompt.end_marker = j.value("end_marker", s.prompt.end_marker);
    s.align.case_insensitive = j.value("case_insensitive", false);
    if (j.contains("polarity")) {
      const auto& arr = j["polarity"];
      if (!arr.is_array() || arr.size() != 3) throw DataError(path.string() + ": polarity must list 3 labels");
      for (std::size_t i = 0; i < 3; ++i) {
        auto sent = parse_sentiment(arr[i].get<std::string>());
        if (!sent) throw DataError(path.string() + ": unknown polarity '" + arr[i].get<std::string>() + "'");
        s.polarity.by_index[i] = *sent;
      }
    }
    if (j.contains("relations")) s.relations = RelationMap::load(resolve(j["relations"].get<std::string>()));
    if (j.contains("templates")) s.prompt.templates = Templates::load(resolve(j["templates"].get<std::string>()));
    if (j.contains("categories")) s.categories = CategorySet::load(resolve(j["categories"].get<std::string>()));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path.string() + ": " + e.what());
  } catch (const ContractError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
  if (s.prompt.hops < 1) throw DataError(path.string() + ": hops must be positive");
  return s;
}

Settings resolve_settings(const std::optional<std::filesystem::path>& explicit_path) {
  if (explicit_path) return Settings::load(*explicit_path);
  if (const char* env = std::getenv("S2IT_CONFIG"); env && *env) return Settings::load(env);
  return Settings{};
}

}  // namespace s2it
