// s2it: corpus ingestion, dataset building, decoding, evaluation and the
// two-stage pipeline from one executable.
//
// Exit status: 0 success, 1 data error, 2 usage error.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "s2it/baseline.hpp"
#include "s2it/corpus.hpp"
#include "s2it/eval.hpp"
#include "s2it/parallel.hpp"
#include "s2it/pipeline.hpp"
#include "s2it/settings.hpp"

namespace fs = std::filesystem;
using namespace s2it;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CorpusArgs {
  std::string corpus;  // canonical JSONL from `ingest`
  std::string acos;
  std::string conllu;
  std::string categories;
  bool case_insensitive = false;

  void add_to(CLI::App* cmd, const std::string& prefix = "") {
    cmd->add_option("--" + prefix + "corpus", corpus, "Canonical corpus file written by `ingest`");
    cmd->add_option("--" + prefix + "acos", acos, "ACOS TSV file")->check(CLI::ExistingFile);
    cmd->add_option("--" + prefix + "conllu", conllu, "CoNLL-U parses aligned line-for-line with --acos")
        ->check(CLI::ExistingFile);
    cmd->add_option("--categories", categories, "Closed category set, one raw label per line")
        ->check(CLI::ExistingFile);
    cmd->add_flag("--case-insensitive", case_insensitive, "Ignore case when aligning parses to sentences");
  }

  std::vector<SentenceGraph> load(const Settings& settings) const {
    if (!corpus.empty() == !acos.empty()) throw UsageError("pass exactly one of --corpus or --acos");
    if (!corpus.empty()) return load_canonical(corpus, settings.relations);
    const CategorySet cats = categories.empty() ? settings.categories : CategorySet::load(categories);
    auto sentences = load_acos(acos, cats, settings.polarity);
    if (conllu.empty()) return unparsed_corpus(sentences);
    AlignOptions align = settings.align;
    align.case_insensitive = align.case_insensitive || case_insensitive;
    return align_corpus(sentences, load_conllu(conllu), settings.relations, align);
  }
};

void require_parses(const std::vector<SentenceGraph>& corpus, SyntaxStyle style) {
  if (style == SyntaxStyle::none) return;
  for (const auto& g : corpus)
    if (!g.has_parse() && g.size() > 0)
      throw UsageError("sentence " + g.id() + " has no dependency parse; pass --conllu or use --style none");
}

std::string stats_json(const CorpusStats& st) {
  nlohmann::ordered_json j;
  j["sentence_count"] = st.sentence_count;
  j["quad_count"] = st.quad_count;
  j["implicit_aspect_count"] = st.implicit_aspect_count;
  j["implicit_opinion_count"] = st.implicit_opinion_count;
  j["category_histogram"] = st.category_histogram;
  j["sentiment_histogram"] = st.sentiment_histogram;
  return j.dump(2);
}

std::vector<DecodedRecord> read_decoded(const std::vector<std::string>& paths) {
  std::vector<DecodedRecord> out;
  for (const auto& p : paths) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw DataError("cannot open " + p);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty()) out.push_back(decoded_from_json(line, line_no));
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stepwise syntax-integration toolkit for aspect sentiment quad prediction"};
  app.require_subcommand(1);
  std::optional<std::string> config_path;
  unsigned jobs = 0;
  app.add_option("--config", config_path, "Config file (default: $S2IT_CONFIG, else built-in defaults)");
  app.add_option("--jobs", jobs, "Worker threads (default: all cores)");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Validate and align a corpus, write the canonical corpus file");
  CorpusArgs ingest_in;
  ingest_in.add_to(ingest);
  std::string ingest_out;
  ingest->add_option("-o,--output", ingest_out, "Canonical corpus output (JSONL)")->required();

  // stats
  auto* stats = app.add_subcommand("stats", "Print corpus statistics as JSON");
  CorpusArgs stats_in;
  stats_in.add_to(stats);

  // build-dataset
  auto* build = app.add_subcommand("build-dataset", "Write instruction-tuning JSONL files, one per task");
  CorpusArgs build_in;
  build_in.add_to(build);
  std::string task_sel = "all", style_opt, direction_opt = "both", build_out;
  std::optional<int> hops_opt;
  bool training = false, concat_steps = false;
  build->add_option("--task", task_sel, "Task name, step1, step2, aux or all")->capture_default_str();
  build->add_option("--style", style_opt, "Syntax rendering: nl, symbol or none (default from config)");
  build->add_option("--direction", direction_opt, "ao, oa or both")->capture_default_str();
  build->add_option("--hops", hops_opt, "Subgraph radius (default from config)");
  build->add_option("--out", build_out, "Output directory")->required();
  build->add_flag("--training", training, "Append the end-of-sequence marker to every output");
  build->add_flag("--concat-steps", concat_steps, "Also write steps/step{1,2,3}.jsonl concatenations");

  // decode
  auto* decode = app.add_subcommand("decode", "Parse raw model outputs into structured predictions");
  std::string decode_in, decode_out, fields_spec;
  decode->add_option("--in", decode_in, "Predictions JSONL {sentence_id, task, raw_output}")
      ->required()
      ->check(CLI::ExistingFile);
  decode->add_option("--out", decode_out, "Decoded JSONL output")->required();
  decode->add_option("--fields", fields_spec, "Record keys in order, e.g. aspect,opinion (default: from task)");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score decoded predictions against gold");
  CorpusArgs eval_in;
  eval_in.add_to(evaluate, "gold-");
  std::vector<std::string> pred_files;
  std::string granularity = "quad", eval_report;
  evaluate->add_option("--pred", pred_files, "Decoded prediction file(s)")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--granularity", granularity, "quad, pair or element")
      ->check(CLI::IsMember({"quad", "pair", "element"}))
      ->capture_default_str();
  evaluate->add_option("--report", eval_report, "Also write the JSON report here");

  // pipeline
  auto* pipeline = app.add_subcommand("pipeline", "Run stage 1 + merge + stage 2 against a predictor and evaluate");
  CorpusArgs pipe_in;
  pipe_in.add_to(pipeline);
  std::string predictor_kind, exec_cmd, run_dir, merge_opt, pipe_style, heuristic_category;
  std::optional<int> pipe_hops;
  bool stage2_gold = false;
  pipeline->add_option("--predictor", predictor_kind, "exec, gold or heuristic")
      ->required()
      ->check(CLI::IsMember({"exec", "gold", "heuristic"}));
  pipeline->add_option("--exec", exec_cmd, "Shell command speaking the predictor protocol (with --predictor exec)");
  pipeline->add_option("--out", run_dir, "Run directory")->required();
  pipeline->add_option("--merge", merge_opt, "union or intersection (default from config)");
  pipeline->add_option("--style", pipe_style, "nl, symbol or none (default from config)");
  pipeline->add_option("--hops", pipe_hops, "Subgraph radius (default from config)");
  pipeline->add_flag("--stage2-gold", stage2_gold, "Also run stage 2 alone on gold pairs");
  pipeline->add_option("--heuristic-category", heuristic_category,
                       "Category the heuristic assigns (default: first of the category set, else 'general')");

  // predict
  auto* predict = app.add_subcommand("predict", "Serve a built-in predictor over the JSONL stdin/stdout protocol");
  CorpusArgs predict_in;
  predict_in.add_to(predict);
  std::string predict_kind;
  predict->add_option("--predictor", predict_kind, "gold or heuristic")
      ->required()
      ->check(CLI::IsMember({"gold", "heuristic"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e, std::cerr, std::cerr);
    return 2;
  }

  try {
    Settings settings = resolve_settings(config_path ? std::optional<fs::path>(*config_path) : std::nullopt);

    if (*ingest) {
      auto corpus = ingest_in.load(settings);
      write_canonical(corpus, ingest_out);
      std::cerr << "ingested " << corpus.size() << " sentences -> " << ingest_out << "\n";
      return 0;
    }

    if (*stats) {
      std::cout << stats_json(corpus_stats(stats_in.load(settings))) << "\n";
      return 0;
    }

    if (*build) {
      PromptConfig prompt = settings.prompt;
      if (!style_opt.empty()) prompt.style = parse_syntax_style(style_opt);
      if (hops_opt) prompt.hops = *hops_opt;
      if (prompt.hops < 1) throw UsageError("--hops must be positive");
      const auto tasks = select_tasks(task_sel, parse_direction(direction_opt));
      const auto corpus = build_in.load(settings);
      require_parses(corpus, prompt.style);
      std::map<int, std::vector<InstructionExample>> steps;
      for (auto task : tasks) {
        auto examples = parallel_map<InstructionExample>(corpus.size(), jobs,
                                                         [&](std::size_t i) { return generate(corpus[i], task, prompt); });
        const auto path = fs::path(build_out) / (std::string(to_string(task)) + ".jsonl");
        emit_jsonl(examples, path, training, prompt.end_marker);
        std::cerr << path.string() << ": " << examples.size() << " records\n";
        auto& bucket = steps[task_step(task)];
        bucket.insert(bucket.end(), examples.begin(), examples.end());
      }
      if (concat_steps)
        for (const auto& [step, examples] : steps)
          emit_jsonl(examples, fs::path(build_out) / "steps" / ("step" + std::to_string(step) + ".jsonl"), training,
                     prompt.end_marker);
      return 0;
    }

    if (*decode) {
      std::optional<std::vector<std::string>> fields;
      if (!fields_spec.empty()) fields = parse_field_spec(fields_spec);
      std::ifstream in(decode_in, std::ios::binary);
      std::vector<std::string> lines;
      for (std::string line; std::getline(in, line);)
        if (!line.empty()) lines.push_back(line);
      const DecodeOptions options{settings.prompt.end_marker, settings.prompt.empty_literal};
      auto decoded = parallel_map<std::string>(lines.size(), jobs, [&](std::size_t i) {
        const auto r = parse_protocol_response(lines[i], i + 1);
        const auto f = fields ? *fields : task_fields(parse_task_kind(r.task));
        return decoded_to_json(decode_raw(r.sentence_id, r.task, r.raw_output, f, options));
      });
      if (fs::path(decode_out).has_parent_path()) fs::create_directories(fs::path(decode_out).parent_path());
      std::ofstream out(decode_out, std::ios::binary);
      if (!out) throw DataError("cannot write " + decode_out);
      for (const auto& l : decoded) out << l << '\n';
      std::cerr << "decoded " << decoded.size() << " records -> " << decode_out << "\n";
      return 0;
    }

    if (*evaluate) {
      const auto corpus = eval_in.load(settings);
      const auto records = read_decoded(pred_files);
      std::map<std::string, std::vector<const DecodedRecord*>> by_id;
      std::size_t malformed = 0;
      for (const auto& r : records) {
        by_id[r.sentence_id].push_back(&r);
        malformed += r.malformed;
      }
      if (granularity == "element") {
        std::size_t positions = 0;
        double cat = 0, sent = 0;
        for (const auto& g : corpus) {
          const auto gold = gold_quads(g);
          std::vector<QuadPrediction> pred;
          for (const auto* r : by_id[g.id()])
            for (auto& q : to_quads(*r)) pred.push_back(q);
          const auto aligned = align_to_gold(gold, pred);
          cat += element_accuracy(gold, aligned, Target::category) * static_cast<double>(gold.size());
          sent += element_accuracy(gold, aligned, Target::sentiment) * static_cast<double>(gold.size());
          positions += gold.size();
        }
        nlohmann::ordered_json j;
        j["granularity"] = "element";
        j["category_accuracy"] = positions ? cat / static_cast<double>(positions) : 1.0;
        j["sentiment_accuracy"] = positions ? sent / static_cast<double>(positions) : 1.0;
        j["positions"] = positions;
        j["malformed_count"] = malformed;
        std::cout << j.dump(2) << "\n";
        if (!eval_report.empty()) std::ofstream(eval_report) << j.dump(2) << "\n";
        return 0;
      }
      std::vector<SentenceScore> rows;
      for (const auto& g : corpus) {
        if (granularity == "pair") {
          std::vector<PairPrediction> pred;
          for (const auto* r : by_id[g.id()])
            for (auto& p : to_pairs(*r)) pred.push_back(p);
          rows.push_back({g.id(), score_pairs(gold_pair_predictions(g), pred)});
        } else {
          std::vector<QuadPrediction> pred;
          for (const auto* r : by_id[g.id()])
            for (auto& q : to_quads(*r)) pred.push_back(q);
          rows.push_back({g.id(), score_quads(gold_quads(g), pred)});
        }
      }
      const auto report = micro_scores(rows, malformed);
      std::cout << report_table(report, granularity);
      if (!eval_report.empty()) std::ofstream(eval_report) << report_json(report, granularity, true) << "\n";
      return 0;
    }

    if (*pipeline) {
      PipelineConfig config;
      config.prompt = settings.prompt;
      if (!pipe_style.empty()) config.prompt.style = parse_syntax_style(pipe_style);
      if (pipe_hops) config.prompt.hops = *pipe_hops;
      if (config.prompt.hops < 1) throw UsageError("--hops must be positive");
      config.merge = merge_opt.empty() ? settings.merge : parse_merge_strategy(merge_opt);
      config.filter_to_sentence = settings.filter_to_sentence;
      config.jobs = jobs;
      config.run_dir = run_dir;
      const auto corpus = pipe_in.load(settings);
      require_parses(corpus, config.prompt.style);

      std::unique_ptr<Predictor> predictor;
      if (predictor_kind == "gold") {
        predictor = std::make_unique<GoldReplayPredictor>(corpus, config.prompt);
      } else if (predictor_kind == "heuristic") {
        std::string cat = heuristic_category;
        if (cat.empty())
          cat = settings.categories.labels().empty() ? "general" : normalize_category(*settings.categories.labels().begin());
        predictor = std::make_unique<HeuristicPredictor>(corpus, HeuristicConfig{cat, Sentiment::positive}, config.prompt);
      } else {
        if (exec_cmd.empty()) throw UsageError("--predictor exec needs --exec <command>");
        predictor = std::make_unique<ExecPredictor>(exec_cmd, fs::path(run_dir) / "exec");
      }

      const auto report = run_two_stage(corpus, *predictor, config);
      std::cout << report_table(report.pair, "pair") << report_table(report.quad, "quad");
      if (stage2_gold) {
        const auto s2 = run_stage2_isolated(corpus, *predictor, config);
        std::cout << "stage2 (gold pairs): category accuracy " << s2.category_accuracy << ", sentiment accuracy "
                  << s2.sentiment_accuracy << "\n"
                  << report_table(s2.quad, "quad|gold P");
      }
      return 0;
    }

    if (*predict) {
      const auto corpus = predict_in.load(settings);
      std::unique_ptr<Predictor> predictor;
      if (predict_kind == "gold")
        predictor = std::make_unique<GoldReplayPredictor>(corpus, settings.prompt);
      else
        predictor = std::make_unique<HeuristicPredictor>(corpus, HeuristicConfig{"general", Sentiment::positive},
                                                         settings.prompt);
      serve(*predictor, std::cin, std::cout);
      return 0;
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ContractError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
