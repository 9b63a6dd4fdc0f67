// latchart command line.
//
//   latchart parse --grammar g.txt --lattice utt.lat [options]
//   latchart eval  --grammar g.txt --lattice utt.lat --ref utt.txt [options]
//   latchart bench --grammar g.txt --lattice utt.lat --workers N [options]
//
// Exit codes: 0 success, 1 usage error, 2 bad input (files, formats,
// configuration), 3 engine error (and, under --strict, any utterance
// without an analysis).

#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <latchart/latchart.hpp>

namespace lc = latchart;

namespace {

struct Options {
  std::string grammar_path;
  std::vector<std::string> lattice_paths;
  std::string bigram_path;
  std::string trigram_path;
  std::vector<std::string> ref_paths;
  std::string weights_csv = "1,1,1,1";
  std::string beam = "inf";
  std::string prosody = "on";
  std::string predict = "off";
  bool skeleton = false;
  int workers = 1;
  int task_batch = 1;
  std::string format = "text";
  bool strict = false;
  bool no_timing = false;
  long seed = -1;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw lc::InputError("cli: cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Reference transcript: whitespace-separated words, '#' comments.
std::vector<std::string> read_reference(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::istringstream ls(line);
    std::string w;
    while (ls >> w) words.push_back(w);
  }
  return words;
}

double parse_positive(const std::string& tok, const char* what) {
  try {
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size() || !(v > 0.0))
      throw lc::InputError(std::string("cli: ") + what +
                           " must be a positive number: " + tok);
    return v;
  } catch (const lc::InputError&) {
    throw;
  } catch (const std::exception&) {
    throw lc::InputError(std::string("cli: ") + what +
                         " must be a positive number: " + tok);
  }
}

lc::ScoreWeights parse_weights(const std::string& csv) {
  std::vector<double> vals;
  std::string cur;
  std::istringstream in(csv);
  while (std::getline(in, cur, ',')) {
    try {
      std::size_t used = 0;
      vals.push_back(std::stod(cur, &used));
      if (used != cur.size()) throw std::invalid_argument(cur);
    } catch (const std::exception&) {
      throw lc::InputError(
          "cli: --weights expects four comma-separated numbers "
          "(acoustic,bigram,prosody,grammar): " +
          csv);
    }
  }
  if (vals.size() != 4)
    throw lc::InputError(
        "cli: --weights expects four comma-separated numbers "
        "(acoustic,bigram,prosody,grammar): " +
        csv);
  return lc::ScoreWeights{vals[0], vals[1], vals[2], vals[3]};
}

double parse_beam(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  return parse_positive(s, "--beam-offset");
}

lc::ParserConfig make_config(const Options& opt) {
  lc::ParserConfig pc;
  pc.weights = parse_weights(opt.weights_csv);
  pc.beam_offset = parse_beam(opt.beam);
  pc.prosody_enabled = opt.prosody == "on";
  pc.predict = opt.predict == "on";
  pc.skeleton = opt.skeleton;
  return pc;
}

lc::Json config_echo(const Options& opt, const std::string& mode) {
  const lc::ScoreWeights w = parse_weights(opt.weights_csv);
  lc::Json cfg;
  cfg["grammar"] = opt.grammar_path;
  cfg["lattices"] = opt.lattice_paths;
  cfg["bigram"] = opt.bigram_path.empty() ? lc::Json(nullptr)
                                          : lc::Json(opt.bigram_path);
  cfg["trigram"] = opt.trigram_path.empty() ? lc::Json(nullptr)
                                            : lc::Json(opt.trigram_path);
  if (mode == "eval") cfg["references"] = opt.ref_paths;
  cfg["weights"] = {{"acoustic", w.acoustic},
                    {"bigram", w.bigram},
                    {"prosody", w.prosody},
                    {"grammar", w.grammar}};
  cfg["beam_offset"] = opt.beam == "inf" ? lc::Json("inf")
                                         : lc::Json(parse_beam(opt.beam));
  cfg["prosody"] = opt.prosody == "on";
  cfg["predict"] = opt.predict == "on";
  cfg["skeleton"] = opt.skeleton;
  cfg["workers"] = opt.workers;
  cfg["task_batch"] = opt.task_batch;
  cfg["strict"] = opt.strict;
  if (opt.seed >= 0) cfg["seed"] = opt.seed;
  return cfg;
}

void merge_metrics(std::vector<lc::WorkerMetrics>& into,
                   const std::vector<lc::WorkerMetrics>& from) {
  if (into.size() < from.size()) into.resize(from.size());
  for (std::size_t i = 0; i < from.size(); ++i) {
    into[i].tasks += from[i].tasks;
    into[i].unify_ms += from[i].unify_ms;
    into[i].busy_ms += from[i].busy_ms;
    into[i].idle_ms += from[i].idle_ms;
    for (std::size_t b = 0; b < from[i].unify_hist.size(); ++b)
      into[i].unify_hist[b] += from[i].unify_hist[b];
  }
}

void emit(const lc::RunReport& rep, const Options& opt) {
  if (opt.format == "structured") {
    std::cout << lc::render_json(rep, !opt.no_timing).dump(2) << "\n";
  } else {
    std::cout << lc::render_text(rep, !opt.no_timing);
  }
}

int run_mode(const std::string& mode, const Options& opt) {
  if (mode == "eval" && opt.ref_paths.size() != opt.lattice_paths.size())
    throw lc::InputError("cli: eval needs exactly one --ref per --lattice");

  lc::Grammar grammar = lc::parse_grammar(read_file(opt.grammar_path));
  lc::BigramModel bigram;
  if (!opt.bigram_path.empty())
    bigram = lc::load_bigram(read_file(opt.bigram_path));
  lc::CategoryTrigram trigram;
  if (!opt.trigram_path.empty())
    trigram = lc::load_trigram(read_file(opt.trigram_path));

  lc::ParserConfig pc = make_config(opt);
  lc::Parser parser(grammar, bigram, trigram, pc);
  lc::WorkerConfig wc;
  wc.worker_count = opt.workers;
  wc.task_batch = opt.task_batch;
  wc.metrics_enabled = (mode == "bench");

  lc::RunReport rep;
  rep.mode = mode;
  rep.config = config_echo(opt, mode);

  int exit_code = 0;
  double wall_total = 0.0;
  double baseline_total = 0.0;
  std::vector<lc::WorkerMetrics> merged;

  for (std::size_t i = 0; i < opt.lattice_paths.size(); ++i) {
    const std::string& path = opt.lattice_paths[i];
    lc::Lattice lat = lc::load_lattice(read_file(path));

    if (mode == "bench") {
      // Sequential reference run first, then the parallel run.
      lc::ParseOutcome base = parser.parse(lat);
      baseline_total += base.wall_ms;
    }
    lc::ParallelOutcome po = lc::parallel_parse(parser, lat, wc);
    wall_total += po.outcome.wall_ms;
    if (mode == "bench") merge_metrics(merged, po.metrics.workers);

    lc::UtteranceReport u;
    u.id = path;
    u.outcome = std::move(po.outcome);
    if (mode == "eval") {
      std::vector<std::string> ref = read_reference(opt.ref_paths[i]);
      // A parse without any analysis covers nothing: score the empty
      // hypothesis instead of failing the whole corpus.
      std::vector<std::string> hyp =
          u.outcome.best ? u.outcome.best->words : std::vector<std::string>{};
      lc::EvalReport er = lc::score_strict(ref, hyp);
      er.partial = u.outcome.partial;
      er.prefix = u.outcome.best ? u.outcome.best->prefix : false;
      u.eval = std::move(er);
    }
    if (opt.strict && !u.outcome.best) exit_code = 3;
    rep.utterances.push_back(std::move(u));
  }

  if (mode == "eval" && !rep.utterances.empty()) {
    double wa = 0.0;
    double cr = 0.0;
    for (const auto& u : rep.utterances) {
      wa += u.eval->word_accuracy;
      cr += u.eval->word_correct_rate;
    }
    rep.aggregate_word_accuracy = wa / static_cast<double>(rep.utterances.size());
    rep.aggregate_correct_rate = cr / static_cast<double>(rep.utterances.size());
  }
  if (mode == "bench") {
    rep.metrics = lc::collect_metrics(merged, wall_total);
    rep.baseline_wall_ms = baseline_total;
    rep.gain_percent = lc::percent_gain(baseline_total, wall_total);
  }
  rep.wall_ms = wall_total;

  emit(rep, opt);
  return exit_code;
}

void add_common_options(CLI::App* sub, Options& opt, bool with_refs) {
  sub->add_option("--grammar", opt.grammar_path,
                  "Grammar file (START/RULE/LEX lines)")
      ->required();
  sub->add_option("--lattice", opt.lattice_paths,
                  "Word lattice file; repeatable")
      ->required();
  sub->add_option("--bigram", opt.bigram_path, "Bigram model file");
  sub->add_option("--trigram", opt.trigram_path,
                  "Prosody category-trigram file");
  if (with_refs)
    sub->add_option("--ref", opt.ref_paths,
                    "Reference transcript, one per --lattice; repeatable")
        ->required();
  sub->add_option("--weights", opt.weights_csv,
                  "Component weights acoustic,bigram,prosody,grammar "
                  "(default 1,1,1,1)");
  sub->add_option("--beam-offset", opt.beam,
                  "Relative beam offset (> 0) or 'inf' (default)");
  sub->add_option("--prosody", opt.prosody, "Prosody scoring on|off")
      ->check(CLI::IsMember({"on", "off"}));
  sub->add_option("--predict", opt.predict,
                  "Top-down word prediction on|off")
      ->check(CLI::IsMember({"on", "off"}));
  sub->add_flag("--skeleton", opt.skeleton,
                "Context-free skeleton only (skip unification)");
  sub->add_option("--workers", opt.workers, "Unification workers (default 1)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--task-batch", opt.task_batch,
                  "Agenda pairs fetched per lock acquisition (default 1)")
      ->check(CLI::PositiveNumber);
  sub->add_option("--format", opt.format, "Output format text|structured")
      ->check(CLI::IsMember({"text", "structured"}));
  sub->add_flag("--strict", opt.strict,
                "Exit 3 when any utterance has no analysis");
  sub->add_flag("--no-timing", opt.no_timing,
                "Omit wall-clock material from the report");
  sub->add_option("--seed", opt.seed,
                  "Run seed, echoed into the report metadata");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-synchronous chart parser for speech word lattices"};
  app.require_subcommand(1);
  Options opt;

  CLI::App* cmd_parse =
      app.add_subcommand("parse", "Parse lattices and report analyses");
  add_common_options(cmd_parse, opt, false);
  CLI::App* cmd_eval = app.add_subcommand(
      "eval", "Parse and score covered strings against references");
  add_common_options(cmd_eval, opt, true);
  CLI::App* cmd_bench = app.add_subcommand(
      "bench", "Compare the parallel drain against the sequential engine");
  add_common_options(cmd_bench, opt, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  std::string mode;
  if (cmd_parse->parsed()) mode = "parse";
  if (cmd_eval->parsed()) mode = "eval";
  if (cmd_bench->parsed()) mode = "bench";
  if (mode == "bench") {
    if (opt.workers < 2) {
      std::cerr << "usage: bench requires --workers >= 2\n";
      return 1;
    }
  }

  try {
    return run_mode(mode, opt);
  } catch (const lc::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const lc::EngineError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
}
