#pragma once

// Probabilistic attribute-value grammar: context-free skeleton with
// log-prob weighted rules, per-rule feature constraints (path equations
// realized as shared variables), a lexicon, and precompiled left-corner
// closure tables driving top-down prediction.
//
// Grammar file format (one entry per line, '#' starts a comment):
//   START <category>
//   RULE <LHS> -> <C1> ... <Cn> : <logprob> [{ path=path, path=atom, ... }]
//   LEX <key> <category> : <logprob> [{ attr=atom, ... }]
// Constraint paths are dot-separated attribute names prefixed by a rule
// position (LHS or C1..Cn).

#include <cctype>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "latchart/core.hpp"
#include "latchart/feature.hpp"
#include "latchart/textio.hpp"

namespace latchart {

struct Rule {
  std::string lhs;
  std::vector<std::string> rhs;  // never empty; lexical entries live in LEX
  double log_prob = 0.0;
  // Feature slots, one per position (0 = lhs, 1..n = rhs); equations are
  // realized as variables shared between slots.  Empty when the rule has
  // no constraints.
  std::vector<FeatureValue> slots;
  int var_count = 0;  // upper bound on distinct variable ids in slots

  bool has_constraints() const { return !slots.empty(); }
};

struct LexEntry {
  std::string key;
  std::string cat;
  double log_prob = 0.0;
  FeatureValue features;  // node; empty node when no attrs given
};

// One left-corner closure entry: rule plus the accumulated grammar
// log-score of the best leftmost chain from the predicted category down to
// (and including) this rule.
struct PredictEntry {
  int rule = -1;
  double accumulated = 0.0;
};

class Grammar {
 public:
  std::vector<Rule> rules;
  std::unordered_map<std::string, LexEntry> lexicon;
  std::string start;
  // Fast-check feature paths used for quick-check signatures.  Defaults to
  // the top-level attribute names carrying atoms in the lexicon.
  std::vector<std::vector<std::string>> fast_check_paths;

  bool defined(const std::string& cat) const {
    return defined_.count(cat) != 0;
  }

  const LexEntry* lex(const std::string& key) const {
    auto it = lexicon.find(key);
    return it == lexicon.end() ? nullptr : &it->second;
  }

  // Left-corner closure of cat: every rule reachable by repeated leftmost
  // expansion, with best accumulated chain scores.  Empty for categories
  // with no rules (e.g. purely lexical ones).
  const std::vector<PredictEntry>& predictions(const std::string& cat) const {
    static const std::vector<PredictEntry> none;
    auto it = predict_table_.find(cat);
    return it == predict_table_.end() ? none : it->second;
  }

  // Lexical keys whose category is a left corner of cat (including cat
  // itself when it is a lexical category).
  const std::vector<std::string>& predictable_words(
      const std::string& cat) const {
    static const std::vector<std::string> none;
    auto it = word_predict_table_.find(cat);
    return it == word_predict_table_.end() ? none : it->second;
  }

  void compile();  // builds closure tables; called by parse_grammar

 private:
  std::set<std::string> defined_;
  std::map<std::string, std::vector<PredictEntry>> predict_table_;
  std::map<std::string, std::vector<std::string>> word_predict_table_;
};

// ---------------------------------------------------------------------------
// Closure compilation.

inline void Grammar::compile() {
  defined_.clear();
  predict_table_.clear();
  word_predict_table_.clear();

  std::set<std::string> lexical_cats;
  for (const auto& [key, entry] : lexicon) {
    (void)key;
    lexical_cats.insert(entry.cat);
    defined_.insert(entry.cat);
  }
  std::set<std::string> mentioned;
  for (const auto& r : rules) {
    defined_.insert(r.lhs);
    mentioned.insert(r.lhs);
    for (const auto& c : r.rhs) mentioned.insert(c);
  }
  mentioned.insert(lexical_cats.begin(), lexical_cats.end());
  if (!start.empty()) mentioned.insert(start);

  std::map<std::string, std::vector<int>> by_lhs;
  for (int i = 0; i < static_cast<int>(rules.size()); ++i)
    by_lhs[rules[i].lhs].push_back(i);

  constexpr double kUnreached = -std::numeric_limits<double>::infinity();
  for (const auto& cat : mentioned) {
    // Best chain score from cat to each left-corner category (0 for cat
    // itself); relaxed to a fixpoint.  Chain weights are non-positive, so
    // strict-improvement relaxation terminates.
    std::map<std::string, double> cat_score;
    cat_score[cat] = 0.0;
    std::vector<std::string> work{cat};
    std::map<int, double> rule_acc;
    while (!work.empty()) {
      std::string d = work.back();
      work.pop_back();
      double base = cat_score[d];
      auto it = by_lhs.find(d);
      if (it == by_lhs.end()) continue;
      for (int ri : it->second) {
        const Rule& r = rules[ri];
        double acc = base + r.log_prob;
        auto [ra, inserted] = rule_acc.emplace(ri, acc);
        if (!inserted) {
          if (acc <= ra->second) continue;
          ra->second = acc;
        }
        const std::string& corner = r.rhs.front();
        auto cs = cat_score.find(corner);
        if (cs == cat_score.end() || acc > cs->second) {
          cat_score[corner] = acc;
          work.push_back(corner);
        }
      }
    }

    std::vector<PredictEntry> entries;
    for (const auto& [ri, acc] : rule_acc) {
      if (acc > kUnreached) entries.push_back(PredictEntry{ri, acc});
    }
    predict_table_.emplace(cat, std::move(entries));

    std::set<std::string> keys;
    for (const auto& [key, entry] : lexicon) {
      auto cs = cat_score.find(entry.cat);
      if (cs != cat_score.end()) keys.insert(key);
    }
    word_predict_table_.emplace(
        cat, std::vector<std::string>(keys.begin(), keys.end()));
  }
}

// ---------------------------------------------------------------------------
// Top-down word prediction: all lexical keys consumable as the next
// terminal under any of the frontier categories.

inline std::vector<std::string> predict_words(
    const Grammar& g, const std::set<std::string>& frontier) {
  std::set<std::string> keys;
  for (const auto& cat : frontier) {
    if (!g.defined(cat))
      throw InputError("grammar: unknown category in prediction frontier: " +
                       cat);
    const auto& words = g.predictable_words(cat);
    keys.insert(words.begin(), words.end());
  }
  return {keys.begin(), keys.end()};
}

// ---------------------------------------------------------------------------
// Grammar file parsing.

namespace detail {

// Splits "HEAD : FLOAT { ... }" into the head tokens, the float token and
// the optional brace body.
struct ScoredLine {
  std::vector<std::string> head;
  double log_prob = 0.0;
  std::optional<std::string> braces;
};

inline ScoredLine parse_scored_line(const std::string& body,
                                    const char* module, int line) {
  ScoredLine out;
  std::string rest = body;
  std::size_t brace = rest.find('{');
  if (brace != std::string::npos) {
    std::size_t close = rest.rfind('}');
    if (close == std::string::npos || close < brace)
      throw FileFormatError(module, line, "unterminated '{' block");
    if (!trim(rest.substr(close + 1)).empty())
      throw FileFormatError(module, line, "trailing text after '}'");
    out.braces = rest.substr(brace + 1, close - brace - 1);
    rest = rest.substr(0, brace);
  }
  std::size_t colon = rest.rfind(':');
  if (colon == std::string::npos)
    throw FileFormatError(module, line, "missing ':' before log-probability");
  std::vector<std::string> score_toks = split_tokens(rest.substr(colon + 1));
  if (score_toks.size() != 1)
    throw FileFormatError(module, line,
                          "expected exactly one log-probability after ':'");
  out.log_prob = parse_log_prob(score_toks[0], module, line);
  out.head = split_tokens(rest.substr(0, colon));
  return out;
}

// Position index for a constraint prefix: 0 for LHS, k for Ck (1-based),
// -1 when the token is not a position name.
inline int position_index(const std::string& tok, std::size_t arity) {
  if (tok == "LHS") return 0;
  if (tok.size() >= 2 && tok[0] == 'C') {
    int k = 0;
    for (std::size_t i = 1; i < tok.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(tok[i]))) return -1;
      k = k * 10 + (tok[i] - '0');
    }
    if (k >= 1 && k <= static_cast<int>(arity)) return k;
    return -2;  // position syntax but out of range
  }
  return -1;
}

// Builds a nested node carrying `leaf` at `path` (path may be empty).
inline FeatureValue path_skeleton(const std::vector<std::string>& path,
                                  std::size_t i, const FeatureValue& leaf) {
  if (i == path.size()) return leaf;
  auto n = std::make_shared<FeatureNode>();
  n->attrs.emplace(path[i], path_skeleton(path, i + 1, leaf));
  return FeatureValue::node(std::move(n));
}

inline std::vector<std::string> split_equations(const std::string& body) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : body) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  std::vector<std::string> trimmed;
  for (auto& e : out) {
    std::string t = trim(e);
    if (!t.empty()) trimmed.push_back(t);
  }
  return trimmed;
}

}  // namespace detail

inline Grammar parse_grammar(const std::string& text) {
  using detail::parse_scored_line;
  using detail::position_index;
  using detail::split_equations;
  using detail::split_path;
  using detail::split_tokens;
  using detail::trim;
  constexpr const char* kMod = "grammar";

  Grammar g;
  bool have_start = false;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw = raw.substr(0, hash);
    std::string line = trim(raw);
    if (line.empty()) continue;

    std::istringstream ls(line);
    std::string keyword;
    ls >> keyword;
    std::string body;
    std::getline(ls, body);

    if (keyword == "START") {
      if (have_start)
        throw FileFormatError(kMod, line_no, "duplicate START line");
      std::vector<std::string> toks = split_tokens(body);
      if (toks.size() != 1)
        throw FileFormatError(kMod, line_no, "START expects one category");
      g.start = toks[0];
      have_start = true;
    } else if (keyword == "RULE") {
      auto scored = parse_scored_line(body, kMod, line_no);
      auto arrow = std::find(scored.head.begin(), scored.head.end(), "->");
      if (scored.head.size() < 3 || arrow != scored.head.begin() + 1)
        throw FileFormatError(kMod, line_no,
                              "expected RULE <lhs> -> <cats...> : <logprob>");
      Rule r;
      r.lhs = scored.head.front();
      r.rhs.assign(arrow + 1, scored.head.end());
      if (r.rhs.empty())
        throw FileFormatError(kMod, line_no, "rule right side is empty");
      r.log_prob = scored.log_prob;

      if (scored.braces) {
        // Compile path equations into per-position feature slots sharing
        // one substitution, so chained equations stay connected.
        std::vector<FeatureValue> slots(r.rhs.size() + 1, empty_node());
        Subst s;
        int next_var = 0;
        for (const std::string& eq : split_equations(*scored.braces)) {
          std::size_t eqpos = eq.find('=');
          if (eqpos == std::string::npos || eq.find('=', eqpos + 1) !=
                                                std::string::npos)
            throw FileFormatError(kMod, line_no,
                                  "constraint must be 'path=path' or "
                                  "'path=atom': " +
                                      eq);
          std::string left = trim(eq.substr(0, eqpos));
          std::string right = trim(eq.substr(eqpos + 1));
          if (left.empty() || right.empty())
            throw FileFormatError(kMod, line_no, "empty constraint side");

          auto lparts = split_path(left);
          int lpos = position_index(lparts[0], r.rhs.size());
          if (lpos == -2)
            throw FileFormatError(kMod, line_no,
                                  "constraint position out of range: " +
                                      lparts[0]);
          if (lpos < 0)
            throw FileFormatError(
                kMod, line_no,
                "constraint left side must start with LHS or C<k>: " + left);
          std::vector<std::string> lpath(lparts.begin() + 1, lparts.end());

          FeatureValue link;
          auto rparts = split_path(right);
          int rpos = position_index(rparts[0], r.rhs.size());
          if (rpos == -2)
            throw FileFormatError(kMod, line_no,
                                  "constraint position out of range: " +
                                      rparts[0]);
          if (rpos >= 0) {
            link = make_var(next_var++);
            std::vector<std::string> rpath(rparts.begin() + 1, rparts.end());
            auto merged = merge_values(
                slots[rpos], detail::path_skeleton(rpath, 0, link), s);
            if (!merged)
              throw FileFormatError(kMod, line_no,
                                    "inconsistent constraints: " + eq);
            slots[rpos] = *merged;
          } else {
            if (rparts.size() > 1)
              throw FileFormatError(kMod, line_no,
                                    "atom value must not contain '.': " +
                                        right);
            link = make_atom(right);
          }
          auto merged =
              merge_values(slots[lpos], detail::path_skeleton(lpath, 0, link),
                           s);
          if (!merged)
            throw FileFormatError(kMod, line_no,
                                  "inconsistent constraints: " + eq);
          slots[lpos] = *merged;
        }
        for (auto& slot : slots) slot = resolve(slot, s);
        r.slots = std::move(slots);
        r.var_count = next_var;
      }
      g.rules.push_back(std::move(r));
    } else if (keyword == "LEX") {
      auto scored = parse_scored_line(body, kMod, line_no);
      if (scored.head.size() != 2)
        throw FileFormatError(kMod, line_no,
                              "expected LEX <key> <category> : <logprob>");
      LexEntry e;
      e.key = scored.head[0];
      e.cat = scored.head[1];
      e.log_prob = scored.log_prob;
      e.features = empty_node();
      if (scored.braces) {
        auto n = std::make_shared<FeatureNode>();
        FeatureValue fs = FeatureValue::node(std::move(n));
        Subst s;
        for (const std::string& eq : split_equations(*scored.braces)) {
          std::size_t eqpos = eq.find('=');
          if (eqpos == std::string::npos)
            throw FileFormatError(kMod, line_no,
                                  "lexical attribute must be 'attr=atom': " +
                                      eq);
          std::string attr = trim(eq.substr(0, eqpos));
          std::string value = trim(eq.substr(eqpos + 1));
          if (attr.empty() || value.empty())
            throw FileFormatError(kMod, line_no, "empty attribute or value");
          auto merged = merge_values(
              fs,
              detail::path_skeleton(split_path(attr), 0, make_atom(value)),
              s);
          if (!merged)
            throw FileFormatError(kMod, line_no,
                                  "inconsistent lexical attributes: " + eq);
          fs = *merged;
        }
        e.features = resolve(fs, s);
      }
      if (!g.lexicon.emplace(e.key, e).second)
        throw FileFormatError(kMod, line_no,
                              "duplicate lexical entry for key: " + e.key);
    } else {
      throw FileFormatError(kMod, line_no, "unknown directive: " + keyword);
    }
  }

  if (!have_start) throw InputError("grammar: no START category");

  // Category definedness: every rhs category and the start category must
  // be a rule lhs or a lexical category.
  std::set<std::string> defined;
  for (const auto& r : g.rules) defined.insert(r.lhs);
  for (const auto& [key, e] : g.lexicon) {
    (void)key;
    defined.insert(e.cat);
  }
  for (const auto& r : g.rules) {
    for (const auto& c : r.rhs) {
      if (defined.count(c) == 0)
        throw InputError("grammar: undefined category '" + c +
                         "' in rule for " + r.lhs);
    }
  }
  if (defined.count(g.start) == 0)
    throw InputError("grammar: undefined START category '" + g.start + "'");

  // Default fast-check paths: top-level attributes that carry atoms
  // anywhere in the lexicon, in sorted order.
  std::set<std::string> fast;
  for (const auto& [key, e] : g.lexicon) {
    (void)key;
    if (!e.features.is_node()) continue;
    for (const auto& [attr, val] : e.features.node_ref().attrs) {
      if (val.is_atom()) fast.insert(attr);
    }
  }
  for (const auto& attr : fast)
    g.fast_check_paths.push_back({attr});

  g.compile();
  return g;
}

}  // namespace latchart
