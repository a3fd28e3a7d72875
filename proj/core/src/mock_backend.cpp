#include "claimtrace/mock_backend.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "claimtrace/errors.hpp"

namespace claimtrace {
namespace {

const std::unordered_set<std::string_view>& stop_words() {
  static const std::unordered_set<std::string_view> words = {
      "a",      "an",      "the",    "and",    "or",      "but",     "if",       "then",
      "so",     "of",      "in",     "on",     "at",      "to",      "for",      "from",
      "by",     "with",    "about",  "as",     "into",    "onto",    "over",     "under",
      "between", "through", "during", "before", "after",  "above",   "below",    "up",
      "down",   "out",     "off",    "again",  "further", "once",    "here",     "there",
      "when",   "where",   "why",    "how",    "all",     "any",     "both",     "each",
      "few",    "more",    "most",   "other",  "some",    "such",    "only",     "own",
      "same",   "than",    "too",    "very",   "just",    "also",    "is",       "are",
      "was",    "were",    "be",     "been",   "being",   "am",      "do",       "does",
      "did",    "doing",   "have",   "has",    "had",     "having",  "can",      "could",
      "may",    "might",   "must",   "shall",  "should",  "will",    "would",    "it",
      "its",    "itself",  "this",   "that",   "these",   "those",   "i",        "me",
      "my",     "we",      "our",    "you",    "your",    "he",      "him",      "his",
      "she",    "her",     "they",   "them",   "their",   "what",    "which",    "who",
      "whom",   "whose",   "instead", "keep",  "keeps",   "keeping", "kept",     "s",
  };
  return words;
}

const std::unordered_set<std::string_view>& negation_words() {
  static const std::unordered_set<std::string_view> words = {
      "not", "no", "never", "cannot", "nor", "none", "neither", "without",
  };
  return words;
}

// Irregular comparatives and near-synonyms collapsed onto one term.
const std::unordered_map<std::string_view, std::string_view>& canonical_forms() {
  static const std::unordered_map<std::string_view, std::string_view> forms = {
      {"better", "good"},  {"best", "good"},    {"help", "good"},       {"helps", "good"},
      {"helped", "good"},  {"helping", "good"}, {"helpful", "good"},    {"beneficial", "good"},
  };
  return forms;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(s[i])) != prefix[i]) return false;
  }
  return true;
}

constexpr std::string_view kCasePrefix = "it is not the case that ";

bool is_negation_token(std::string_view token) {
  return negation_words().contains(token) || ends_with(token, "n't");
}

std::string stem(std::string term) {
  if (ends_with(term, "'s")) term.resize(term.size() - 2);
  struct Rule {
    std::string_view suffix;
    std::string_view replacement;
  };
  static constexpr Rule rules[] = {
      {"ies", "y"}, {"ing", ""}, {"ed", ""}, {"ly", ""}, {"es", ""}, {"s", ""}, {"e", ""},
  };
  for (const auto& rule : rules) {
    if (!ends_with(term, rule.suffix)) continue;
    if (rule.suffix == "s" && ends_with(term, "ss")) break;
    const std::size_t stem_len = term.size() - rule.suffix.size();
    if (stem_len < 3) break;
    term.resize(stem_len);
    term += rule.replacement;
    break;
  }
  return term;
}

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

// ---- word-level helpers for decompose/negate -------------------------------

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!current.empty()) words.push_back(std::move(current));
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

std::string join_words(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

std::string key_of(std::string_view word) {
  std::size_t b = 0;
  std::size_t e = word.size();
  auto edge = [](unsigned char c) { return !(std::isalnum(c) || c == '\'' || c >= 0x80); };
  while (b < e && edge(word[b])) ++b;
  while (e > b && edge(word[e - 1])) --e;
  std::string key(word.substr(b, e - b));
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return key;
}

// Trailing punctuation of a word (e.g. "," in "clear,").
std::string_view trailing_punct(std::string_view word) {
  std::size_t e = word.size();
  while (e > 0 && std::ispunct(static_cast<unsigned char>(word[e - 1])) && word[e - 1] != '\'') --e;
  return word.substr(e);
}

std::string capitalize(std::string s) {
  if (!s.empty() && std::islower(static_cast<unsigned char>(s[0]))) {
    s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  }
  return s;
}

std::string decapitalize(std::string s) {
  // Leave acronyms ("MHC", "DNA") alone.
  if (s.size() >= 2 && std::isupper(static_cast<unsigned char>(s[0])) &&
      std::islower(static_cast<unsigned char>(s[1]))) {
    s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
  }
  return s;
}

// Replacement for `word` keeping its leading capital and trailing punctuation.
std::string replace_core(std::string_view word, std::string_view core) {
  std::string out(core);
  if (!word.empty() && std::isupper(static_cast<unsigned char>(word[0]))) out = capitalize(out);
  out += trailing_punct(word);
  return out;
}

const std::unordered_set<std::string_view>& predicate_words() {
  static const std::unordered_set<std::string_view> words = {
      "is",         "are",       "was",        "were",      "can",        "cannot",   "could",
      "may",        "might",     "will",       "would",     "should",     "must",     "has",
      "have",       "had",       "does",       "do",        "did",        "helps",    "improves",
      "reduces",    "increases", "causes",     "prevents",  "contributes", "contribute",
      "include",    "includes",  "lowers",     "raises",    "promotes",   "protects", "requires",
      "affects",    "treats",    "supports",   "inhibits",  "induces",    "decreases",
      "enhances",   "remains",   "becomes",    "appears",   "seems",      "shows",    "leads",
      "relieves",   "improve",   "reduce",     "prevent",   "help",       "lower",    "promote",
      "protect",    "require",   "affect",     "inhibit",   "induce",     "enhance",  "relieve",
      "isn't",      "aren't",    "can't",      "doesn't",   "don't",      "won't",
  };
  return words;
}

// Third-person verbs the negator can rewrite as "does not <base>".
const std::unordered_set<std::string_view>& third_person_verbs() {
  static const std::unordered_set<std::string_view> words = {
      "helps",    "improves", "reduces",   "increases", "causes",   "prevents", "contributes",
      "includes", "lowers",   "raises",    "promotes",  "protects", "requires", "affects",
      "treats",   "supports", "inhibits",  "induces",   "decreases", "enhances", "leads",
      "relieves", "shows",    "worsens",   "triggers",  "blocks",   "binds",    "regulates",
  };
  return words;
}

const std::unordered_set<std::string_view>& plain_auxiliaries() {
  static const std::unordered_set<std::string_view> words = {
      "is", "are", "was", "were", "will", "would", "should", "could", "may", "might", "must",
  };
  return words;
}

std::string base_form(std::string_view verb) {
  std::string v(verb);
  if (ends_with(v, "ies")) return v.substr(0, v.size() - 3) + "y";
  for (std::string_view s : {"ches", "shes", "sses", "xes", "zes"}) {
    if (ends_with(v, s)) return v.substr(0, v.size() - 2);
  }
  if (ends_with(v, "s")) v.pop_back();
  return v;
}

std::string third_person(std::string_view base) {
  std::string v(base);
  if (v.size() >= 2 && v.back() == 'y' &&
      std::string_view("aeiou").find(v[v.size() - 2]) == std::string_view::npos) {
    return v.substr(0, v.size() - 1) + "ies";
  }
  for (std::string_view s : {"ch", "sh", "ss", "x", "z"}) {
    if (ends_with(v, s)) return v + "es";
  }
  return v + "s";
}

bool has_content(const std::vector<std::string>& words) {
  return !lexicon::content_terms(join_words(words)).empty();
}

bool is_gerund(std::string_view word) {
  const std::string key = key_of(word);
  return key.size() > 4 && ends_with(key, "ing");
}

std::vector<std::vector<std::string>> conjuncts(const std::vector<std::string>& words) {
  std::vector<std::vector<std::string>> parts(1);
  for (const auto& w : words) {
    if (key_of(w) == "and") {
      parts.emplace_back();
    } else if (!w.empty() && (w.back() == ',' || w.back() == ';')) {
      parts.back().push_back(w.substr(0, w.size() - 1));
      parts.emplace_back();
    } else {
      parts.back().push_back(w);
    }
  }
  std::erase_if(parts, [](const auto& p) { return p.empty(); });
  return parts;
}

std::vector<std::string> concat(std::initializer_list<std::span<const std::string>> pieces) {
  std::vector<std::string> out;
  for (auto piece : pieces) out.insert(out.end(), piece.begin(), piece.end());
  return out;
}

std::vector<std::string> decompose_list(std::string_view sentence, std::string_view question) {
  std::string topic(question);
  topic = topic.substr(std::min<std::size_t>(topic.size(), 5));  // "List "
  while (!topic.empty() && (std::isspace(static_cast<unsigned char>(topic.back())) ||
                            topic.back() == '.' || topic.back() == '?' || topic.back() == ':')) {
    topic.pop_back();
  }
  while (!topic.empty() && std::isspace(static_cast<unsigned char>(topic.front()))) {
    topic.erase(topic.begin());
  }
  std::vector<std::string> claims;
  for (const auto& item : conjuncts(split_words(sentence))) {
    std::string text = join_words(item);
    while (!text.empty() && (text.back() == '.' || text.back() == ',')) text.pop_back();
    if (text.empty()) continue;
    claims.push_back(capitalize(topic) + " include " + text + ".");
  }
  return claims;
}

}  // namespace

namespace lexicon {

std::vector<std::string> tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    while (!current.empty() && (current.front() == '-' || current.front() == '\'')) {
      current.erase(current.begin());
    }
    while (!current.empty() && (current.back() == '-' || current.back() == '\'')) {
      current.pop_back();
    }
    if (!current.empty()) out.push_back(std::move(current));
    current.clear();
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (text.substr(i, 3) == "\xE2\x80\x99") {  // U+2019 as apostrophe
      current += '\'';
      i += 2;
    } else if (std::isalnum(c) || c == '\'' || c == '-') {
      current += static_cast<char>(std::tolower(c));
    } else if (c >= 0x80) {
      current += static_cast<char>(c);
    } else {
      flush();
    }
  }
  flush();
  return out;
}

namespace {

// Drops a leading "it is not the case that" so "case" never counts as content.
std::pair<std::string_view, bool> strip_case_prefix(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
    text.remove_prefix(1);
  }
  if (starts_with_ci(text, kCasePrefix)) return {text.substr(kCasePrefix.size()), true};
  return {text, false};
}

}  // namespace

std::vector<std::string> content_terms(std::string_view text) {
  const auto [rest, prefixed] = strip_case_prefix(text);
  (void)prefixed;
  std::vector<std::string> terms;
  for (auto& token : tokens(rest)) {
    if (stop_words().contains(token) || is_negation_token(token)) continue;
    if (auto it = canonical_forms().find(token); it != canonical_forms().end()) {
      terms.emplace_back(it->second);
      continue;
    }
    std::string term = stem(std::move(token));
    if (term.empty() || stop_words().contains(term)) continue;
    terms.push_back(std::move(term));
  }
  return terms;
}

std::size_t negation_count(std::string_view text) {
  const auto [rest, prefixed] = strip_case_prefix(text);
  std::size_t count = prefixed ? 1 : 0;
  for (const auto& token : tokens(rest)) {
    if (is_negation_token(token)) ++count;
  }
  return count;
}

}  // namespace lexicon

MockBackend::MockBackend(std::size_t dimension) : dimension_(dimension) {
  if (dimension_ == 0) throw std::invalid_argument("mock embedding dimension must be positive");
}

std::size_t MockBackend::bucket(std::string_view term) const noexcept {
  return static_cast<std::size_t>(fnv1a(term) % dimension_);
}

EmbeddingVector MockBackend::embed_one(std::string_view text) const {
  std::vector<std::string> terms = lexicon::content_terms(text);
  if (terms.empty()) terms = lexicon::tokens(text);
  if (terms.empty()) {
    std::string_view trimmed = text;
    while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.front()))) {
      trimmed.remove_prefix(1);
    }
    while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back()))) {
      trimmed.remove_suffix(1);
    }
    if (trimmed.empty()) throw std::invalid_argument("cannot embed empty text");
    terms.emplace_back(trimmed);
  }
  std::vector<double> counts(dimension_, 0.0);
  for (const auto& term : terms) counts[bucket(term)] += 1.0;
  return EmbeddingVector(std::move(counts));
}

std::vector<EmbeddingVector> MockBackend::embed(std::span<const std::string> texts) const {
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (const auto& text : texts) out.push_back(embed_one(text));
  return out;
}

EntailmentLabel MockBackend::judge(std::string_view premise, std::string_view hypothesis) const {
  const auto premise_terms = lexicon::content_terms(premise);
  const auto hypothesis_terms = lexicon::content_terms(hypothesis);
  const std::set<std::string> premise_set(premise_terms.begin(), premise_terms.end());
  const std::set<std::string> hypothesis_set(hypothesis_terms.begin(), hypothesis_terms.end());
  if (!std::includes(premise_set.begin(), premise_set.end(), hypothesis_set.begin(),
                     hypothesis_set.end())) {
    return EntailmentLabel::Neutral;
  }
  const bool same_parity =
      lexicon::negation_count(premise) % 2 == lexicon::negation_count(hypothesis) % 2;
  return same_parity ? EntailmentLabel::Entailment : EntailmentLabel::Contradiction;
}

std::vector<std::string> MockBackend::decompose(std::string_view sentence,
                                                const DecompositionContext& context) const {
  std::string body(sentence);
  while (!body.empty() && std::isspace(static_cast<unsigned char>(body.back()))) body.pop_back();
  while (!body.empty() && std::isspace(static_cast<unsigned char>(body.front()))) {
    body.erase(body.begin());
  }
  if (body.empty()) throw std::invalid_argument("cannot decompose an empty sentence");

  std::string terminator;
  while (!body.empty() && (body.back() == '.' || body.back() == '!' || body.back() == '?')) {
    terminator.insert(terminator.begin(), body.back());
    body.pop_back();
  }

  const std::vector<std::string> words = split_words(body);
  const auto predicate_at =
      std::find_if(words.begin(), words.end(),
                   [](const std::string& w) { return predicate_words().contains(key_of(w)); });

  if (predicate_at == words.end()) {
    if (context.question && !context.question->empty()) {
      const auto q = split_words(*context.question);
      if (!q.empty() && key_of(q.front()) == "list") {
        auto claims = decompose_list(body, *context.question);
        if (!claims.empty()) return claims;
      }
    }
    return {std::string(sentence)};
  }

  const auto k = static_cast<std::size_t>(predicate_at - words.begin());
  const std::span<const std::string> all(words);
  const std::vector<std::string> subject(words.begin(), predicate_at);
  const std::vector<std::string> predicate(predicate_at, words.end());

  std::vector<std::vector<std::string>> pieces;
  const auto subject_parts = conjuncts(subject);
  const bool subject_split =
      k > 0 && subject_parts.size() >= 2 &&
      std::all_of(subject_parts.begin(), subject_parts.end(), has_content);

  if (subject_split) {
    const auto& first = subject_parts.front();
    const bool object_coordination =
        is_gerund(first.front()) && first.size() >= 2 &&
        std::none_of(subject_parts.begin() + 1, subject_parts.end(),
                     [](const auto& part) { return is_gerund(part.front()); });
    if (object_coordination) {
      // "Avoiding alcohol and water before bed ..." -> shared gerund and tail
      const std::string& gerund = first.front();
      const auto& last = subject_parts.back();
      const std::vector<std::string> tail(last.begin() + 1, last.end());
      for (std::size_t p = 0; p < subject_parts.size(); ++p) {
        std::vector<std::string> object;
        if (p == 0) {
          object.assign(first.begin() + 1, first.end());
        } else if (p + 1 == subject_parts.size()) {
          object.push_back(last.front());
        } else {
          object = subject_parts[p];
        }
        std::vector<std::string> claim{gerund};
        claim.insert(claim.end(), object.begin(), object.end());
        claim.insert(claim.end(), tail.begin(), tail.end());
        claim.insert(claim.end(), predicate.begin(), predicate.end());
        pieces.push_back(std::move(claim));
      }
    } else {
      for (const auto& part : subject_parts) pieces.push_back(concat({part, predicate}));
    }
  } else if (k > 0) {
    // "Aspirin reduces fever and relieves pain" -> shared subject
    for (std::size_t b = k + 2; b + 1 < words.size(); ++b) {
      if (key_of(words[b]) != "and") continue;
      if (!predicate_words().contains(key_of(words[b + 1]))) continue;
      std::vector<std::string> first(all.begin() + static_cast<std::ptrdiff_t>(k),
                                     all.begin() + static_cast<std::ptrdiff_t>(b));
      std::vector<std::string> second(all.begin() + static_cast<std::ptrdiff_t>(b + 1), all.end());
      if (!first.empty() && first.back().ends_with(',')) first.back().pop_back();
      if (has_content(first) && has_content(second)) {
        pieces.push_back(concat({subject, first}));
        pieces.push_back(concat({subject, second}));
      }
      break;
    }
  }

  if (pieces.empty()) return {std::string(sentence)};
  std::vector<std::string> claims;
  claims.reserve(pieces.size());
  for (const auto& piece : pieces) claims.push_back(capitalize(join_words(piece)) + terminator);
  return claims;
}

std::string MockBackend::negate(std::string_view claim) const {
  std::string_view text = claim;
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
    text.remove_prefix(1);
  }
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
    text.remove_suffix(1);
  }
  if (text.empty()) throw std::invalid_argument("cannot negate an empty claim");

  if (starts_with_ci(text, kCasePrefix)) {
    return capitalize(std::string(text.substr(kCasePrefix.size())));
  }

  std::vector<std::string> words = split_words(text);
  for (std::size_t i = 0; i < words.size(); ++i) {
    const std::string key = key_of(words[i]);
    const bool next_is_not = i + 1 < words.size() && key_of(words[i + 1]) == "not";
    auto drop_next = [&] {
      words[i] += trailing_punct(words[i + 1]);
      words.erase(words.begin() + static_cast<std::ptrdiff_t>(i) + 1);
    };

    if (key == "cannot" || key == "can't") {
      words[i] = replace_core(words[i], "can");
      return join_words(words);
    }
    if (key == "can") {
      if (next_is_not) {
        drop_next();
      } else {
        words[i] = replace_core(words[i], "cannot");
      }
      return join_words(words);
    }
    if (key == "doesn't" || key == "don't" || (key == "does" && next_is_not) ||
        (key == "do" && next_is_not)) {
      const bool contracted = key.ends_with("n't");
      const bool singular = key.starts_with("does");
      const std::size_t verb_at = contracted ? i + 1 : i + 2;
      if (verb_at < words.size()) {
        const std::string verb = key_of(words[verb_at]);
        std::string replacement = singular ? third_person(verb) : verb;
        if (std::isupper(static_cast<unsigned char>(words[i][0]))) {
          replacement = capitalize(replacement);
        }
        replacement += trailing_punct(words[verb_at]);
        words[verb_at] = std::move(replacement);
        words.erase(words.begin() + static_cast<std::ptrdiff_t>(i),
                    words.begin() + static_cast<std::ptrdiff_t>(verb_at));
        return join_words(words);
      }
    }
    if (key == "does" || key == "do" || key == "did") {
      if (next_is_not) {
        drop_next();
      } else {
        words.insert(words.begin() + static_cast<std::ptrdiff_t>(i) + 1, "not");
      }
      return join_words(words);
    }
    if (key.ends_with("n't")) {
      const std::string base = key.substr(0, key.size() - 3);
      if (plain_auxiliaries().contains(base) || key == "won't") {
        words[i] = replace_core(words[i], key == "won't" ? "will" : base);
        return join_words(words);
      }
    }
    if (plain_auxiliaries().contains(key)) {
      if (next_is_not) {
        drop_next();
      } else {
        const std::string punct(trailing_punct(words[i]));
        words[i].resize(words[i].size() - punct.size());
        words.insert(words.begin() + static_cast<std::ptrdiff_t>(i) + 1, "not" + punct);
      }
      return join_words(words);
    }
    if (third_person_verbs().contains(key)) {
      const std::string punct(trailing_punct(words[i]));
      const bool upper = std::isupper(static_cast<unsigned char>(words[i][0])) != 0;
      words[i] = base_form(key) + punct;
      words.insert(words.begin() + static_cast<std::ptrdiff_t>(i), upper ? "Does" : "does");
      words.insert(words.begin() + static_cast<std::ptrdiff_t>(i) + 1, "not");
      return join_words(words);
    }
  }
  return "It is not the case that " + decapitalize(std::string(text));
}

Backends make_mock_backends(std::size_t dimension) {
  auto mock = std::make_shared<const MockBackend>(dimension);
  return {mock, mock, mock, mock};
}

}  // namespace claimtrace
