#include "claimtrace/segmentation.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <stdexcept>

#include <unicode/uchar.h>
#include <unicode/utf8.h>

namespace claimtrace {
namespace {

constexpr auto kAbbreviations = std::to_array<std::string_view>({
    "e.g.",  "i.e.",  "fig.", "figs.", "dr.",  "vs.",  "mr.",  "mrs.",  "ms.",
    "prof.", "al.",   "approx.", "vol.", "eq.", "eqs.", "ref.", "refs.", "st.",
    "jr.",   "sr.",   "ca.",  "cf.",  "resp.", "tab.", "sec.", "pp.", "viz.",
    "jan.",  "feb.",  "mar.", "apr.", "jun.", "jul.", "aug.", "sep.", "sept.",
    "oct.",  "nov.",  "dec.",
});

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v';
}

bool is_terminator(char c) { return c == '.' || c == '?' || c == '!'; }

bool is_opener(char c) { return c == '(' || c == '[' || c == '{'; }
bool is_closer(char c) { return c == ')' || c == ']' || c == '}'; }

char opener_for(char closer) {
  switch (closer) {
    case ')': return '(';
    case ']': return '[';
    default: return '{';
  }
}

// Length in bytes of a closing quote at `pos`, or 0.
std::size_t closing_quote_len(std::string_view doc, std::size_t pos) {
  if (doc[pos] == '"' || doc[pos] == '\'') return 1;
  // U+201D RIGHT DOUBLE QUOTATION MARK, U+2019 RIGHT SINGLE QUOTATION MARK
  if (doc.substr(pos, 3) == "\xE2\x80\x9D" || doc.substr(pos, 3) == "\xE2\x80\x99") return 3;
  return 0;
}

std::size_t opening_quote_len(std::string_view doc, std::size_t pos) {
  if (doc[pos] == '"' || doc[pos] == '\'' || doc[pos] == '(' || doc[pos] == '[') return 1;
  // U+201C, U+2018
  if (doc.substr(pos, 3) == "\xE2\x80\x9C" || doc.substr(pos, 3) == "\xE2\x80\x98") return 3;
  return 0;
}

// +1 at each opener that has a matching closer on the same line, -1 at that
// closer. Unmatched brackets contribute nothing, so a stray "(" cannot
// suppress every later boundary.
std::vector<int> bracket_deltas(std::string_view doc) {
  std::vector<int> delta(doc.size(), 0);
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const char c = doc[i];
    if (c == '\n') {
      stack.clear();
    } else if (is_opener(c)) {
      stack.push_back(i);
    } else if (is_closer(c)) {
      const char want = opener_for(c);
      auto it = std::find_if(stack.rbegin(), stack.rend(),
                             [&](std::size_t p) { return doc[p] == want; });
      if (it != stack.rend()) {
        delta[*it] += 1;
        delta[i] -= 1;
        stack.erase(std::next(it).base(), stack.end());
      }
    }
  }
  return delta;
}

bool starts_sentence(std::string_view doc, std::size_t pos) {
  while (pos < doc.size()) {
    const std::size_t q = opening_quote_len(doc, pos);
    if (q == 0) break;
    pos += q;
  }
  if (pos >= doc.size()) return false;

  const auto* bytes = reinterpret_cast<const uint8_t*>(doc.data());
  const auto length = static_cast<int32_t>(doc.size());
  auto offset = static_cast<int32_t>(pos);
  UChar32 cp = 0;
  U8_NEXT(bytes, offset, length, cp);
  if (cp < 0) return false;
  return u_isUUppercase(cp) || u_istitle(cp) || u_isdigit(cp);
}

// True when whitespace (not a newline) follows `pos` and then something that
// can open a sentence.
bool boundary_follows(std::string_view doc, std::size_t pos) {
  if (pos >= doc.size() || !is_space(doc[pos])) return false;
  while (pos < doc.size() && is_space(doc[pos])) {
    if (doc[pos] == '\n') return false;  // the newline itself splits
    ++pos;
  }
  return starts_sentence(doc, pos);
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Acronyms and initials written as letter-period pairs: "J.", "U.S.", "e.g.".
// A lone lowercase letter ("24 h.") is a unit, not an initial.
bool is_dotted_initials(std::string_view token) {
  if (token.size() < 2 || token.size() % 2 != 0) return false;
  if (token.size() == 2 && !std::isupper(static_cast<unsigned char>(token[0]))) return false;
  for (std::size_t i = 0; i < token.size(); i += 2) {
    if (!std::isalpha(static_cast<unsigned char>(token[i])) || token[i + 1] != '.') return false;
  }
  return true;
}

// Token ending at (and including) the period at `period_pos`.
std::string_view token_before(std::string_view doc, std::size_t seg_start, std::size_t period_pos) {
  std::size_t begin = period_pos;
  while (begin > seg_start && !is_space(doc[begin - 1])) --begin;
  std::string_view token = doc.substr(begin, period_pos + 1 - begin);
  while (!token.empty() && (token.front() == '(' || token.front() == '[' || token.front() == '"' ||
                            token.front() == '\'')) {
    token.remove_prefix(1);
  }
  return token;
}

// "1." opening a segment is a list enumerator, not a sentence of its own.
bool is_enumerator(std::string_view doc, std::size_t seg_start, std::size_t period_pos) {
  std::size_t begin = period_pos;
  while (begin > seg_start && std::isdigit(static_cast<unsigned char>(doc[begin - 1]))) --begin;
  if (begin == period_pos) return false;
  for (std::size_t k = seg_start; k < begin; ++k) {
    if (!is_space(doc[k])) return false;
  }
  return true;
}

}  // namespace

std::string_view to_string(Origin origin) noexcept {
  return origin == Origin::Augmented ? "augmented" : "context";
}

Origin parse_origin(std::string_view text) {
  if (text == "context") return Origin::Context;
  if (text == "augmented") return Origin::Augmented;
  throw std::invalid_argument("unknown origin: " + std::string(text));
}

bool is_abbreviation(std::string_view token) {
  const std::string lower = ascii_lower(token);
  if (std::find(kAbbreviations.begin(), kAbbreviations.end(), lower) != kAbbreviations.end()) {
    return true;
  }
  return is_dotted_initials(token);
}

std::vector<SentenceSpan> split_sentences(std::string_view doc) {
  std::vector<SentenceSpan> spans;
  const std::vector<int> delta = bracket_deltas(doc);

  auto emit = [&](std::size_t begin, std::size_t end) {
    while (begin < end && is_space(doc[begin])) ++begin;
    while (end > begin && is_space(doc[end - 1])) --end;
    if (begin == end) return;
    spans.push_back({spans.size(), std::string(doc.substr(begin, end - begin)), begin, end});
  };

  std::size_t seg_start = 0;
  int depth = 0;
  std::size_t i = 0;
  while (i < doc.size()) {
    const char c = doc[i];
    if (c == '\n') {
      emit(seg_start, i);
      seg_start = i + 1;
      depth = 0;
      ++i;
      continue;
    }
    if (!is_terminator(c)) {
      depth += delta[i];
      ++i;
      continue;
    }

    const std::size_t first_terminator = i;
    std::size_t j = i;
    while (j < doc.size() && is_terminator(doc[j])) ++j;
    // closing quotes/brackets directly after the terminator stay with it
    while (j < doc.size()) {
      if (is_closer(doc[j])) {
        depth += delta[j];
        ++j;
      } else if (const std::size_t q = closing_quote_len(doc, j); q > 0) {
        j += q;
      } else {
        break;
      }
    }

    const bool single_period = c == '.' && j > first_terminator &&
                               (first_terminator + 1 == doc.size() ||
                                !is_terminator(doc[first_terminator + 1]));
    const bool abbreviation =
        single_period && (is_abbreviation(token_before(doc, seg_start, first_terminator)) ||
                          is_enumerator(doc, seg_start, first_terminator));

    if (depth <= 0 && !abbreviation && boundary_follows(doc, j)) {
      emit(seg_start, j);
      seg_start = j;
    }
    i = j;
  }
  emit(seg_start, doc.size());
  return spans;
}

std::vector<ContextSentence> index_context(std::span<const std::string> documents,
                                           std::span<const std::string> augmented) {
  std::vector<ContextSentence> out;
  std::size_t document = 0;
  auto add = [&](const std::string& text, Origin origin) {
    for (SentenceSpan span : split_sentences(text)) {
      span.index = out.size();
      out.push_back({std::move(span), origin, document});
    }
    ++document;
  };
  for (const auto& doc : documents) add(doc, Origin::Context);
  for (const auto& doc : augmented) add(doc, Origin::Augmented);
  return out;
}

}  // namespace claimtrace
