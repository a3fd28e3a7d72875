#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace claimtrace {

/// A trimmed sentence and its byte range [char_start, char_end) in the source text.
struct SentenceSpan {
  std::size_t index = 0;
  std::string text;
  std::size_t char_start = 0;
  std::size_t char_end = 0;

  bool operator==(const SentenceSpan&) const = default;
};

enum class Origin { Context, Augmented };

std::string_view to_string(Origin origin) noexcept;
Origin parse_origin(std::string_view text);

/// One indexed context sentence. `document` is the ordinal of the source
/// document it came from; char offsets in `span` are relative to that document.
struct ContextSentence {
  SentenceSpan span;
  Origin origin = Origin::Context;
  std::size_t document = 0;

  std::size_t index() const noexcept { return span.index; }
  const std::string& text() const noexcept { return span.text; }

  bool operator==(const ContextSentence&) const = default;
};

/// Rule-based sentence splitter.
///
/// A boundary is placed after a run of `.`, `?` or `!` (plus any closing
/// quotes or brackets) when it is followed by whitespace and then an
/// uppercase letter or digit, optionally behind an opening quote or bracket.
/// No boundary is placed inside balanced parentheses/brackets, after a
/// stop-listed abbreviation ("e.g.", "Fig.", "et al.", ...), after a
/// single-letter initial, or after a list enumerator ("1.") that opens a
/// line. Newlines always end a sentence.
///
/// Input is treated as UTF-8; the uppercase test uses the Unicode
/// uppercase/titlecase properties and a terminator followed by a combining
/// mark is never a boundary.
std::vector<SentenceSpan> split_sentences(std::string_view document);

/// Splits every document and every augmented text, assigning consecutive
/// indices across all of them. Augmented sentences come last.
std::vector<ContextSentence> index_context(std::span<const std::string> documents,
                                           std::span<const std::string> augmented);

bool is_abbreviation(std::string_view token_with_period);

}  // namespace claimtrace
