#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "claimtrace/backends.hpp"

namespace claimtrace::prompts {

/// Decomposition instruction with its two worked demonstrations, followed by
/// the paragraph, question and full answer to decompose.
std::string render_decomposition(std::string_view paragraph, std::string_view question,
                                 std::string_view full_answer);

/// Three-way premise/hypothesis instruction with two demonstrations.
std::string render_entailment(std::string_view premise, std::string_view hypothesis);

/// Meaning-reversal instruction with two demonstrations.
std::string render_negation(std::string_view sentence);

/// Every non-blank line must look like "<n>. <claim>". Throws MalformedReply.
std::vector<std::string> parse_numbered_list(std::string_view reply);

/// Exactly one label word after trimming. Throws MalformedReply.
EntailmentLabel parse_entailment_reply(std::string_view reply);

/// Trimmed, non-empty single sentence. Throws MalformedReply.
std::string parse_negation_reply(std::string_view reply);

}  // namespace claimtrace::prompts
