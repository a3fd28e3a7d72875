#include "claimtrace/prompts.hpp"

#include <cctype>
#include <regex>

#include "claimtrace/errors.hpp"

namespace claimtrace::prompts {
namespace {

constexpr std::string_view kDecompositionHead = R"(Task:
You are given a sentence or paragraph and its surrounding context (including a question–answer pair when available). Your task is to decompose the given sentence or paragraph into a list of subclaims.

Requirements:
- Each subclaim must express exactly one atomic unit of information.
- Each subclaim must be fully faithful to the original paragraph — do not add information and do not omit information.
- Each subclaim must be semantically complete, meaning it can stand alone as an independent factual statement.
- Replace pronouns with their explicit referent names from the original paragraph.
- If the input sentence or paragraph is a list, enumeration, or line-separated items, convert each item into an individual subclaim.
- If the input sentence or paragraph cannot be meaningfully decomposed or contains insufficient information, output the original sentence or paragraph verbatim as a single-item numbered list.

Output format:
- Output a numbered list starting from 1.
- Each subclaim must be written on a new line.
- Do not include explanations or additional text.

---

Example-1
Input Paragraph:
Avoiding alcohol and water before bed can improve airway stability.

Input Context:
Question: Are there ways to prevent sleep apnea or treat it naturally?
Full Answer: Maintaining a healthy weight can reduce snoring. Avoiding alcohol and water before bed can improve airway stability. Keeping nasal passages clear and exercising regularly contribute to better sleep quality. It is also helpful to sleep on your side instead of back. Drinking water before bed is not advisable.

Output Subclaims:
1. Avoiding alcohol before bed can improve airway stability.
2. Avoiding water before bed can improve airway stability.

Example-2
Input Paragraph:
ankylosing spondylitis, chorioretinopathy, Behçet's disease, psoriasis

Input Context:
Question: List MHC-I-associated inflammatory disorders.
Full Answer: ankylosing spondylitis, chorioretinopathy, Behçet's disease, psoriasis

Output Subclaims:
1. MHC-I-associated inflammatory disorders include ankylosing spondylitis.
2. MHC-I-associated inflammatory disorders include birdshot chorioretinopathy.
3. MHC-I-associated inflammatory disorders include Behçet's disease.
4. MHC-I-associated inflammatory disorders include psoriasis.

---

)";

constexpr std::string_view kEntailmentHead = R"(Task
You are given one premise and one hypothesis. Determine the logical relationship between them: Entailment, Contradiction, or Neutral.

Definitions:
- Entailment: The premise entails the hypothesis if the hypothesis is explicitly stated or can be logically inferred from the premise.
- Contradiction: The premise contradicts the hypothesis if it explicitly negates, denies, or is logically incompatible with the hypothesis.
- Neutral: The premise is neutral if it neither entails nor contradicts the hypothesis, even if they discuss related topics.

Rules:
- Use only the information in the premise and hypothesis.
- Do not use external or background knowledge.
- Select exactly one label.

Output format:
- Return one word only (no explanation): Entailment or Contradiction or Neutral

---

Example-1
Input Premise:
Avoiding alcohol and water before bed can improve airway stability.

Input Hypothesis:
Avoiding water before bed can improve airway stability.

Output:
Entailment

Example-2
Input Premise:
Avoiding alcohol and water before bed can improve airway stability.

Input Hypothesis:
Drinking water before bed is not advisable.

Output:
Contradiction

---

)";

constexpr std::string_view kNegationHead = R"(Task
You are given one sentence. Reverse its meaning.

Guidelines:
- Only negate or reverse the core semantic claim.
- Do NOT add new information.

Output format:
Output only the reversed sentence. Do not add any other text.

---

Example-1
Input Sentence:
Avoiding water before bed can improve airway stability.

Output:
Avoiding water before bed cannot improve airway stability.

Example-2
Input Sentence:
Drinking alcohol before bed can not improve airway stability.

Output:
Drinking alcohol before bed can improve airway stability.

---

)";

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string render_decomposition(std::string_view paragraph, std::string_view question,
                                 std::string_view full_answer) {
  std::string out(kDecompositionHead);
  out += "Input Paragraph:\n";
  out += paragraph;
  out += "\n\nInput Context:\nQuestion: ";
  out += question;
  out += "\nFull Answer: ";
  out += full_answer;
  out += "\n\nOutput Subclaims:\n";
  return out;
}

std::string render_entailment(std::string_view premise, std::string_view hypothesis) {
  std::string out(kEntailmentHead);
  out += "Input Premise:\n";
  out += premise;
  out += "\n\nInput Hypothesis:\n";
  out += hypothesis;
  out += "\n\nOutput:\n";
  return out;
}

std::string render_negation(std::string_view sentence) {
  std::string out(kNegationHead);
  out += "Input Sentence:\n";
  out += sentence;
  out += "\n\nOutput:\n";
  return out;
}

std::vector<std::string> parse_numbered_list(std::string_view reply) {
  static const std::regex item(R"(^\d+\.\s+(.*\S)\s*$)");
  std::vector<std::string> items;
  std::size_t pos = 0;
  while (pos <= reply.size()) {
    std::size_t end = reply.find('\n', pos);
    if (end == std::string_view::npos) end = reply.size();
    const std::string line(trim(reply.substr(pos, end - pos)));
    pos = end + 1;
    if (line.empty()) continue;
    std::smatch match;
    if (!std::regex_match(line, match, item)) {
      throw MalformedReply("decomposition reply line is not a numbered item: " + line,
                           std::string(reply));
    }
    items.push_back(match[1].str());
  }
  if (items.empty()) throw MalformedReply("decomposition reply is empty", std::string(reply));
  return items;
}

EntailmentLabel parse_entailment_reply(std::string_view reply) { return parse_label(reply); }

std::string parse_negation_reply(std::string_view reply) {
  const std::string_view text = trim(reply);
  if (text.empty()) throw MalformedReply("negation reply is empty", std::string(reply));
  if (text.find('\n') != std::string_view::npos) {
    throw MalformedReply("negation reply spans several lines", std::string(reply));
  }
  return std::string(text);
}

}  // namespace claimtrace::prompts
