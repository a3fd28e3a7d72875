#include "claimtrace/report.hpp"

#include <charconv>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "claimtrace/errors.hpp"

namespace claimtrace {
namespace {

using ordered_json = nlohmann::ordered_json;

std::string shortest(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, end);
}

std::string html_escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&#39;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string tsv_field(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c == '\t' || c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

ordered_json rates_json(const FaithfulnessRates& r) {
  return ordered_json{
      {"fcr", r.fcr},
      {"acr", r.acr},
      {"hcr", r.hcr},
      {"ucr", r.ucr},
      {"claim_count", r.claim_count},
  };
}

ordered_json quality_json(const GroundingQuality& q) {
  ordered_json j;
  j["cer"] = q.cer;
  j["ecss"] = q.ecss ? ordered_json(*q.ecss) : ordered_json(nullptr);
  j["pfcr"] = q.pfcr ? ordered_json(*q.pfcr) : ordered_json(nullptr);
  j["claim_count"] = q.claim_count;
  j["scored_claims"] = q.scored_claims;
  j["unverified_decompositions"] = q.unverified_decompositions;
  return j;
}

std::vector<std::size_t> intersect(const std::vector<std::size_t>& a,
                                   const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

struct ClaimCitations {
  std::vector<std::size_t> supports;
  std::vector<std::size_t> contradicts;
};

ClaimCitations claim_citations(const SentenceGrounding& s, std::size_t row,
                               const std::vector<ContextSentence>& context) {
  ClaimCitations c;
  for (std::size_t j = 0; j < s.matrix.cols(); ++j) {
    const double v = s.matrix(row, j);
    const std::size_t index = j < context.size() ? context[j].index() : j;
    if (v > 0.0) c.supports.push_back(index);
    if (v < 0.0) c.contradicts.push_back(index);
  }
  return c;
}

}  // namespace

std::string_view to_string(ReportFormat format) noexcept {
  switch (format) {
    case ReportFormat::Json: return "json";
    case ReportFormat::Html: return "html";
    case ReportFormat::Tsv: return "tsv";
  }
  return "json";
}

ReportFormat parse_report_format(std::string_view text) {
  if (text == "json") return ReportFormat::Json;
  if (text == "html") return ReportFormat::Html;
  if (text == "tsv") return ReportFormat::Tsv;
  throw ConfigError("unknown report format: " + std::string(text));
}

GroundReport make_report(std::string response, std::vector<ContextSentence> context,
                         std::vector<SentenceGrounding> sentences, double tau) {
  GroundReport r{std::move(response), std::move(context), std::move(sentences), tau, {}, {}};
  std::size_t claims = 0;
  for (const auto& s : r.sentences) claims += s.claims.size();
  if (claims > 0) r.rates = faithfulness_rates(r.sentences);
  return r;
}

std::string render_json(const GroundReport& report) {
  ordered_json root;
  root["tau"] = report.tau;
  root["response"] = report.response;

  ordered_json context = ordered_json::array();
  for (const auto& c : report.context) {
    context.push_back({{"index", c.index()},
                       {"text", c.text()},
                       {"origin", to_string(c.origin)},
                       {"document", c.document}});
  }
  root["context"] = std::move(context);

  ordered_json sentences = ordered_json::array();
  for (const auto& s : report.sentences) {
    ordered_json claims = ordered_json::array();
    ordered_json matrix = ordered_json::array();
    for (std::size_t i = 0; i < s.claims.size(); ++i) {
      const auto& claim = s.claims[i];
      const ClaimCitations cites = claim_citations(s, i, report.context);
      claims.push_back({{"text", claim.text},
                        {"verified", claim.verified},
                        {"attempts_used", claim.attempts_used},
                        {"supports", cites.supports},
                        {"contradicts", cites.contradicts}});
      const auto row = s.matrix.entries.row(i);
      matrix.push_back(std::vector<double>(row.begin(), row.end()));
    }
    sentences.push_back({{"index", s.sentence.index},
                         {"text", s.sentence.text},
                         {"char_start", s.sentence.char_start},
                         {"char_end", s.sentence.char_end},
                         {"claims", std::move(claims)},
                         {"matrix", std::move(matrix)},
                         {"judged_pairs", s.matrix.judged_pairs},
                         {"supports", s.supports},
                         {"contradicts", s.contradicts},
                         {"conflicts", intersect(s.supports, s.contradicts)}});
  }
  root["sentences"] = std::move(sentences);
  root["faithfulness"] = report.rates ? rates_json(*report.rates) : ordered_json(nullptr);
  if (report.quality) root["quality"] = quality_json(*report.quality);
  return root.dump(2) + "\n";
}

std::string render_html(const GroundReport& report) {
  std::ostringstream out;
  out << "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n"
      << "<title>Grounding report</title>\n<style>\n"
      << "body{font-family:sans-serif;max-width:60em;margin:2em auto;line-height:1.5}\n"
      << ".claim{margin-left:1.5em}\n.unverified{font-style:italic;color:#777}\n"
      << "a.support{color:#1a7f37;font-weight:bold}\na.contradict{color:#cf222e;font-weight:bold}\n"
      << "li.augmented{background:#fff0f0}\n.rates td{padding:0 1em}\n"
      << "</style>\n</head>\n<body>\n<h1>Grounding report</h1>\n";
  out << "<p>Evidence threshold &tau; = " << shortest(report.tau) << "</p>\n";

  out << "<h2>Response</h2>\n";
  for (const auto& s : report.sentences) {
    out << "<div class=\"sentence\" id=\"r" << s.sentence.index << "\">\n<p>"
        << html_escape(s.sentence.text);
    for (std::size_t idx : s.supports) {
      out << " <a class=\"support\" href=\"#s" << idx << "\">[" << idx << "]</a>";
    }
    for (std::size_t idx : s.contradicts) {
      out << " <a class=\"contradict\" href=\"#s" << idx << "\">[" << idx << "]</a>";
    }
    out << "</p>\n";
    for (std::size_t i = 0; i < s.claims.size(); ++i) {
      const auto& claim = s.claims[i];
      const ClaimCitations cites = claim_citations(s, i, report.context);
      out << "<p class=\"claim" << (claim.verified ? "" : " unverified") << "\">&#8627; "
          << html_escape(claim.text);
      for (std::size_t idx : cites.supports) {
        out << " <a class=\"support\" href=\"#s" << idx << "\">[" << idx << "]</a>";
      }
      for (std::size_t idx : cites.contradicts) {
        out << " <a class=\"contradict\" href=\"#s" << idx << "\">[" << idx << "]</a>";
      }
      if (!claim.verified) out << " (not entailed by its sentence)";
      out << "</p>\n";
    }
    out << "</div>\n";
  }

  out << "<h2>Context</h2>\n<ol start=\"0\">\n";
  for (const auto& c : report.context) {
    out << "<li id=\"s" << c.index() << "\" value=\"" << c.index() << "\""
        << (c.origin == Origin::Augmented ? " class=\"augmented\"" : "") << ">"
        << html_escape(c.text()) << "</li>\n";
  }
  out << "</ol>\n";

  if (report.rates) {
    const auto& r = *report.rates;
    out << "<h2>Faithfulness</h2>\n<table class=\"rates\">\n"
        << "<tr><th>FCR</th><th>ACR</th><th>HCR</th><th>UCR</th><th>claims</th></tr>\n"
        << "<tr><td>" << shortest(r.fcr) << "</td><td>" << shortest(r.acr) << "</td><td>"
        << shortest(r.hcr) << "</td><td>" << shortest(r.ucr) << "</td><td>" << r.claim_count
        << "</td></tr>\n</table>\n";
  }
  out << "</body>\n</html>\n";
  return out.str();
}

std::string render_tsv(const GroundReport& report) {
  std::ostringstream out;
  out << "sentence_index\tclaim_index\tclaim\tverified\tcontext_index\tscore\tpolarity\n";
  for (const auto& s : report.sentences) {
    for (std::size_t i = 0; i < s.claims.size(); ++i) {
      const auto& claim = s.claims[i];
      bool any = false;
      for (std::size_t j = 0; j < s.matrix.cols(); ++j) {
        const double v = s.matrix(i, j);
        if (v == 0.0) continue;
        any = true;
        const std::size_t index = j < report.context.size() ? report.context[j].index() : j;
        out << s.sentence.index << '\t' << i << '\t' << tsv_field(claim.text) << '\t'
            << (claim.verified ? "true" : "false") << '\t' << index << '\t' << shortest(v)
            << '\t' << (v > 0.0 ? "support" : "contradict") << '\n';
      }
      if (!any) {
        out << s.sentence.index << '\t' << i << '\t' << tsv_field(claim.text) << '\t'
            << (claim.verified ? "true" : "false") << "\t\t0\tnone\n";
      }
    }
  }
  return out.str();
}

std::string render(const GroundReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::Json: return render_json(report);
    case ReportFormat::Html: return render_html(report);
    case ReportFormat::Tsv: return render_tsv(report);
  }
  return render_json(report);
}

}  // namespace claimtrace
