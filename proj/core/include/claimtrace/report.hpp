#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "claimtrace/grounding.hpp"
#include "claimtrace/metrics.hpp"
#include "claimtrace/segmentation.hpp"

namespace claimtrace {

enum class ReportFormat { Json, Html, Tsv };

std::string_view to_string(ReportFormat format) noexcept;
ReportFormat parse_report_format(std::string_view text);

/// Everything a single grounding run produces, ready to render.
struct GroundReport {
  std::string response;
  std::vector<ContextSentence> context;
  std::vector<SentenceGrounding> sentences;
  double tau = 0.5;
  /// Absent when no claim survived decomposition.
  std::optional<FaithfulnessRates> rates;
  std::optional<GroundingQuality> quality;
};

GroundReport make_report(std::string response, std::vector<ContextSentence> context,
                         std::vector<SentenceGrounding> sentences, double tau);

/// Keys are emitted in a fixed order so identical runs give identical bytes.
std::string render_json(const GroundReport& report);

/// Self-contained page: inline CSS, no scripts or external assets. Claims
/// link to their context sentences, supporters in green and contradictors in red.
std::string render_html(const GroundReport& report);

/// One row per non-zero matrix entry; claims without evidence get one row with
/// an empty context column.
std::string render_tsv(const GroundReport& report);

std::string render(const GroundReport& report, ReportFormat format);

}  // namespace claimtrace
