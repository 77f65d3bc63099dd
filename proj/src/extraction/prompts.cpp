#include "common/text.hpp"
#include "extraction/extraction.hpp"

namespace chronokg {

namespace {

constexpr const char* kPrimaryHead =
    "You are a temporal biomedical knowledge extraction system. Your PRIMARY\n"
    "task is to extract relationships WITH TEMPORAL GROUNDING from the text\n"
    "about {disease_name}.\n"
    "\n"
    "CRITICAL: Every relationship you extract MUST include temporal information\n"
    "when available.\n"
    "\n"
    "Extraction priorities (highest to lowest):\n"
    "1. TEMPORAL FACTS: onset ages, disease milestones, progression timelines,\n"
    "   treatment timing, discovery dates\n"
    "2. EVIDENCE-DATED FACTS: relationships anchored by publication year\n"
    "3. CONDITIONAL FACTS: relationships that depend on age, stage, genetic\n"
    "   subtype\n"
    "4. STATIC FACTS: general relationships without temporal context\n"
    "\n";

constexpr const char* kOutputFormat =
    "Output format (JSON):\n"
    "{\n"
    "  \"triples\": [\n"
    "    {\n"
    "      \"subject\": \"entity name\",\n"
    "      \"subject_type\": \"disease|gene/protein|drug|phenotype|anatomy|...\",\n"
    "      \"relation\": \"disease_protein|indication|disease_phenotype_positive|...\",\n"
    "      \"object\": \"entity name\",\n"
    "      \"object_type\": \"same vocabulary as subject_type\",\n"
    "      \"confidence\": \"high|medium|low\",\n"
    "      \"evidence_text\": \"exact quote from source (max 200 chars)\",\n"
    "      \"temporal_context\": {\n"
    "        \"onset_age_min\": 3.0,\n"
    "        \"onset_age_max\": 12.0,\n"
    "        \"progression_stage\": \"ambulatory\",\n"
    "        \"milestone\": \"loss of ambulation\",\n"
    "        \"discovery_year\": 2015,\n"
    "        \"temporal_qualifier\": \"by age 12\"\n"
    "      },\n"
    "      \"conditions\": {\n"
    "        \"age_group\": \"pediatric\",\n"
    "        \"genetic_subtype\": \"exon deletion\"\n"
    "      }\n"
    "    }\n"
    "  ]\n"
    "}\n";

constexpr const char* kContext =
    "\n"
    "Disease context:\n"
    "- Name: {disease_name}\n"
    "- Category: {disease_category}\n"
    "- Inheritance: {inheritance_pattern}\n"
    "- Known genes: {known_genes}\n"
    "- Key phenotypes: {known_phenotypes}\n"
    "- Differential diagnoses: {differential_diseases}\n";

constexpr const char* kPrimaryTail =
    "\n"
    "Source text:\n"
    "{text}\n"
    "\n"
    "Extract ALL temporally-grounded relationships. Return valid JSON only.";

constexpr const char* kSecondPassHead =
    "SECOND PASS — TEMPORAL ONLY: Find temporal information that was missed.\n"
    "Extract ONLY relationships with temporal grounding: ages, stages, durations,\n"
    "progression, milestones. Skip any fact without temporal content.\n"
    "\n"
    "Output format (JSON): same as primary extraction, but 'temporal_context'\n"
    "field is REQUIRED (non-null).\n"
    "\n"
    "Primary extraction ";

constexpr const char* kSecondPassTail =
    "\n"
    "Source text:\n"
    "{text}\n"
    "\n"
    "Return valid JSON only.";

std::string list_or_marker(const std::vector<std::string>& v) {
  return v.empty() ? std::string(kEmptyListMarker) : text::join(v, ", ");
}

std::string value_or_marker(const std::optional<std::string>& v) {
  return v && !text::trim(*v).empty() ? *v : std::string(kEmptyListMarker);
}

std::string fill_context(const DiseaseProfile& p) {
  std::string s = kContext;
  s = text::replace_all(std::move(s), "{disease_name}",
                        p.name.empty() ? std::string(kEmptyListMarker) : p.name);
  s = text::replace_all(std::move(s), "{disease_category}", value_or_marker(p.category));
  s = text::replace_all(std::move(s), "{inheritance_pattern}", value_or_marker(p.inheritance_pattern));
  s = text::replace_all(std::move(s), "{known_genes}", list_or_marker(p.known_genes));
  s = text::replace_all(std::move(s), "{known_phenotypes}", list_or_marker(p.known_phenotypes));
  return text::replace_all(std::move(s), "{differential_diseases}",
                           list_or_marker(p.differential_diseases));
}

// Substitutes {text} last so placeholder-like strings inside the document
// are never expanded.
std::string with_text(std::string tmpl, const std::string& body) {
  auto pos = tmpl.find("{text}");
  return tmpl.replace(pos, 6, body);
}

}  // namespace

std::string build_primary_prompt(const DiseaseProfile& profile, const SourceDocument& doc) {
  std::string head = text::replace_all(kPrimaryHead, "{disease_name}",
                                       profile.name.empty() ? std::string(kEmptyListMarker)
                                                            : profile.name);
  return head + kOutputFormat + fill_context(profile) + with_text(kPrimaryTail, doc.text);
}

std::string build_temporal_prompt(const SourceDocument& doc) {
  return std::string(kSecondPassHead) + kOutputFormat + with_text(kSecondPassTail, doc.text);
}

std::string build_temporal_prompt(const SourceDocument& doc, const DiseaseProfile& profile) {
  return std::string(kSecondPassHead) + kOutputFormat + fill_context(profile) +
         with_text(kSecondPassTail, doc.text);
}

}  // namespace chronokg
