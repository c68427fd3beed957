#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nint/canonical.hpp"
#include "nint/types.hpp"

namespace nint::dmg {

enum class Method { Standard, DirectCoT, StandardCoT, DMG };

Method method_from_name(const std::string& name);  // "standard", "direct-cot", ...
std::string method_name(Method m);

struct PromptBundle {
    Method method = Method::Standard;
    std::vector<std::string> text_blocks;
    std::vector<Slot> slots;
    int queries_needed = 1;
};

struct PromptOptions {
    int budget_tokens = 6000;  // whitespace tokens, tail truncation of content
};

// Deterministic: same article + method + options give a byte-identical bundle.
PromptBundle build_prompt(const NewsArticle& article, Method method, const Vocabulary& vocab,
                          const PromptOptions& opts = {});

enum class SlotStatus { Ok, Missing, Invalid };

struct ParsedResponse {
    IntentAnnotation annotation;
    std::map<Slot, SlotStatus> status;
    std::map<Slot, std::string> errors;  // per failed slot
    bool complete() const;
    std::vector<Slot> failed_slots() const;
};

// Matches answers to slots by ordinal markers ("3. yes") or labeled headers
// ("fairness: unfair"); values go through the canonicalizer. A slot that
// fails is recorded, never aborts the others.
ParsedResponse parse_response(const std::string& text, const std::vector<Slot>& slots,
                              const Vocabulary& vocab);

// Numbered-list model answer for an annotation; parse_response inverts it.
std::string render_response(const IntentAnnotation& ann, const Vocabulary& vocab);

struct CostRecord {
    Method method = Method::Standard;
    std::string article_id;
    int queries = 0;
    long prompt_tokens = 0;
    long completion_tokens = 0;
    bool parsed_ok = false;
};

struct CostRow {
    std::string method;
    size_t articles = 0;
    double avg_queries = 0.0;
    double avg_tokens = 0.0;  // prompt + completion
    double parse_rate = 0.0;
    std::optional<double> ratio;  // macF1 gain vs standard per 100 tokens
};

// One row per method present in the records. When a macro-F1 table is given,
// ratio = (macF1(method) - macF1(standard)) / (avg_tokens / 100).
std::vector<CostRow> cost_report(const std::vector<CostRecord>& records,
                                 const std::map<std::string, double>& macro_f1 = {});
std::string cost_report_csv(const std::vector<CostRow>& rows);

}  // namespace nint::dmg
