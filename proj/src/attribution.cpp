#include "nint/attribution.hpp"

#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

#include "nint/error.hpp"

namespace nint::evalkit {

using ad::Mat;
using ad::Tape;
using nlohmann::json;

namespace {

std::vector<std::array<double, 3>> scores_from(Tape& tape, const dmint::ForwardNodes& fwd,
                                               size_t rows) {
    std::vector<std::array<double, 3>> out(rows, {0.0, 0.0, 0.0});
    const std::array<int, 3> features{fwd.f_belief, fwd.f_desire, fwd.f_plan};
    for (size_t t = 0; t < features.size(); ++t) {
        int scalar = tape.sum_abs(features[t]);
        tape.backward(scalar);
        const Mat& grad = tape.grad(fwd.w);
        for (size_t j = 0; j < rows; ++j)
            out[j][t] = grad.row(static_cast<Eigen::Index>(j)).norm();
    }
    return out;
}

}  // namespace

std::vector<TokenAttribution> attribute(const dmint::ModelGraph& graph,
                                        const NewsArticle& article) {
    dmint::ModelGraph& g = const_cast<dmint::ModelGraph&>(graph);
    Tape tape;
    dmint::ParamNodes params = dmint::insert_params(tape, g);
    dmint::TokenStream stream = graph.tokenize(article);
    dmint::ForwardNodes fwd = dmint::forward(tape, graph, params, stream);

    std::vector<std::array<double, 3>> scores = scores_from(tape, fwd, stream.tokens.size());
    std::vector<TokenAttribution> out(stream.tokens.size());
    for (size_t j = 0; j < out.size(); ++j) {
        out[j].token = stream.tokens[j];
        out[j].scores = scores[j];
    }
    return out;
}

std::vector<std::array<double, 3>> attribution_scores(const dmint::ModelGraph& graph,
                                                      const ad::Mat& w, const ad::Mask& mask) {
    dmint::ModelGraph& g = const_cast<dmint::ModelGraph&>(graph);
    Tape tape;
    dmint::ParamNodes params = dmint::insert_params(tape, g);
    int w_node = tape.input(w);
    dmint::ForwardNodes fwd = dmint::forward_embedded(tape, graph, params, w_node, mask);
    return scores_from(tape, fwd, static_cast<size_t>(w.rows()));
}

std::string attribution_jsonl(const std::string& article_id,
                              const std::vector<TokenAttribution>& tokens) {
    std::ostringstream out;
    for (size_t i = 0; i < tokens.size(); ++i) {
        out << json{{"article_id", article_id},
                    {"index", i},
                    {"token", tokens[i].token},
                    {"belief", tokens[i].scores[0]},
                    {"desire", tokens[i].scores[1]},
                    {"plan", tokens[i].scores[2]}}
                   .dump()
            << "\n";
    }
    return out.str();
}

void validate_attribution_jsonl(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::string where = "attribution line " + std::to_string(lineno);
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw Error("SchemaError", where + ": " + e.what());
        }
        if (!j.is_object() || !j.contains("article_id") || !j["article_id"].is_string() ||
            !j.contains("index") || !j["index"].is_number_unsigned() || !j.contains("token") ||
            !j["token"].is_string())
            throw Error("SchemaError", where + ": missing article_id/index/token");
        for (const char* field : {"belief", "desire", "plan"}) {
            if (!j.contains(field) || !j[field].is_number())
                throw Error("SchemaError", where + ": missing numeric field '" +
                                               std::string(field) + "'");
            if (j[field].get<double>() < 0.0)
                throw Error("SchemaError", where + ": negative score in '" +
                                               std::string(field) + "'");
        }
    }
}

namespace {

std::string escape_html(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// darker shade = higher score: interpolate white -> base color
std::string shade(double score, double max_score, int r, int g, int b) {
    double a = max_score > 0.0 ? score / max_score : 0.0;
    int rr = static_cast<int>(255 + a * (r - 255));
    int gg = static_cast<int>(255 + a * (g - 255));
    int bb = static_cast<int>(255 + a * (b - 255));
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", rr, gg, bb);
    return buf;
}

}  // namespace

std::string attribution_html(const std::string& article_id,
                             const std::vector<TokenAttribution>& tokens) {
    struct Dim {
        const char* label;
        int r, g, b;
    };
    const std::array<Dim, 3> dims{{{"belief", 204, 153, 0},  // yellow
                                   {"desire", 204, 0, 0},    // red
                                   {"plan", 0, 51, 204}}};   // blue
    std::ostringstream out;
    out << "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>"
        << escape_html(article_id) << "</title>\n"
        << "<style>body{font-family:sans-serif}span.tok{padding:1px 3px;margin:1px;"
           "display:inline-block}</style></head><body>\n"
        << "<h1>" << escape_html(article_id) << "</h1>\n";
    for (size_t t = 0; t < dims.size(); ++t) {
        double max_score = 0.0;
        for (const auto& tok : tokens) max_score = std::max(max_score, tok.scores[t]);
        out << "<h2>" << dims[t].label << "</h2>\n<p>\n";
        for (const auto& tok : tokens) {
            out << "<span class=\"tok\" style=\"background:"
                << shade(tok.scores[t], max_score, dims[t].r, dims[t].g, dims[t].b) << "\" title=\""
                << tok.scores[t] << "\">" << escape_html(tok.token) << "</span>\n";
        }
        out << "</p>\n";
    }
    out << "</body></html>\n";
    return out.str();
}

}  // namespace nint::evalkit
