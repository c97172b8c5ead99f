#include "narrlens/llm.hpp"

#include "http_util.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

namespace narrlens {

using nlohmann::json;

namespace {

const char* kOtherLabel = "Other";

const char* kRefineSystem =
    "You are an expert analyst of narratives in news articles. Follow the "
    "instructions exactly and end your reply with the required LABELS line.";

const char* kExplainSystem =
    "You are an expert analyst of narratives in news articles. Work through "
    "the given reasoning structure and finish with a grounded justification.";

bool ends_with_sentence_terminator(const std::string& token) {
    if (token.empty()) return false;
    char last = token.back();
    if (last == '.' || last == '!' || last == '?') return true;
    // devanagari danda U+0964
    return token.size() >= 3 && static_cast<unsigned char>(token[token.size() - 3]) == 0xE0 &&
           static_cast<unsigned char>(token[token.size() - 2]) == 0xA5 &&
           static_cast<unsigned char>(token[token.size() - 1]) == 0xA4;
}

std::string numbered_list(const std::vector<std::string>& items) {
    std::ostringstream out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        out << (i + 1) << ". " << items[i] << '\n';
    }
    return out.str();
}

struct LabelsAttempt {
    std::vector<std::string> labels;
    std::string error; // empty on success
};

// One backend exchange + validation, with a single corrective retry.
std::vector<std::string> ask_for_labels(
    ChatBackend& backend, const PromptBundle& bundle,
    const std::function<LabelsAttempt(const std::string&)>& validate, int* retries_used,
    std::vector<std::string>* raw_responses) {
    std::vector<ChatMessage> messages = bundle.messages();
    std::string response = backend.complete(messages);
    if (raw_responses) raw_responses->push_back(response);
    LabelsAttempt attempt = validate(response);
    if (attempt.error.empty()) {
        return attempt.labels;
    }

    messages.push_back({"assistant", response});
    messages.push_back({"user",
                        "Your final line was invalid: " + attempt.error +
                            ". Reply again and end with exactly one line of the form "
                            "'LABELS: <labels separated by ;>' using only the offered labels, "
                            "or 'LABELS: none' if none apply."});
    std::string retry_response = backend.complete(messages);
    if (raw_responses) raw_responses->push_back(retry_response);
    if (retries_used) *retries_used += 1;
    LabelsAttempt second = validate(retry_response);
    if (!second.error.empty()) {
        throw Error("backend reply invalid after retry: " + second.error);
    }
    return second.labels;
}

} // namespace

void ChatBackendConfig::validate() const {
    if (temperature < 0.0) throw Error("chat config: temperature must be >= 0");
    if (retries < 0) throw Error("chat config: retries must be >= 0");
    if (mock_script.empty() && endpoint.empty()) {
        throw Error("chat config: need an endpoint or a mock_script");
    }
}

RemoteChatBackend::RemoteChatBackend(ChatBackendConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
}

std::string RemoteChatBackend::complete(const std::vector<ChatMessage>& messages) {
    json msg_array = json::array();
    for (const ChatMessage& m : messages) {
        msg_array.push_back({{"role", m.role}, {"content", m.content}});
    }
    json request = {{"model", cfg_.model_name},
                    {"messages", msg_array},
                    {"temperature", cfg_.temperature},
                    {"max_tokens", cfg_.max_output_tokens}};
    std::string body = detail::post_json_with_retries(cfg_.endpoint, request.dump(),
                                                      cfg_.timeout_ms, cfg_.retries);
    try {
        json response = json::parse(body);
        return response.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const json::exception& e) {
        throw Error(std::string("chat response has unexpected shape: ") + e.what());
    }
}

MockChatBackend::MockChatBackend(const std::filesystem::path& script_path) {
    json script;
    try {
        script = json::parse(read_text_file(script_path));
    } catch (const json::exception& e) {
        throw Error("mock script " + script_path.string() + " is not valid JSON: " + e.what());
    }
    if (!script.is_array()) {
        throw Error("mock script " + script_path.string() + " must be a JSON array");
    }
    for (const json& item : script) {
        Entry e;
        e.response = item.at("response").get<std::string>();
        if (item.contains("fingerprint")) {
            std::string fp = item["fingerprint"].get<std::string>();
            if (fp != "*") e.fingerprint = fp;
        }
        entries_.push_back(std::move(e));
    }
}

std::string MockChatBackend::complete(const std::vector<ChatMessage>& messages) {
    std::lock_guard<std::mutex> lock(mutex_);
    if (next_ >= entries_.size()) {
        throw Error("mock script exhausted after " + std::to_string(entries_.size()) +
                    " responses");
    }
    const Entry& e = entries_[next_];
    if (e.fingerprint) {
        std::string actual = prompt_fingerprint(messages);
        if (actual != *e.fingerprint) {
            throw Error("mock script entry " + std::to_string(next_) +
                        ": prompt fingerprint mismatch (expected " + *e.fingerprint + ", got " +
                        actual + ")");
        }
    }
    ++next_;
    return e.response;
}

std::size_t MockChatBackend::consumed() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return next_;
}

std::size_t MockChatBackend::remaining() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return entries_.size() - next_;
}

std::unique_ptr<ChatBackend> make_chat_backend(const ChatBackendConfig& cfg) {
    cfg.validate();
    if (cfg.is_mock()) {
        return std::make_unique<MockChatBackend>(cfg.mock_script);
    }
    return std::make_unique<RemoteChatBackend>(cfg);
}

std::string prompt_fingerprint(const std::vector<ChatMessage>& messages) {
    std::string canon;
    for (const ChatMessage& m : messages) {
        canon += m.role;
        canon += '\x1e';
        canon += m.content;
        canon += '\x1f';
    }
    return to_hex(fnv1a64(canon));
}

std::vector<ChatMessage> PromptBundle::messages() const {
    return {{"system", system}, {"user", user}};
}

std::optional<std::vector<std::string>> parse_labels_line(const std::string& response) {
    std::vector<std::string> lines = split(response, '\n');
    for (auto it = lines.rbegin(); it != lines.rend(); ++it) {
        std::string line = trim(*it);
        if (line.rfind("LABELS:", 0) != 0) continue;
        std::string content = trim(line.substr(7));
        if (content == "none") {
            return std::vector<std::string>{};
        }
        std::vector<std::string> labels;
        std::set<std::string> seen;
        for (const std::string& raw : split(content, ';')) {
            std::string label = trim(raw);
            if (label.empty()) continue;
            if (seen.insert(label).second) labels.push_back(std::move(label));
        }
        if (labels.empty()) return std::nullopt; // "LABELS:" with no content
        return labels;
    }
    return std::nullopt;
}

PromptBundle build_stage1_prompt(const Article& article,
                                 const std::vector<std::string>& candidates,
                                 const Taxonomy& taxonomy) {
    if (candidates.empty()) {
        throw Error("stage-1 prompt: no candidate labels");
    }
    std::string block = render_taxonomy_block(taxonomy, candidates, LabelLevel::Main);

    std::ostringstream user;
    user << "Task: review the candidate narrative labels proposed for the article below. "
            "Keep every label genuinely supported by the text and remove the rest. "
            "Never add a label that is not in the candidate list.\n"
         << "\n"
         << "Reason as a tree of thoughts: open one branch per candidate label, collect the "
            "evidence for and against that branch, prune branches whose evidence is weak or "
            "contradicted, and keep the surviving labels.\n"
         << "\n"
         << "Article (id " << article.id << "):\n"
         << article.text << "\n"
         << "\n"
         << "Candidate labels:\n"
         << numbered_list(candidates) << "\n"
         << "Narrative reference:\n"
         << block << "\n"
         << "End your reply with exactly one line of the form:\n"
         << "LABELS: <kept labels separated by ;>\n"
         << "or, if no candidate label applies:\n"
         << "LABELS: none\n";

    PromptBundle bundle;
    bundle.system = kRefineSystem;
    bundle.user = user.str();
    bundle.stage = PromptStage::NarrativeRefine;
    bundle.injected_labels = candidates;
    return bundle;
}

PromptBundle build_sub_prompt(const Article& article, const std::string& narrative,
                              const Taxonomy& taxonomy) {
    const std::vector<std::string>& subs = taxonomy.subs_of(narrative);
    std::string block = render_taxonomy_block(taxonomy, subs, LabelLevel::Sub);

    std::ostringstream user;
    user << "Task: the article below carries the narrative \"" << narrative
         << "\". Select every sub-narrative of that narrative which the text supports. "
            "Choose only from the sub-narratives listed below.\n"
         << "\n"
         << "Reason as a tree of thoughts: open one branch per sub-narrative, weigh the "
            "evidence on each branch, prune the unsupported ones, and keep the rest.\n"
         << "\n"
         << "Article (id " << article.id << "):\n"
         << article.text << "\n"
         << "\n"
         << "Sub-narratives of \"" << narrative << "\":\n"
         << numbered_list(subs) << "\n"
         << "Sub-narrative reference:\n"
         << block << "\n"
         << "End your reply with exactly one line of the form:\n"
         << "LABELS: <selected sub-narratives separated by ;>\n"
         << "or, if none applies:\n"
         << "LABELS: none\n";

    PromptBundle bundle;
    bundle.system = kRefineSystem;
    bundle.user = user.str();
    bundle.stage = PromptStage::SubAssign;
    bundle.injected_labels = subs;
    return bundle;
}

std::vector<std::string> refine_narratives(ChatBackend& backend, const PromptBundle& bundle,
                                           const std::vector<std::string>& candidates,
                                           int* retries_used,
                                           std::vector<std::string>* raw_responses) {
    if (bundle.stage != PromptStage::NarrativeRefine) {
        throw Error("refine_narratives: bundle is not a narrative_refine prompt");
    }
    std::set<std::string> candidate_set(candidates.begin(), candidates.end());
    auto validate = [&candidate_set](const std::string& response) {
        LabelsAttempt out;
        auto parsed = parse_labels_line(response);
        if (!parsed) {
            out.error = "missing or empty LABELS line";
            return out;
        }
        for (const std::string& label : *parsed) {
            if (!candidate_set.count(label)) {
                out.error = "label '" + label + "' is not in the candidate list";
                return out;
            }
        }
        out.labels = *parsed;
        return out;
    };
    return ask_for_labels(backend, bundle, validate, retries_used, raw_responses);
}

RefinementResult assign_subnarratives(ChatBackend& backend, const Article& article,
                                      const std::vector<std::string>& narratives,
                                      const Taxonomy& taxonomy) {
    RefinementResult result;
    if (narratives.empty()) {
        // nothing confirmed: the task output format still needs a label
        if (!taxonomy.has_main(kOtherLabel)) {
            throw Error("empty narrative set needs an 'Other' row in the taxonomy");
        }
        result.narratives = {kOtherLabel};
        result.sub_narratives = {kOtherLabel};
        return result;
    }
    for (const std::string& n : narratives) {
        if (!taxonomy.has_main(n)) {
            throw Error("assign_subnarratives: unknown narrative '" + n + "'");
        }
    }
    result.narratives = narratives;
    std::set<std::string> narrative_set(narratives.begin(), narratives.end());
    std::set<std::string> seen;
    for (const std::string& narrative : narratives) {
        PromptBundle bundle = build_sub_prompt(article, narrative, taxonomy);
        auto validate = [&taxonomy, &narrative_set](const std::string& response) {
            LabelsAttempt out;
            auto parsed = parse_labels_line(response);
            if (!parsed) {
                out.error = "missing or empty LABELS line";
                return out;
            }
            for (const std::string& label : *parsed) {
                if (!taxonomy.has_sub(label)) {
                    out.error = "unknown sub-narrative '" + label + "'";
                    return out;
                }
                if (!narrative_set.count(taxonomy.parent_of(label))) {
                    out.error = "sub-narrative '" + label + "' belongs to narrative '" +
                                taxonomy.parent_of(label) + "', which was not confirmed";
                    return out;
                }
            }
            out.labels = *parsed;
            return out;
        };
        std::vector<std::string> subs =
            ask_for_labels(backend, bundle, validate, &result.retries_used, &result.raw_responses);
        for (std::string& s : subs) {
            if (seen.insert(s).second) result.sub_narratives.push_back(std::move(s));
        }
    }
    return result;
}

PromptBundle build_react_prompt(const std::vector<RetrievedEvidence>& evidence,
                                const std::string& dominant,
                                const std::vector<std::string>& subs,
                                const Taxonomy& taxonomy) {
    if (evidence.empty()) {
        throw Error("react prompt: no evidence sentences");
    }
    std::string dominant_block = render_taxonomy_block(taxonomy, {dominant}, LabelLevel::Main);
    std::string subs_block =
        subs.empty() ? std::string() : render_taxonomy_block(taxonomy, subs, LabelLevel::Sub);

    std::vector<RetrievedEvidence> ordered = evidence;
    std::sort(ordered.begin(), ordered.end(),
              [](const RetrievedEvidence& a, const RetrievedEvidence& b) {
                  return a.article_index < b.article_index;
              });

    std::ostringstream user;
    user << "Justify why the article supports the dominant narrative \"" << dominant
         << "\" by working through the sections below in order. Proceed in three steps: "
            "(1) identify the central claims, (2) justify the dominant narrative, "
            "(3) justify the sub-narrative.\n"
         << "\n"
         << "Thought:\n"
         << "Identify the central claims and implicit messaging of the article, using only "
            "the numbered evidence sentences under Observation.\n"
         << "\n"
         << "Action:\n"
         << "Consult the narrative reference entries below and check the claims against "
            "their definitions and examples.\n"
         << "Dominant narrative:\n"
         << dominant_block;
    if (!subs_block.empty()) {
        user << "Sub-narratives:\n" << subs_block;
    }
    user << "\n"
         << "Observation:\n";
    for (std::size_t i = 0; i < ordered.size(); ++i) {
        user << (i + 1) << ". " << ordered[i].sentence << '\n';
    }
    user << "\n"
         << "Conclusion:\n"
         << "Write a justification of at most 80 words for why the article supports the "
            "dominant narrative \"" << dominant
         << "\". Ground every statement in the Observation sentences only; do not use outside "
            "knowledge. Begin the final section of your reply with \"Conclusion:\".\n";

    PromptBundle bundle;
    bundle.system = kExplainSystem;
    bundle.user = user.str();
    bundle.stage = PromptStage::Explain;
    bundle.injected_labels.push_back(dominant);
    for (const std::string& s : subs) bundle.injected_labels.push_back(s);
    bundle.dominant = dominant;
    bundle.evidence = ordered;
    return bundle;
}

namespace {

std::string extract_conclusion(const std::string& response) {
    const std::string marker = "Conclusion:";
    std::size_t pos = response.rfind(marker);
    std::string text = pos == std::string::npos ? response : response.substr(pos + marker.size());
    return trim(text);
}

std::string truncate_at_sentence_boundary(const std::vector<std::string>& tokens,
                                          std::size_t max_words) {
    std::size_t cut = std::min(tokens.size(), max_words);
    std::size_t boundary = 0;
    for (std::size_t i = 0; i < cut; ++i) {
        if (ends_with_sentence_terminator(tokens[i])) boundary = i + 1;
    }
    if (boundary == 0) boundary = cut;
    std::vector<std::string> kept(tokens.begin(),
                                  tokens.begin() + static_cast<std::ptrdiff_t>(boundary));
    return join(kept, " ");
}

} // namespace

Explanation generate_explanation(ChatBackend& backend, const PromptBundle& bundle) {
    if (bundle.stage != PromptStage::Explain) {
        throw Error("generate_explanation: bundle is not an explain prompt");
    }
    std::vector<ChatMessage> messages = bundle.messages();
    std::string response = backend.complete(messages);
    std::string conclusion = extract_conclusion(response);
    if (conclusion.empty()) {
        throw Error("empty conclusion in backend reply");
    }

    Explanation out;
    out.dominant = bundle.dominant;
    out.evidence_used = bundle.evidence;

    std::vector<std::string> tokens = whitespace_tokenize(conclusion);
    if (tokens.size() > kMaxExplanationWords) {
        messages.push_back({"assistant", response});
        messages.push_back({"user",
                            "Your conclusion used " + std::to_string(tokens.size()) +
                                " words; the limit is 80. Reply again with the same structure "
                                "and a Conclusion of at most 80 words."});
        std::string retry_response = backend.complete(messages);
        out.retries_used = 1;
        std::string retry_conclusion = extract_conclusion(retry_response);
        if (!retry_conclusion.empty()) {
            conclusion = retry_conclusion;
            tokens = whitespace_tokenize(conclusion);
        }
        if (tokens.size() > kMaxExplanationWords) {
            conclusion = truncate_at_sentence_boundary(tokens, kMaxExplanationWords);
            tokens = whitespace_tokenize(conclusion);
        }
    }

    out.text = conclusion;
    out.word_count = tokens.size();
    return out;
}

void write_echo_mock_script(const std::vector<GoldAnnotation>& golds,
                            const Taxonomy& taxonomy,
                            const std::filesystem::path& out_path) {
    json script = json::array();
    for (const GoldAnnotation& gold : golds) {
        bool only_other = gold.narratives.size() == 1 && gold.narratives[0] == kOtherLabel;
        if (gold.narratives.empty() || only_other) {
            script.push_back({{"response", "No candidate label is supported.\nLABELS: none"}});
            continue;
        }
        script.push_back(
            {{"response", "Keeping the supported labels.\nLABELS: " + join(gold.narratives, "; ")}});
        for (const std::string& narrative : gold.narratives) {
            std::vector<std::string> subs;
            for (const std::string& sub : gold.sub_narratives) {
                if (taxonomy.has_sub(sub) && taxonomy.parent_of(sub) == narrative) {
                    subs.push_back(sub);
                }
            }
            if (subs.empty()) {
                script.push_back({{"response", "No sub-narrative applies.\nLABELS: none"}});
            } else {
                script.push_back(
                    {{"response", "Selecting the supported sub-narratives.\nLABELS: " +
                                      join(subs, "; ")}});
            }
        }
    }
    write_text_file(out_path, script.dump(2) + "\n");
}

} // namespace narrlens
