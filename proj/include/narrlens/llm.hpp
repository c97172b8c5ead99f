#pragma once
// Chat-backend contract plus the two-stage label refinement and the
// Thought/Action/Observation/Conclusion explanation prompts.
//
// Stage 1 filters classifier candidates (it may remove labels, never add);
// stage 2 assigns sub-narratives per confirmed narrative with only that
// narrative's sub-taxonomy injected. Responses end with a machine-parseable
// final line `LABELS: a; b; c` (or `LABELS: none`); a malformed reply earns
// one corrective retry, then an error.
//
// Backends are shareable handles; per-article orchestration is sequential
// because each stage consumes the previous stage's output.

#include "narrlens/common.hpp"
#include "narrlens/corpus.hpp"
#include "narrlens/retrieval.hpp"
#include "narrlens/taxonomy.hpp"

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace narrlens {

struct ChatMessage {
    std::string role; // "system" | "user" | "assistant"
    std::string content;
};

struct ChatBackendConfig {
    std::string endpoint;
    std::string model_name;
    double temperature = 0.0;
    std::size_t max_output_tokens = 1024;
    int timeout_ms = 60000;
    int retries = 2;
    std::string mock_script; // path to a scripted mock; empty means remote

    void validate() const;
    bool is_mock() const { return !mock_script.empty(); }
};

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    virtual std::string complete(const std::vector<ChatMessage>& messages) = 0;
};

// POSTs {model, messages, temperature, max_tokens} and reads
// choices[0].message.content. API key from NARRLENS_API_KEY.
class RemoteChatBackend final : public ChatBackend {
public:
    explicit RemoteChatBackend(ChatBackendConfig cfg);
    std::string complete(const std::vector<ChatMessage>& messages) override;

private:
    ChatBackendConfig cfg_;
};

// Scripted test double: a JSON array of {"response": "...", "fingerprint":
// "<hex>"} entries consumed strictly in order. A present fingerprint must
// match prompt_fingerprint() of the incoming messages; "*" or an absent field
// matches anything. Running past the end of the script is an error.
class MockChatBackend final : public ChatBackend {
public:
    explicit MockChatBackend(const std::filesystem::path& script_path);
    std::string complete(const std::vector<ChatMessage>& messages) override;

    std::size_t consumed() const;
    std::size_t remaining() const;

private:
    struct Entry {
        std::optional<std::string> fingerprint;
        std::string response;
    };
    mutable std::mutex mutex_;
    std::vector<Entry> entries_;
    std::size_t next_ = 0;
};

std::unique_ptr<ChatBackend> make_chat_backend(const ChatBackendConfig& cfg);

// Stable fingerprint of a prompt: FNV-1a over "role\x1econtent\x1f..." (hex).
std::string prompt_fingerprint(const std::vector<ChatMessage>& messages);

enum class PromptStage { NarrativeRefine, SubAssign, Explain };

struct PromptBundle {
    std::string system;
    std::string user;
    PromptStage stage = PromptStage::NarrativeRefine;
    std::vector<std::string> injected_labels;
    // explanation-stage payload carried through to the result
    std::string dominant;
    std::vector<RetrievedEvidence> evidence;

    std::vector<ChatMessage> messages() const;
};

struct RefinementResult {
    std::vector<std::string> narratives;
    std::vector<std::string> sub_narratives;
    std::vector<std::string> raw_responses;
    int retries_used = 0;
};

struct Explanation {
    std::string text;
    std::size_t word_count = 0; // whitespace tokens, <= 80
    std::vector<RetrievedEvidence> evidence_used;
    std::string dominant;
    int retries_used = 0;
};

constexpr std::size_t kMaxExplanationWords = 80;

PromptBundle build_stage1_prompt(const Article& article,
                                 const std::vector<std::string>& candidates,
                                 const Taxonomy& taxonomy);

// Prompt offering only this narrative's sub-narratives.
PromptBundle build_sub_prompt(const Article& article, const std::string& narrative,
                              const Taxonomy& taxonomy);

// Parses the final LABELS line of the backend reply and enforces the
// filter-only contract (result is a subset of candidates). One corrective
// retry on a malformed or out-of-set reply, then an error.
std::vector<std::string> refine_narratives(ChatBackend& backend, const PromptBundle& bundle,
                                           const std::vector<std::string>& candidates,
                                           int* retries_used = nullptr,
                                           std::vector<std::string>* raw_responses = nullptr);

// One prompt per confirmed narrative; every parsed sub must have its parent
// in the confirmed set. An empty narrative set short-circuits to the "Other"
// fallback without any backend call.
RefinementResult assign_subnarratives(ChatBackend& backend, const Article& article,
                                      const std::vector<std::string>& narratives,
                                      const Taxonomy& taxonomy);

PromptBundle build_react_prompt(const std::vector<RetrievedEvidence>& evidence,
                                const std::string& dominant,
                                const std::vector<std::string>& subs,
                                const Taxonomy& taxonomy);

// Extracts the Conclusion section; an over-length conclusion earns one
// corrective re-prompt, after which it is truncated at the 80th whitespace
// token, backing up to the nearest earlier sentence boundary.
Explanation generate_explanation(ChatBackend& backend, const PromptBundle& bundle);

// The label list from the final `LABELS:` line; nullopt when no such line
// exists. An empty vector means the literal `none`.
std::optional<std::vector<std::string>> parse_labels_line(const std::string& response);

// Writes a mock script whose responses echo the gold annotations through the
// stage-1/stage-2 conversation flow, in annotation order (test-double
// tooling for oracle wiring runs).
void write_echo_mock_script(const std::vector<GoldAnnotation>& golds,
                            const Taxonomy& taxonomy,
                            const std::filesystem::path& out_path);

} // namespace narrlens
