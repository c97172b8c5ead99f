#pragma once
// Embedding backends: the contract (unit-normalized fixed-dimension vectors),
// cosine similarity, a bit-reproducible offline embedder, and a remote HTTP
// client speaking the common embeddings wire shape.
//
// Deterministic embedder, specified bit-exactly so any implementation can
// reproduce it:
//   1. Split the text on ASCII whitespace into tokens (raw bytes, no case
//      folding).
//   2. Features are every token t_i and every adjacent pair t_i + "\x1f" +
//      t_{i+1}.
//   3. For each feature, h = FNV-1a-64 over its bytes (offset
//      14695981039346656037, prime 1099511628211). Add +1.0 to accumulator
//      slot (h % dim) when the top hash bit (h >> 63) is 0, else -1.0.
//   4. L2-normalize the accumulator. An all-zero accumulator yields the unit
//      basis vector e1 with the `degenerate` flag set.
//
// Embedder handles are shareable: the deterministic embedder is pure and
// reentrant; the remote embedder issues at most max_parallel in-flight
// requests, each on its own connection.

#include "narrlens/common.hpp"

#include <memory>
#include <string>
#include <vector>

namespace narrlens {

struct EmbeddingVector {
    std::vector<double> values;
    bool degenerate = false; // pathological input mapped to e1

    std::size_t dim() const { return values.size(); }
};

// Dot product of unit vectors; throws on dimension mismatch.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

// The offline embedder described above. Throws on empty text or dim == 0.
EmbeddingVector deterministic_embed(std::string_view text, std::size_t dim);

enum class EmbedderBackend { Deterministic, Remote };

struct EmbedderConfig {
    EmbedderBackend backend = EmbedderBackend::Deterministic;
    std::string endpoint;   // remote only, e.g. http://host:port/v1/embeddings
    std::string model_name; // remote only
    std::size_t dim = 64;
    std::size_t max_batch = 16;
    std::size_t max_parallel = 4;
    int timeout_ms = 30000;
    int retries = 2;

    void validate() const;
};

class Embedder {
public:
    virtual ~Embedder() = default;

    // Embeds texts order-aligned: output[i] corresponds to texts[i]. Every
    // vector is unit-normalized. Throws on empty input text, transport
    // failure after retries, or a backend dimension mismatch.
    virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) = 0;

    virtual std::size_t dim() const = 0;

    EmbeddingVector embed_one(const std::string& text);
};

class DeterministicEmbedder final : public Embedder {
public:
    explicit DeterministicEmbedder(std::size_t dim) : dim_(dim) {}
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;
    std::size_t dim() const override { return dim_; }

private:
    std::size_t dim_;
};

// POSTs {model, input: [texts]} and expects {data: [{index, embedding}]}.
// Requests are chunked at max_batch and retried with exponential backoff.
// Reads the API key from the NARRLENS_API_KEY environment variable.
class RemoteEmbedder final : public Embedder {
public:
    explicit RemoteEmbedder(EmbedderConfig cfg);
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;
    std::size_t dim() const override { return cfg_.dim; }

private:
    std::vector<EmbeddingVector> embed_chunk(const std::vector<std::string>& texts);
    EmbedderConfig cfg_;
};

std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& cfg);

// One-shot convenience over make_embedder().embed().
std::vector<EmbeddingVector> embed_texts(const EmbedderConfig& cfg,
                                         const std::vector<std::string>& texts);

} // namespace narrlens
