#include "narrlens/embedding.hpp"

#include "http_util.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <future>

namespace narrlens {

using nlohmann::json;

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dim() != b.dim()) {
        throw Error("cosine: dimension mismatch (" + std::to_string(a.dim()) + " vs " +
                    std::to_string(b.dim()) + ")");
    }
    double dot = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        dot += a.values[i] * b.values[i];
    }
    return dot;
}

EmbeddingVector deterministic_embed(std::string_view text, std::size_t dim) {
    if (dim == 0) {
        throw Error("deterministic_embed: dim must be positive");
    }
    if (trim(text).empty()) {
        throw Error("deterministic_embed: empty text");
    }
    std::vector<std::string> tokens = whitespace_tokenize(text);

    EmbeddingVector v;
    v.values.assign(dim, 0.0);
    auto add_feature = [&](std::string_view feature) {
        std::uint64_t h = fnv1a64(feature);
        double sign = (h >> 63) ? -1.0 : 1.0;
        v.values[static_cast<std::size_t>(h % dim)] += sign;
    };
    for (const std::string& t : tokens) {
        add_feature(t);
    }
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
        add_feature(tokens[i] + '\x1f' + tokens[i + 1]);
    }

    double norm_sq = 0.0;
    for (double x : v.values) norm_sq += x * x;
    if (norm_sq == 0.0) {
        v.values.assign(dim, 0.0);
        v.values[0] = 1.0;
        v.degenerate = true;
        return v;
    }
    double norm = std::sqrt(norm_sq);
    for (double& x : v.values) x /= norm;
    return v;
}

void EmbedderConfig::validate() const {
    if (dim == 0) throw Error("embedder config: dim must be positive");
    if (max_batch < 1) throw Error("embedder config: max_batch must be >= 1");
    if (retries < 0) throw Error("embedder config: retries must be >= 0");
    if (backend == EmbedderBackend::Remote && endpoint.empty()) {
        throw Error("embedder config: remote backend needs an endpoint");
    }
}

EmbeddingVector Embedder::embed_one(const std::string& text) {
    return embed({text}).front();
}

std::vector<EmbeddingVector> DeterministicEmbedder::embed(const std::vector<std::string>& texts) {
    if (texts.empty()) {
        throw Error("embed: no texts given");
    }
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const std::string& t : texts) {
        out.push_back(deterministic_embed(t, dim_));
    }
    return out;
}

RemoteEmbedder::RemoteEmbedder(EmbedderConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
}

std::vector<EmbeddingVector> RemoteEmbedder::embed_chunk(const std::vector<std::string>& texts) {
    json request = {{"model", cfg_.model_name}, {"input", texts}};
    std::string body = detail::post_json_with_retries(cfg_.endpoint, request.dump(),
                                                      cfg_.timeout_ms, cfg_.retries);
    json response;
    try {
        response = json::parse(body);
    } catch (const json::exception& e) {
        throw Error(std::string("embedding response is not valid JSON: ") + e.what());
    }
    if (!response.contains("data") || !response["data"].is_array() ||
        response["data"].size() != texts.size()) {
        throw Error("embedding response: expected a data array of " +
                    std::to_string(texts.size()) + " entries");
    }
    std::vector<EmbeddingVector> out(texts.size());
    std::vector<bool> filled(texts.size(), false);
    for (const json& item : response["data"]) {
        std::size_t index = item.at("index").get<std::size_t>();
        if (index >= texts.size() || filled[index]) {
            throw Error("embedding response: bad or duplicate index " + std::to_string(index));
        }
        EmbeddingVector v;
        v.values = item.at("embedding").get<std::vector<double>>();
        if (v.dim() != cfg_.dim) {
            throw Error("embedding dimension mismatch: backend returned " +
                        std::to_string(v.dim()) + ", config expects " + std::to_string(cfg_.dim));
        }
        double norm_sq = 0.0;
        for (double x : v.values) {
            if (!std::isfinite(x)) throw Error("embedding response contains non-finite values");
            norm_sq += x * x;
        }
        if (norm_sq == 0.0) {
            throw Error("embedding response contains a zero vector");
        }
        double norm = std::sqrt(norm_sq);
        for (double& x : v.values) x /= norm;
        out[index] = std::move(v);
        filled[index] = true;
    }
    return out;
}

std::vector<EmbeddingVector> RemoteEmbedder::embed(const std::vector<std::string>& texts) {
    if (texts.empty()) {
        throw Error("embed: no texts given");
    }
    for (const std::string& t : texts) {
        if (trim(t).empty()) throw Error("embed: empty text");
    }
    std::vector<std::vector<std::string>> chunks;
    for (std::size_t i = 0; i < texts.size(); i += cfg_.max_batch) {
        std::size_t end = std::min(texts.size(), i + cfg_.max_batch);
        chunks.emplace_back(texts.begin() + static_cast<std::ptrdiff_t>(i),
                            texts.begin() + static_cast<std::ptrdiff_t>(end));
    }

    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    std::size_t parallel = std::max<std::size_t>(1, cfg_.max_parallel);
    for (std::size_t i = 0; i < chunks.size(); i += parallel) {
        std::size_t wave_end = std::min(chunks.size(), i + parallel);
        std::vector<std::future<std::vector<EmbeddingVector>>> wave;
        for (std::size_t c = i; c < wave_end; ++c) {
            wave.push_back(std::async(std::launch::async,
                                      [this, &chunks, c] { return embed_chunk(chunks[c]); }));
        }
        for (auto& f : wave) {
            std::vector<EmbeddingVector> part = f.get();
            out.insert(out.end(), std::make_move_iterator(part.begin()),
                       std::make_move_iterator(part.end()));
        }
    }
    return out;
}

std::unique_ptr<Embedder> make_embedder(const EmbedderConfig& cfg) {
    cfg.validate();
    if (cfg.backend == EmbedderBackend::Deterministic) {
        return std::make_unique<DeterministicEmbedder>(cfg.dim);
    }
    return std::make_unique<RemoteEmbedder>(cfg);
}

std::vector<EmbeddingVector> embed_texts(const EmbedderConfig& cfg,
                                         const std::vector<std::string>& texts) {
    return make_embedder(cfg)->embed(texts);
}

} // namespace narrlens
