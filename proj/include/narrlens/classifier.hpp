#pragma once
// Per-domain multi-label classifiers: a trainable linear head over backend
// document embeddings, optimized with focal loss and decoupled-weight-decay
// adaptive moments, a warmup-then-linear-decay learning-rate schedule, and
// recall-oriented per-label threshold tuning on the validation split.
//
// Training is single-threaded and deterministic for a fixed (data, seed,
// config). Trained models are immutable and safe for concurrent inference.

#include "narrlens/common.hpp"
#include "narrlens/corpus.hpp"
#include "narrlens/embedding.hpp"

#include <string>
#include <vector>

namespace narrlens {

struct FocalLossParams {
    double gamma = 2.0; // focusing exponent, >= 0
    double alpha = 0.25; // positive-class weight, in (0, 1)

    void validate() const;
};

struct TrainingConfig {
    std::size_t epochs = 8;
    std::size_t batch_size = 8;
    double learning_rate = 2e-5;
    double adam_epsilon = 1e-8;
    double weight_decay = 0.05;
    double warmup_fraction = 0.10;
    std::uint64_t seed = 42;

    void validate() const;
};

enum class ThresholdMode { PerLabel, Global };

struct ThresholdVector {
    std::vector<double> values;          // per-label decision thresholds, in (0, 1)
    double tuning_beta = 2.0;            // recall weighting used to tune them
    std::vector<double> achieved_fbeta;  // F_beta reached on validation per label
};

struct ClassifierModel {
    Domain domain = Domain::Unknown;
    std::vector<std::string> vocab;            // main narrative labels
    std::size_t dim = 0;                       // embedding dimension
    std::vector<std::vector<double>> weights;  // [vocab][dim]
    std::vector<double> bias;                  // [vocab]
    ThresholdVector thresholds;
    std::string fingerprint;                   // of the training configuration
    TrainingConfig training;
    FocalLossParams loss;
};

struct TrainReport {
    std::vector<double> epoch_loss; // mean batch loss per epoch
};

// Mean over labels of
//   -alpha * y * (1-p)^gamma * log(p) - (1-alpha) * (1-y) * p^gamma * log(1-p)
// with p clamped to [1e-7, 1 - 1e-7]. With gamma = 0, alpha = 0.5 this is
// exactly half the binary cross-entropy.
double focal_loss(const std::vector<double>& probs, const std::vector<double>& targets,
                  const FocalLossParams& params);

// Analytic gradient of focal_loss(sigmoid(logits), targets) w.r.t. logits.
std::vector<double> focal_loss_gradient(const std::vector<double>& logits,
                                        const std::vector<double>& targets,
                                        const FocalLossParams& params);

double sigmoid(double x);

// Chooses per-label thresholds over the candidate set of observed validation
// scores, maximizing F_beta (computed as (1+b^2)TP / ((1+b^2)TP + b^2 FN + FP))
// with ties broken toward the lowest threshold. Labels with no positive
// validation example fall back to 0.5. Global mode pools every (score, gold)
// pair and picks one shared threshold.
ThresholdVector tune_thresholds(const std::vector<std::vector<double>>& val_scores,
                                const LabelMatrix& val_gold, double beta = 2.0,
                                ThresholdMode mode = ThresholdMode::PerLabel);

ClassifierModel train(const Dataset& train_set, const Dataset& val_set, Embedder& embedder,
                      const TrainingConfig& cfg, const FocalLossParams& loss, Domain domain,
                      const std::vector<std::string>& vocab, double threshold_beta = 2.0,
                      ThresholdMode threshold_mode = ThresholdMode::PerLabel,
                      TrainReport* report = nullptr);

// sigmoid(W x + b), one probability per vocab label.
std::vector<double> predict_scores(const ClassifierModel& model,
                                   const EmbeddingVector& article_vector);

// Labels whose score meets their threshold, ordered by descending score; when
// none qualifies, the top fallback_k labels by score.
std::vector<std::string> candidate_labels(const ClassifierModel& model,
                                          const EmbeddingVector& article_vector,
                                          std::size_t fallback_k = 3);

std::string config_fingerprint(const TrainingConfig& cfg, const FocalLossParams& loss,
                               Domain domain, std::size_t dim,
                               const std::vector<std::string>& vocab);

// JSON model persistence; load() recomputes and checks the fingerprint.
void save_model(const ClassifierModel& model, const std::filesystem::path& path);
ClassifierModel load_model(const std::filesystem::path& path);

} // namespace narrlens
