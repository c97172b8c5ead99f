#include "narrlens/classifier.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace narrlens {

using nlohmann::json;

namespace {

constexpr double kProbClamp = 1e-7;
constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;

double clamp_prob(double p) {
    return std::min(1.0 - kProbClamp, std::max(kProbClamp, p));
}

// F_beta from confusion counts; 0 when the denominator vanishes.
double fbeta_from_counts(double tp, double fp, double fn, double beta) {
    double b2 = beta * beta;
    double denom = (1.0 + b2) * tp + b2 * fn + fp;
    if (denom <= 0.0) return 0.0;
    return (1.0 + b2) * tp / denom;
}

} // namespace

void FocalLossParams::validate() const {
    if (gamma < 0.0) throw Error("focal loss: gamma must be >= 0");
    if (!(alpha > 0.0 && alpha < 1.0)) throw Error("focal loss: alpha must be in (0, 1)");
}

void TrainingConfig::validate() const {
    if (epochs == 0) throw Error("training config: epochs must be positive");
    if (batch_size == 0) throw Error("training config: batch_size must be positive");
    if (learning_rate <= 0.0) throw Error("training config: learning_rate must be positive");
    if (adam_epsilon <= 0.0) throw Error("training config: adam_epsilon must be positive");
    if (weight_decay < 0.0) throw Error("training config: weight_decay must be >= 0");
    if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) {
        throw Error("training config: warmup_fraction must be in [0, 1)");
    }
}

double sigmoid(double x) {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    double e = std::exp(x);
    return e / (1.0 + e);
}

double focal_loss(const std::vector<double>& probs, const std::vector<double>& targets,
                  const FocalLossParams& params) {
    params.validate();
    if (probs.size() != targets.size()) {
        throw Error("focal_loss: length mismatch");
    }
    if (probs.empty()) {
        throw Error("focal_loss: empty input");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        double p = clamp_prob(probs[i]);
        double y = targets[i];
        total += -params.alpha * y * std::pow(1.0 - p, params.gamma) * std::log(p) -
                 (1.0 - params.alpha) * (1.0 - y) * std::pow(p, params.gamma) * std::log(1.0 - p);
    }
    return total / static_cast<double>(probs.size());
}

std::vector<double> focal_loss_gradient(const std::vector<double>& logits,
                                        const std::vector<double>& targets,
                                        const FocalLossParams& params) {
    params.validate();
    if (logits.size() != targets.size()) {
        throw Error("focal_loss_gradient: length mismatch");
    }
    if (logits.empty()) {
        throw Error("focal_loss_gradient: empty input");
    }
    const double n = static_cast<double>(logits.size());
    const double gamma = params.gamma;
    const double alpha = params.alpha;
    std::vector<double> grad(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) {
        double p = clamp_prob(sigmoid(logits[i]));
        double y = targets[i];
        // d/dz of the positive term: alpha * gamma * p * (1-p)^gamma * log p
        //                            - alpha * (1-p)^(gamma+1)
        double pos = alpha * (gamma * p * std::pow(1.0 - p, gamma) * std::log(p) -
                              std::pow(1.0 - p, gamma + 1.0));
        // d/dz of the negative term: (1-alpha) * p^(gamma+1)
        //                            - (1-alpha) * gamma * p^gamma * (1-p) * log(1-p)
        double neg = (1.0 - alpha) * (std::pow(p, gamma + 1.0) -
                                      gamma * std::pow(p, gamma) * (1.0 - p) * std::log(1.0 - p));
        grad[i] = (y * pos + (1.0 - y) * neg) / n;
    }
    return grad;
}

ThresholdVector tune_thresholds(const std::vector<std::vector<double>>& val_scores,
                                const LabelMatrix& val_gold, double beta, ThresholdMode mode) {
    const std::size_t n = val_scores.size();
    if (n != val_gold.values.size()) {
        throw Error("tune_thresholds: row count mismatch");
    }
    const std::size_t labels = val_gold.columns.size();
    for (const auto& row : val_scores) {
        if (row.size() != labels) throw Error("tune_thresholds: column count mismatch");
    }

    ThresholdVector out;
    out.tuning_beta = beta;
    out.values.assign(labels, 0.5);
    out.achieved_fbeta.assign(labels, 0.0);

    auto sweep = [&](const std::vector<double>& scores, const std::vector<std::uint8_t>& gold,
                     double& best_tau, double& best_f) {
        std::vector<double> candidates = scores;
        std::sort(candidates.begin(), candidates.end());
        candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
        best_f = -1.0;
        best_tau = 0.5;
        for (double tau : candidates) { // ascending: strict improvement keeps the lowest tie
            double tp = 0, fp = 0, fn = 0;
            for (std::size_t i = 0; i < scores.size(); ++i) {
                bool pred = scores[i] >= tau;
                if (pred && gold[i]) ++tp;
                else if (pred && !gold[i]) ++fp;
                else if (!pred && gold[i]) ++fn;
            }
            double f = fbeta_from_counts(tp, fp, fn, beta);
            if (f > best_f) {
                best_f = f;
                best_tau = tau;
            }
        }
    };

    if (mode == ThresholdMode::Global) {
        std::vector<double> pooled_scores;
        std::vector<std::uint8_t> pooled_gold;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < labels; ++j) {
                pooled_scores.push_back(val_scores[i][j]);
                pooled_gold.push_back(val_gold.values[i][j]);
            }
        }
        bool any_positive =
            std::any_of(pooled_gold.begin(), pooled_gold.end(), [](std::uint8_t v) { return v != 0; });
        double tau = 0.5, f = 0.0;
        if (any_positive && !pooled_scores.empty()) {
            sweep(pooled_scores, pooled_gold, tau, f);
        }
        out.values.assign(labels, tau);
        out.achieved_fbeta.assign(labels, f);
        return out;
    }

    for (std::size_t j = 0; j < labels; ++j) {
        std::vector<double> scores(n);
        std::vector<std::uint8_t> gold(n);
        bool any_positive = false;
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = val_scores[i][j];
            gold[i] = val_gold.values[i][j];
            any_positive = any_positive || gold[i];
        }
        if (!any_positive || n == 0) {
            out.values[j] = 0.5; // no positive validation example
            out.achieved_fbeta[j] = 0.0;
            continue;
        }
        sweep(scores, gold, out.values[j], out.achieved_fbeta[j]);
    }
    return out;
}

namespace {

std::vector<double> logits_for(const std::vector<std::vector<double>>& weights,
                               const std::vector<double>& bias,
                               const std::vector<double>& x) {
    std::vector<double> z(weights.size());
    for (std::size_t j = 0; j < weights.size(); ++j) {
        double acc = bias[j];
        const std::vector<double>& w = weights[j];
        for (std::size_t k = 0; k < w.size(); ++k) acc += w[k] * x[k];
        z[j] = acc;
    }
    return z;
}

} // namespace

ClassifierModel train(const Dataset& train_set, const Dataset& val_set, Embedder& embedder,
                      const TrainingConfig& cfg, const FocalLossParams& loss, Domain domain,
                      const std::vector<std::string>& vocab, double threshold_beta,
                      ThresholdMode threshold_mode, TrainReport* report) {
    cfg.validate();
    loss.validate();
    if (train_set.empty()) {
        throw Error("train: empty training set");
    }
    if (vocab.empty()) {
        throw Error("train: empty label vocabulary");
    }

    std::vector<std::string> train_texts;
    for (const Article& a : train_set.articles) train_texts.push_back(a.text);
    std::vector<EmbeddingVector> train_vecs = embedder.embed(train_texts);
    const std::size_t dim = embedder.dim();
    LabelMatrix y_train = encode_labels(train_set, vocab, LabelLevel::Main);

    const std::size_t n = train_set.size();
    const std::size_t labels = vocab.size();
    std::vector<std::vector<double>> w(labels, std::vector<double>(dim, 0.0));
    std::vector<double> b(labels, 0.0);

    // Adam moments for weights and bias
    std::vector<std::vector<double>> mw(labels, std::vector<double>(dim, 0.0));
    std::vector<std::vector<double>> vw(labels, std::vector<double>(dim, 0.0));
    std::vector<double> mb(labels, 0.0), vb(labels, 0.0);

    const std::size_t batches_per_epoch = (n + cfg.batch_size - 1) / cfg.batch_size;
    const std::size_t total_steps = cfg.epochs * batches_per_epoch;
    const auto warmup_steps = static_cast<std::size_t>(
        std::llround(cfg.warmup_fraction * static_cast<double>(total_steps)));

    std::mt19937_64 rng(cfg.seed);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;

    if (report) report->epoch_loss.clear();
    std::size_t step = 0;
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        deterministic_shuffle(order, rng);
        double epoch_loss_sum = 0.0;
        for (std::size_t batch_start = 0; batch_start < n; batch_start += cfg.batch_size) {
            std::size_t batch_end = std::min(n, batch_start + cfg.batch_size);
            double batch_n = static_cast<double>(batch_end - batch_start);

            std::vector<std::vector<double>> gw(labels, std::vector<double>(dim, 0.0));
            std::vector<double> gb(labels, 0.0);
            double batch_loss = 0.0;
            for (std::size_t s = batch_start; s < batch_end; ++s) {
                std::size_t i = order[s];
                const std::vector<double>& x = train_vecs[i].values;
                std::vector<double> z = logits_for(w, b, x);
                std::vector<double> t(labels);
                for (std::size_t j = 0; j < labels; ++j) t[j] = y_train.values[i][j];
                std::vector<double> p(labels);
                for (std::size_t j = 0; j < labels; ++j) p[j] = sigmoid(z[j]);
                batch_loss += focal_loss(p, t, loss);
                std::vector<double> g = focal_loss_gradient(z, t, loss);
                for (std::size_t j = 0; j < labels; ++j) {
                    double gj = g[j] / batch_n;
                    gb[j] += gj;
                    for (std::size_t k = 0; k < dim; ++k) gw[j][k] += gj * x[k];
                }
            }
            epoch_loss_sum += batch_loss / batch_n;

            // warmup then linear decay, both ends near zero
            ++step;
            double scale = step <= warmup_steps
                               ? static_cast<double>(step) / static_cast<double>(warmup_steps)
                               : static_cast<double>(total_steps - step + 1) /
                                     static_cast<double>(total_steps - warmup_steps);
            double lr = cfg.learning_rate * scale;

            double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(step));
            double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(step));
            for (std::size_t j = 0; j < labels; ++j) {
                for (std::size_t k = 0; k < dim; ++k) {
                    double g = gw[j][k];
                    mw[j][k] = kAdamBeta1 * mw[j][k] + (1.0 - kAdamBeta1) * g;
                    vw[j][k] = kAdamBeta2 * vw[j][k] + (1.0 - kAdamBeta2) * g * g;
                    double mhat = mw[j][k] / bc1;
                    double vhat = vw[j][k] / bc2;
                    // decoupled weight decay on the weights only
                    w[j][k] -= lr * (mhat / (std::sqrt(vhat) + cfg.adam_epsilon) +
                                     cfg.weight_decay * w[j][k]);
                }
                double g = gb[j];
                mb[j] = kAdamBeta1 * mb[j] + (1.0 - kAdamBeta1) * g;
                vb[j] = kAdamBeta2 * vb[j] + (1.0 - kAdamBeta2) * g * g;
                double mhat = mb[j] / bc1;
                double vhat = vb[j] / bc2;
                b[j] -= lr * mhat / (std::sqrt(vhat) + cfg.adam_epsilon);
            }
        }
        if (report) {
            report->epoch_loss.push_back(epoch_loss_sum / static_cast<double>(batches_per_epoch));
        }
    }

    ClassifierModel model;
    model.domain = domain;
    model.vocab = vocab;
    model.dim = dim;
    model.weights = std::move(w);
    model.bias = std::move(b);
    model.training = cfg;
    model.loss = loss;
    model.fingerprint = config_fingerprint(cfg, loss, domain, dim, vocab);

    // thresholds tuned on the validation split
    if (val_set.empty()) {
        model.thresholds.values.assign(labels, 0.5);
        model.thresholds.achieved_fbeta.assign(labels, 0.0);
        model.thresholds.tuning_beta = threshold_beta;
    } else {
        std::vector<std::string> val_texts;
        for (const Article& a : val_set.articles) val_texts.push_back(a.text);
        std::vector<EmbeddingVector> val_vecs = embedder.embed(val_texts);
        std::vector<std::vector<double>> val_scores;
        for (const EmbeddingVector& v : val_vecs) {
            val_scores.push_back(predict_scores(model, v));
        }
        LabelMatrix y_val = encode_labels(val_set, vocab, LabelLevel::Main);
        model.thresholds = tune_thresholds(val_scores, y_val, threshold_beta, threshold_mode);
    }
    return model;
}

std::vector<double> predict_scores(const ClassifierModel& model,
                                   const EmbeddingVector& article_vector) {
    if (article_vector.dim() != model.dim) {
        throw Error("predict_scores: vector dim " + std::to_string(article_vector.dim()) +
                    " does not match model dim " + std::to_string(model.dim));
    }
    std::vector<double> z = logits_for(model.weights, model.bias, article_vector.values);
    for (double& x : z) x = sigmoid(x);
    return z;
}

std::vector<std::string> candidate_labels(const ClassifierModel& model,
                                          const EmbeddingVector& article_vector,
                                          std::size_t fallback_k) {
    std::vector<double> scores = predict_scores(model, article_vector);
    std::vector<std::size_t> order(scores.size());
    for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
    std::sort(order.begin(), order.end(), [&scores](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });

    std::vector<std::string> out;
    for (std::size_t j : order) {
        if (scores[j] >= model.thresholds.values[j]) out.push_back(model.vocab[j]);
    }
    if (out.empty()) {
        std::size_t k = std::min(fallback_k, order.size());
        for (std::size_t p = 0; p < k; ++p) out.push_back(model.vocab[order[p]]);
    }
    return out;
}

std::string config_fingerprint(const TrainingConfig& cfg, const FocalLossParams& loss,
                               Domain domain, std::size_t dim,
                               const std::vector<std::string>& vocab) {
    std::ostringstream canon;
    canon.precision(17);
    canon << "epochs=" << cfg.epochs << ";batch=" << cfg.batch_size
          << ";lr=" << cfg.learning_rate << ";eps=" << cfg.adam_epsilon
          << ";wd=" << cfg.weight_decay << ";warmup=" << cfg.warmup_fraction
          << ";seed=" << cfg.seed << ";gamma=" << loss.gamma << ";alpha=" << loss.alpha
          << ";domain=" << to_string(domain) << ";dim=" << dim << ";vocab=";
    for (const std::string& v : vocab) canon << v << '\x1f';
    return to_hex(fnv1a64(canon.str()));
}

void save_model(const ClassifierModel& model, const std::filesystem::path& path) {
    json j;
    j["format"] = "narrlens-model";
    j["version"] = 1;
    j["domain"] = to_string(model.domain);
    j["dim"] = model.dim;
    j["vocab"] = model.vocab;
    j["weights"] = model.weights;
    j["bias"] = model.bias;
    j["thresholds"] = {{"values", model.thresholds.values},
                       {"tuning_beta", model.thresholds.tuning_beta},
                       {"achieved_fbeta", model.thresholds.achieved_fbeta}};
    j["training"] = {{"epochs", model.training.epochs},
                     {"batch_size", model.training.batch_size},
                     {"learning_rate", model.training.learning_rate},
                     {"adam_epsilon", model.training.adam_epsilon},
                     {"weight_decay", model.training.weight_decay},
                     {"warmup_fraction", model.training.warmup_fraction},
                     {"seed", model.training.seed}};
    j["loss"] = {{"gamma", model.loss.gamma}, {"alpha", model.loss.alpha}};
    j["fingerprint"] = model.fingerprint;
    write_text_file(path, j.dump(2) + "\n");
}

ClassifierModel load_model(const std::filesystem::path& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw Error("model file " + path.string() + " is not valid JSON: " + e.what());
    }
    try {
        if (j.at("format").get<std::string>() != "narrlens-model") {
            throw Error("model file " + path.string() + ": unexpected format tag");
        }
        if (j.at("version").get<int>() != 1) {
            throw Error("model file " + path.string() + ": unsupported version");
        }
        ClassifierModel m;
        m.domain = parse_domain(j.at("domain").get<std::string>());
        m.dim = j.at("dim").get<std::size_t>();
        m.vocab = j.at("vocab").get<std::vector<std::string>>();
        m.weights = j.at("weights").get<std::vector<std::vector<double>>>();
        m.bias = j.at("bias").get<std::vector<double>>();
        m.thresholds.values = j.at("thresholds").at("values").get<std::vector<double>>();
        m.thresholds.tuning_beta = j.at("thresholds").at("tuning_beta").get<double>();
        m.thresholds.achieved_fbeta =
            j.at("thresholds").at("achieved_fbeta").get<std::vector<double>>();
        const json& t = j.at("training");
        m.training.epochs = t.at("epochs").get<std::size_t>();
        m.training.batch_size = t.at("batch_size").get<std::size_t>();
        m.training.learning_rate = t.at("learning_rate").get<double>();
        m.training.adam_epsilon = t.at("adam_epsilon").get<double>();
        m.training.weight_decay = t.at("weight_decay").get<double>();
        m.training.warmup_fraction = t.at("warmup_fraction").get<double>();
        m.training.seed = t.at("seed").get<std::uint64_t>();
        m.loss.gamma = j.at("loss").at("gamma").get<double>();
        m.loss.alpha = j.at("loss").at("alpha").get<double>();
        m.fingerprint = j.at("fingerprint").get<std::string>();

        if (m.weights.size() != m.vocab.size() || m.bias.size() != m.vocab.size() ||
            m.thresholds.values.size() != m.vocab.size()) {
            throw Error("model file " + path.string() + ": inconsistent dimensions");
        }
        for (const auto& row : m.weights) {
            if (row.size() != m.dim) {
                throw Error("model file " + path.string() + ": weight row dimension mismatch");
            }
        }
        std::string expected =
            config_fingerprint(m.training, m.loss, m.domain, m.dim, m.vocab);
        if (expected != m.fingerprint) {
            throw Error("model file " + path.string() + ": fingerprint mismatch (file says " +
                        m.fingerprint + ", config hashes to " + expected + ")");
        }
        return m;
    } catch (const json::exception& e) {
        throw Error("model file " + path.string() + ": " + e.what());
    }
}

} // namespace narrlens
