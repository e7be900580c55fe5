#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace retina {

using FeatureVector = std::vector<double>;

// Structure / provenance indicators of a scorable item.
struct ItemFlags {
  bool has_count = false;
  bool has_superlative = false;
  bool has_comparator = false;
  bool has_number = false;
  bool from_retrieved = false;
  bool from_constructed = false;
};

// Deterministic lexical featurizer over (question, item text, flags).
class Featurizer {
 public:
  static constexpr int kDim = 12;
  int dim() const { return kDim; }
  std::string id() const { return "lexical-v1"; }
  FeatureVector features(const std::string& question, const std::string& item_text,
                         const ItemFlags& flags) const;
};

// Linear scoring head: w . f + b.
struct LinearScorer {
  std::vector<double> weights;
  double bias = 0.0;

  static LinearScorer zeros(int dim) { return {std::vector<double>(dim, 0.0), 0.0}; }
  int dim() const { return static_cast<int>(weights.size()); }
};

double score(const LinearScorer& model, const FeatureVector& f);

// Loss value with its analytic gradient over [weights..., bias].
struct LossGrad {
  double loss = 0.0;
  std::vector<double> grad;
};

// Negative log-softmax of the gold score against {gold} + negatives.
LossGrad contrastive_loss(const LinearScorer& model, const FeatureVector& gold,
                          const std::vector<FeatureVector>& negatives);

// Logistic cross-entropy on sigmoid(score) against label in {0,1}.
LossGrad binary_loss(const LinearScorer& model, const FeatureVector& f, int label);

// Softmax cross-entropy over per-class scores from a shared model.
LossGrad multiclass_loss(const LinearScorer& model,
                         const std::vector<FeatureVector>& class_features, size_t gold_index);

enum class Objective { Contrastive, Binary, Multiclass };

const char* objective_name(Objective o);
std::optional<Objective> objective_from_name(const std::string& name);

struct ContrastiveExample {
  FeatureVector gold;
  std::vector<FeatureVector> negatives;
};
struct BinaryExample {
  FeatureVector features;
  int label = 0;
};
struct MulticlassExample {
  std::vector<FeatureVector> class_features;
  size_t gold_index = 0;
};

// Training set for one objective; only the matching vector is used.
struct TrainData {
  Objective objective = Objective::Contrastive;
  std::vector<ContrastiveExample> contrastive;
  std::vector<BinaryExample> binary;
  std::vector<MulticlassExample> multiclass;

  size_t size() const;
};

struct TrainConfig {
  double lr = 0.1;
  int epochs = 50;
  int batch = 8;
  int negatives_per_example = 64;
  uint64_t seed = 13;
};

struct TrainResult {
  LinearScorer model;
  std::vector<double> epoch_losses;  // mean loss per epoch
};

// Mini-batch gradient descent from zero initialization; example order is
// shuffled and negatives are subsampled per epoch from the seeded stream.
// Deterministic given the seed; aborts on non-finite loss.
TrainResult train(const TrainData& data, int dim, const TrainConfig& config);

// ---------------------------------------------------------------------------
// Threshold tuning: predict NK iff top score < tau.

struct Threshold {
  double tau = 0.0;
  std::string tuned_metric;
  double tuned_value = 0.0;
};

// Metric credit of one dev question under both decisions.
struct ThresholdPoint {
  double score = 0.0;
  double value_if_kept = 0.0;
  double value_if_nk = 0.0;
};

// Sweeps midpoints between adjacent distinct sorted scores plus the -inf and
// +inf sentinels; maximizes the mean credit; ties go to the largest tau.
Threshold tune_threshold(const std::vector<ThresholdPoint>& points,
                         const std::string& metric_name = "em");

// (score, is_gold_valid) convenience form: keeping a prediction scores 1
// exactly when the gold is a valid logical form, NK scores 1 otherwise.
Threshold tune_threshold(const std::vector<std::pair<double, bool>>& dev_top_scores,
                         const std::string& metric_name = "nk-accuracy");

void save_threshold(const Threshold& t, const std::string& path);
Threshold load_threshold(const std::string& path);

// ---------------------------------------------------------------------------
// Pluggable scorer interface used by every ranking stage.

struct ScoreItem {
  std::string identity;  // canonical key (LF print, schema id, sketch key)
  std::string text;      // surface text shown to lexical scorers
  ItemFlags flags;
};

class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual double score_item(const std::string& question, const ScoreItem& item) const = 0;
};

// Featurized linear model scorer.
class LinearModelScorer : public Scorer {
 public:
  explicit LinearModelScorer(LinearScorer model) : model_(std::move(model)) {}
  double score_item(const std::string& question, const ScoreItem& item) const override;
  const LinearScorer& model() const { return model_; }

 private:
  Featurizer featurizer_;
  LinearScorer model_;
};

// Scripted scorer keyed on (question, item identity); unregistered items
// score 0. set(q, gold_identity) with the default 1.0 gives the oracle that
// ranks the registered gold first.
class OracleScorer : public Scorer {
 public:
  void set(const std::string& question, const std::string& identity, double value = 1.0);
  double score_item(const std::string& question, const ScoreItem& item) const override;

 private:
  std::map<std::string, std::map<std::string, double>> by_question_;
};

// Hand-fixed lexical weights; the deterministic no-training baseline.
LinearScorer baseline_weights();
std::shared_ptr<Scorer> make_baseline_scorer();

// ---------------------------------------------------------------------------
// Model files: versioned flat text, bit-exact round-trip.

struct ModelFile {
  LinearScorer model;
  Objective objective = Objective::Contrastive;
  std::string featurizer_id;
};

void save_model(const ModelFile& m, const std::string& path);
ModelFile load_model(const std::string& path);

}  // namespace retina
