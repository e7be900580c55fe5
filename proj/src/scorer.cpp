#include "retina/scorer.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "retina/decimal.hpp"
#include "retina/errors.hpp"

namespace retina {

namespace {

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-') {
      cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!cur.empty()) {
      out.push_back(cur);
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

const std::set<std::string>& stopwords() {
  static const std::set<std::string> words = {
      "a",  "an",  "the",  "of",   "in",  "on",    "at",  "is",    "are", "was", "were",
      "do", "does", "did", "which", "what", "who", "where", "when", "how", "many"};
  return words;
}

const std::set<std::string>& superlative_cues() {
  static const std::set<std::string> words = {"most",    "least",  "largest",  "smallest",
                                              "biggest", "highest", "lowest",  "oldest",
                                              "newest",  "maximum", "minimum", "earliest",
                                              "latest",  "first"};
  return words;
}

const std::set<std::string>& comparative_cues() {
  static const std::set<std::string> words = {"more",  "less",  "fewer", "greater", "smaller",
                                              "than",  "over",  "under", "above",   "below",
                                              "before", "after"};
  return words;
}

const std::set<std::string>& operator_tokens() {
  static const std::set<std::string> words = {"and", "join", "r",  "count", "argmin",
                                              "argmax", "lt", "le", "gt",   "ge"};
  return words;
}

bool contains_any(const std::set<std::string>& tokens, const std::set<std::string>& cues) {
  for (const auto& t : tokens)
    if (cues.count(t)) return true;
  return false;
}

bool has_number_token(const std::set<std::string>& tokens) {
  for (const auto& t : tokens)
    if (is_number_token(t)) return true;
  return false;
}

}  // namespace

FeatureVector Featurizer::features(const std::string& question, const std::string& item_text,
                                   const ItemFlags& flags) const {
  std::vector<std::string> q_list = tokenize(question);
  std::vector<std::string> i_list = tokenize(item_text);
  std::set<std::string> q(q_list.begin(), q_list.end());
  std::set<std::string> it(i_list.begin(), i_list.end());

  auto content = [](const std::set<std::string>& toks) {
    std::set<std::string> out;
    for (const auto& t : toks)
      if (!stopwords().count(t)) out.insert(t);
    return out;
  };
  std::set<std::string> qc = content(q);
  std::set<std::string> ic = content(it);

  size_t inter = 0;
  for (const auto& t : q)
    if (it.count(t)) ++inter;
  size_t uni = q.size() + it.size() - inter;

  auto coverage = [](const std::set<std::string>& of, const std::set<std::string>& in) {
    if (of.empty()) return 0.0;
    size_t hit = 0;
    for (const auto& t : of)
      if (in.count(t)) ++hit;
    return static_cast<double>(hit) / static_cast<double>(of.size());
  };

  bool q_how_many = question.find("how many") != std::string::npos ||
                    question.find("How many") != std::string::npos;
  bool q_super = contains_any(q, superlative_cues());
  bool q_cmp = contains_any(q, comparative_cues());
  bool q_num = has_number_token(q);

  size_t ops = 0;
  for (const auto& t : i_list)
    if (operator_tokens().count(t)) ++ops;

  FeatureVector f(kDim, 0.0);
  f[0] = uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
  f[1] = coverage(ic, q);
  f[2] = coverage(qc, it);
  f[3] = std::min(1.0, static_cast<double>(i_list.size()) / 20.0);
  f[4] = flags.has_count && q_how_many ? 1.0 : 0.0;
  f[5] = flags.has_superlative && q_super ? 1.0 : 0.0;
  f[6] = flags.has_comparator && q_cmp ? 1.0 : 0.0;
  f[7] = flags.has_number && q_num ? 1.0 : 0.0;
  f[8] = flags.from_retrieved ? 1.0 : 0.0;
  f[9] = flags.from_constructed ? 1.0 : 0.0;
  f[10] = std::min(1.0, static_cast<double>(ops) / 8.0);
  f[11] = 1.0;
  return f;
}

double score(const LinearScorer& model, const FeatureVector& f) {
  if (model.weights.size() != f.size())
    throw std::invalid_argument("score: dimension mismatch (" +
                                std::to_string(model.weights.size()) + " vs " +
                                std::to_string(f.size()) + ")");
  double s = model.bias;
  for (size_t i = 0; i < f.size(); ++i) s += model.weights[i] * f[i];
  return s;
}

// ---------------------------------------------------------------------------
// Losses. Gradients are over [weights..., bias].

namespace {

LossGrad softmax_ce(const LinearScorer& model, const std::vector<const FeatureVector*>& items,
                    size_t gold) {
  size_t n = items.size();
  std::vector<double> s(n);
  for (size_t i = 0; i < n; ++i) s[i] = score(model, *items[i]);
  double m = *std::max_element(s.begin(), s.end());
  double z = 0.0;
  for (double v : s) z += std::exp(v - m);
  double log_z = std::log(z);

  LossGrad out;
  out.loss = -(s[gold] - m) + log_z;
  out.grad.assign(model.weights.size() + 1, 0.0);
  for (size_t i = 0; i < n; ++i) {
    double p = std::exp(s[i] - m) / z;
    double coeff = p - (i == gold ? 1.0 : 0.0);
    const FeatureVector& f = *items[i];
    for (size_t d = 0; d < f.size(); ++d) out.grad[d] += coeff * f[d];
    out.grad.back() += coeff;  // cancels to 0 over the softmax
  }
  return out;
}

}  // namespace

LossGrad contrastive_loss(const LinearScorer& model, const FeatureVector& gold,
                          const std::vector<FeatureVector>& negatives) {
  if (negatives.empty())
    throw std::invalid_argument("contrastive_loss: at least one negative required");
  std::vector<const FeatureVector*> items;
  items.reserve(negatives.size() + 1);
  items.push_back(&gold);
  for (const auto& f : negatives) items.push_back(&f);
  return softmax_ce(model, items, 0);
}

LossGrad binary_loss(const LinearScorer& model, const FeatureVector& f, int label) {
  double s = score(model, f);
  // softplus(s) - y*s, computed stably
  double softplus = s > 0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
  double sigma = 1.0 / (1.0 + std::exp(-s));
  LossGrad out;
  out.loss = softplus - label * s;
  out.grad.assign(model.weights.size() + 1, 0.0);
  double coeff = sigma - label;
  for (size_t d = 0; d < f.size(); ++d) out.grad[d] = coeff * f[d];
  out.grad.back() = coeff;
  return out;
}

LossGrad multiclass_loss(const LinearScorer& model,
                         const std::vector<FeatureVector>& class_features, size_t gold_index) {
  if (gold_index >= class_features.size())
    throw std::out_of_range("multiclass_loss: gold index " + std::to_string(gold_index) +
                            " out of range for " + std::to_string(class_features.size()) +
                            " classes");
  std::vector<const FeatureVector*> items;
  items.reserve(class_features.size());
  for (const auto& f : class_features) items.push_back(&f);
  return softmax_ce(model, items, gold_index);
}

// ---------------------------------------------------------------------------
// Training

const char* objective_name(Objective o) {
  switch (o) {
    case Objective::Contrastive: return "contrastive";
    case Objective::Binary: return "binary";
    case Objective::Multiclass: return "multiclass";
  }
  return "?";
}

std::optional<Objective> objective_from_name(const std::string& name) {
  for (Objective o : {Objective::Contrastive, Objective::Binary, Objective::Multiclass})
    if (name == objective_name(o)) return o;
  return std::nullopt;
}

size_t TrainData::size() const {
  switch (objective) {
    case Objective::Contrastive: return contrastive.size();
    case Objective::Binary: return binary.size();
    case Objective::Multiclass: return multiclass.size();
  }
  return 0;
}

namespace {

// Uniform sample of k negatives without replacement (partial Fisher-Yates);
// all of them when k >= n.
std::vector<FeatureVector> sample_negatives(const std::vector<FeatureVector>& all, size_t k,
                                            std::mt19937_64& rng) {
  if (all.size() <= k) return all;
  std::vector<size_t> idx(all.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  for (size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<size_t> pick(i, idx.size() - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  std::vector<FeatureVector> out;
  out.reserve(k);
  for (size_t i = 0; i < k; ++i) out.push_back(all[idx[i]]);
  return out;
}

}  // namespace

TrainResult train(const TrainData& data, int dim, const TrainConfig& config) {
  if (data.size() == 0) throw std::invalid_argument("train: empty training data");
  if (config.lr <= 0) throw std::invalid_argument("train: lr must be positive");
  if (config.batch <= 0) throw std::invalid_argument("train: batch must be positive");

  TrainResult result;
  result.model = LinearScorer::zeros(dim);
  std::mt19937_64 rng(config.seed);
  size_t n = data.size();

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);

    double epoch_loss = 0.0;
    size_t pos = 0;
    while (pos < n) {
      size_t batch_end = std::min(pos + static_cast<size_t>(config.batch), n);
      std::vector<double> grad(static_cast<size_t>(dim) + 1, 0.0);
      for (size_t b = pos; b < batch_end; ++b) {
        size_t i = order[b];
        LossGrad lg;
        switch (data.objective) {
          case Objective::Contrastive: {
            const auto& ex = data.contrastive[i];
            auto negs = sample_negatives(ex.negatives,
                                         static_cast<size_t>(config.negatives_per_example), rng);
            lg = contrastive_loss(result.model, ex.gold, negs);
            break;
          }
          case Objective::Binary: {
            const auto& ex = data.binary[i];
            lg = binary_loss(result.model, ex.features, ex.label);
            break;
          }
          case Objective::Multiclass: {
            const auto& ex = data.multiclass[i];
            lg = multiclass_loss(result.model, ex.class_features, ex.gold_index);
            break;
          }
        }
        if (!std::isfinite(lg.loss))
          throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch) +
                                   ", example " + std::to_string(i) + " (objective " +
                                   objective_name(data.objective) + ")");
        epoch_loss += lg.loss;
        for (size_t d = 0; d < grad.size(); ++d) grad[d] += lg.grad[d];
      }
      double scale = config.lr / static_cast<double>(batch_end - pos);
      for (int d = 0; d < dim; ++d) result.model.weights[static_cast<size_t>(d)] -= scale * grad[static_cast<size_t>(d)];
      result.model.bias -= scale * grad.back();
      pos = batch_end;
    }
    result.epoch_losses.push_back(epoch_loss / static_cast<double>(n));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Threshold tuning

Threshold tune_threshold(const std::vector<ThresholdPoint>& points,
                         const std::string& metric_name) {
  if (points.empty()) throw std::invalid_argument("tune_threshold: empty dev points");

  std::vector<double> scores;
  scores.reserve(points.size());
  for (const auto& p : points) scores.push_back(p.score);
  std::sort(scores.begin(), scores.end());
  scores.erase(std::unique(scores.begin(), scores.end()), scores.end());

  double inf = std::numeric_limits<double>::infinity();
  std::vector<double> taus;
  taus.push_back(-inf);
  for (size_t i = 0; i + 1 < scores.size(); ++i)
    taus.push_back(scores[i] + (scores[i + 1] - scores[i]) / 2.0);
  taus.push_back(inf);

  auto metric = [&points](double tau) {
    double total = 0.0;
    for (const auto& p : points) total += p.score < tau ? p.value_if_nk : p.value_if_kept;
    return total / static_cast<double>(points.size());
  };

  Threshold best{-inf, metric_name, metric(-inf)};
  for (double tau : taus) {
    double v = metric(tau);
    if (v >= best.tuned_value) {
      best.tau = tau;
      best.tuned_value = v;
    }
  }
  return best;
}

Threshold tune_threshold(const std::vector<std::pair<double, bool>>& dev_top_scores,
                         const std::string& metric_name) {
  std::vector<ThresholdPoint> points;
  points.reserve(dev_top_scores.size());
  for (const auto& [s, valid] : dev_top_scores)
    points.push_back({s, valid ? 1.0 : 0.0, valid ? 0.0 : 1.0});
  return tune_threshold(points, metric_name);
}

namespace {

std::string format_double(double v) {
  if (v == std::numeric_limits<double>::infinity()) return "inf";
  if (v == -std::numeric_limits<double>::infinity()) return "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double parse_double(const std::string& s, const std::string& where) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError(where + ": bad numeric literal '" + s + "'");
  }
}

}  // namespace

void save_threshold(const Threshold& t, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError(path + ": cannot open for writing");
  out << "retina-threshold v1\n";
  out << "tau " << format_double(t.tau) << '\n';
  out << "metric " << t.tuned_metric << '\n';
  out << "value " << format_double(t.tuned_value) << '\n';
}

Threshold load_threshold(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open");
  std::string header;
  std::getline(in, header);
  if (header != "retina-threshold v1") throw DataError(path + ": not a threshold file");
  Threshold t;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string key;
    row >> key;
    if (key == "tau") {
      std::string v;
      row >> v;
      t.tau = parse_double(v, path);
    } else if (key == "metric") {
      row >> t.tuned_metric;
    } else if (key == "value") {
      std::string v;
      row >> v;
      t.tuned_value = parse_double(v, path);
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Scorer implementations

double LinearModelScorer::score_item(const std::string& question, const ScoreItem& item) const {
  return score(model_, featurizer_.features(question, item.text, item.flags));
}

void OracleScorer::set(const std::string& question, const std::string& identity, double value) {
  by_question_[question][identity] = value;
}

double OracleScorer::score_item(const std::string& question, const ScoreItem& item) const {
  auto qit = by_question_.find(question);
  if (qit == by_question_.end()) return 0.0;
  auto iit = qit->second.find(item.identity);
  return iit == qit->second.end() ? 0.0 : iit->second;
}

LinearScorer baseline_weights() {
  LinearScorer m = LinearScorer::zeros(Featurizer::kDim);
  m.weights[0] = 2.0;   // token Jaccard
  m.weights[1] = 1.0;   // item tokens covered by question
  m.weights[2] = 1.0;   // question tokens covered by item
  m.weights[3] = -0.25; // length
  m.weights[4] = 2.0;   // count cue match
  m.weights[5] = 2.0;   // superlative cue match
  m.weights[6] = 2.0;   // comparative cue match
  m.weights[7] = 0.5;   // number match
  return m;
}

std::shared_ptr<Scorer> make_baseline_scorer() {
  return std::make_shared<LinearModelScorer>(baseline_weights());
}

// ---------------------------------------------------------------------------
// Model files

void save_model(const ModelFile& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError(path + ": cannot open for writing");
  out << "retina-model v1\n";
  out << "objective " << objective_name(m.objective) << '\n';
  out << "featurizer " << m.featurizer_id << '\n';
  out << "dim " << m.model.weights.size() << '\n';
  out << "w";
  for (double w : m.model.weights) out << ' ' << format_double(w);
  out << '\n';
  out << "b " << format_double(m.model.bias) << '\n';
}

ModelFile load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open (missing model file)");
  std::string header;
  std::getline(in, header);
  if (header != "retina-model v1") throw DataError(path + ": not a retina model file");
  ModelFile m;
  size_t dim = 0;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string key;
    row >> key;
    if (key == "objective") {
      std::string name;
      row >> name;
      auto o = objective_from_name(name);
      if (!o) throw DataError(path + ": unknown objective '" + name + "'");
      m.objective = *o;
    } else if (key == "featurizer") {
      row >> m.featurizer_id;
    } else if (key == "dim") {
      row >> dim;
    } else if (key == "w") {
      std::string v;
      while (row >> v) m.model.weights.push_back(parse_double(v, path));
    } else if (key == "b") {
      std::string v;
      row >> v;
      m.model.bias = parse_double(v, path);
    }
  }
  if (m.model.weights.size() != dim)
    throw DataError(path + ": declared dim " + std::to_string(dim) + " but " +
                    std::to_string(m.model.weights.size()) + " weights");
  return m;
}

}  // namespace retina
