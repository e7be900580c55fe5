#include "retina/discriminator.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <thread>

#include <json.hpp>

#include "retina/errors.hpp"

namespace retina {

using nlohmann::json;

std::vector<CandidateLogicalForm> assemble_candidates(
    const std::vector<CandidateLogicalForm>& retrieved,
    const std::vector<CandidateLogicalForm>& constructed) {
  std::map<std::string, CandidateLogicalForm> by_key;
  for (const auto& c : retrieved) by_key.emplace(c.key, c);
  for (const auto& c : constructed) {
    auto [it, inserted] = by_key.emplace(c.key, c);
    if (!inserted) it->second.source = CandidateSource::Both;
  }
  std::vector<CandidateLogicalForm> out;
  out.reserve(by_key.size());
  for (auto& [_, c] : by_key) {
    c.score.reset();
    out.push_back(std::move(c));
  }
  return out;
}

Prediction decide(const std::string& question,
                  const std::vector<CandidateLogicalForm>& candidates, const Scorer& scorer,
                  const Threshold& threshold, const KnowledgeBase& kb, DecideMode mode) {
  Prediction pred;
  pred.n_candidates = candidates.size();
  if (candidates.empty()) return pred;  // (NK, NA) without consulting the threshold

  std::vector<CandidateLogicalForm> ranked = candidates;
  for (auto& c : ranked) c.score = scorer.score_item(question, lf_score_item(c, kb));
  std::sort(ranked.begin(), ranked.end(),
            [](const CandidateLogicalForm& a, const CandidateLogicalForm& b) {
              if (*a.score != *b.score) return *a.score > *b.score;
              return a.key < b.key;
            });

  const CandidateLogicalForm& top = ranked.front();
  pred.top_score = *top.score;

  switch (mode) {
    case DecideMode::Unanswerability: {
      if (*top.score < threshold.tau) return pred;  // (NK, NA)
      pred.logical_form = top.expr;
      AnswerSet answers = execute(*top.expr, kb);
      if (!answers.empty()) pred.answer = std::move(answers);
      return pred;
    }
    case DecideMode::Egc: {
      for (const auto& c : ranked) {
        AnswerSet answers = execute(*c.expr, kb);
        if (!answers.empty()) {
          pred.logical_form = c.expr;
          pred.answer = std::move(answers);
          pred.top_score = *c.score;
          return pred;
        }
      }
      pred.logical_form = top.expr;  // every candidate executes empty
      return pred;
    }
    case DecideMode::Plain: {
      pred.logical_form = top.expr;
      AnswerSet answers = execute(*top.expr, kb);
      if (!answers.empty()) pred.answer = std::move(answers);
      return pred;
    }
  }
  return pred;
}

PipelineComponents PipelineComponents::baseline() {
  PipelineComponents c;
  c.retriever_scorer = make_baseline_scorer();
  c.sketch_ranker = make_baseline_scorer();
  c.type_scorer = make_baseline_scorer();
  c.relation_scorer = make_baseline_scorer();
  c.discriminator_scorer = make_baseline_scorer();
  c.threshold = {0.0, "fixed", 0.0};
  return c;
}

StagedCandidates enumerate_candidates(const std::string& question, const KnowledgeBase& kb,
                                      const AliasLexicon& lexicon,
                                      const PipelineComponents& comps,
                                      const PipelineConfig& cfg) {
  StagedCandidates out;
  out.linked = link_entities(question, kb, lexicon, cfg.linker_top_k);

  if (!cfg.toggles.lfr) {
    std::vector<KBPath> paths = enumerate_paths(kb, out.linked, cfg.retriever);
    out.retrieved = rank_retrieved(question, paths_to_logical_forms(paths, kb),
                                   *comps.retriever_scorer, kb, cfg.retriever.top_k);
  }
  if (!cfg.toggles.sgsr) {
    SketchBeam beam =
        comps.inventory.empty()
            ? SketchBeam{}
            : generate_sketches(question, comps.inventory, *comps.sketch_ranker,
                                cfg.construct.beam);
    SchemaCandidates schema = retrieve_schema(question, kb, *comps.type_scorer,
                                              *comps.relation_scorer, cfg.construct.schema_top_k);
    ConstructorConfig ccfg = cfg.construct;
    ccfg.check_groundings = !cfg.toggles.lfi;
    out.constructed = integrate(beam, schema, out.linked, kb, ccfg);
  }
  out.pool = assemble_candidates(out.retrieved, out.constructed);
  return out;
}

namespace {

RunRecord run_one(const QAExample& ex, const KnowledgeBase& kb, const AliasLexicon& lexicon,
                  const PipelineComponents& comps, const PipelineConfig& cfg) {
  RunRecord rec;
  rec.prediction.qid = ex.qid;
  std::string stage = "entity_linker";
  try {
    StagedCandidates staged;
    staged.linked = link_entities(ex.question, kb, lexicon, cfg.linker_top_k);

    if (!cfg.toggles.lfr) {
      stage = "lf_retriever";
      std::vector<KBPath> paths = enumerate_paths(kb, staged.linked, cfg.retriever);
      staged.retrieved = rank_retrieved(ex.question, paths_to_logical_forms(paths, kb),
                                        *comps.retriever_scorer, kb, cfg.retriever.top_k);
    }
    if (!cfg.toggles.sgsr) {
      stage = "lf_constructor";
      SketchBeam beam =
          comps.inventory.empty()
              ? SketchBeam{}
              : generate_sketches(ex.question, comps.inventory, *comps.sketch_ranker,
                                  cfg.construct.beam);
      SchemaCandidates schema =
          retrieve_schema(ex.question, kb, *comps.type_scorer, *comps.relation_scorer,
                          cfg.construct.schema_top_k);
      ConstructorConfig ccfg = cfg.construct;
      ccfg.check_groundings = !cfg.toggles.lfi;
      staged.constructed = integrate(beam, schema, staged.linked, kb, ccfg);
    }

    stage = "discriminator";
    std::vector<CandidateLogicalForm> pool =
        assemble_candidates(staged.retrieved, staged.constructed);

    DecideMode mode = cfg.mode;
    if (mode == DecideMode::Egc && cfg.toggles.egc) mode = DecideMode::Plain;
    rec.prediction =
        decide(ex.question, pool, *comps.discriminator_scorer, comps.threshold, kb, mode);
    rec.prediction.qid = ex.qid;

    if (ex.gold_lf) {
      std::string gold_key = canonical_key(ex.gold_lf);
      bool in_pool = std::any_of(pool.begin(), pool.end(), [&gold_key](const auto& c) {
        return c.key == gold_key;
      });
      rec.prediction.gold_in_candidates = in_pool;
    }
  } catch (const std::exception& e) {
    rec.prediction = Prediction{};
    rec.prediction.qid = ex.qid;
    rec.had_error = true;
    rec.error_component = stage;
    rec.error_message = e.what();
  }
  return rec;
}

}  // namespace

std::vector<RunRecord> run_pipeline(const std::vector<QAExample>& examples,
                                    const KnowledgeBase& kb, const PipelineComponents& comps,
                                    const PipelineConfig& cfg) {
  AliasLexicon lexicon = AliasLexicon::build(kb);
  std::vector<RunRecord> records(examples.size());

  int jobs = std::max(1, cfg.jobs);
  if (jobs == 1 || examples.size() < 2) {
    for (size_t i = 0; i < examples.size(); ++i)
      records[i] = run_one(examples[i], kb, lexicon, comps, cfg);
    return records;
  }

  std::vector<std::thread> workers;
  for (int t = 0; t < jobs; ++t) {
    workers.emplace_back([&, t] {
      for (size_t i = static_cast<size_t>(t); i < examples.size(); i += static_cast<size_t>(jobs))
        records[i] = run_one(examples[i], kb, lexicon, comps, cfg);
    });
  }
  for (auto& w : workers) w.join();
  return records;
}

std::set<std::string> attribute_recall(const QAExample& ex, const KnowledgeBase& kb,
                                       const AliasLexicon& lexicon,
                                       const PipelineComponents& comps,
                                       const PipelineConfig& cfg) {
  std::set<std::string> out;
  if (!ex.gold_lf) return out;
  std::string gold_key = canonical_key(ex.gold_lf);
  SchemaUse gold_use = collect_ids(*ex.gold_lf);

  auto pool_has_gold = [&gold_key](const std::vector<CandidateLogicalForm>& pool) {
    return std::any_of(pool.begin(), pool.end(),
                       [&gold_key](const auto& c) { return c.key == gold_key; });
  };

  // (a) oracle entity linking: link exactly the gold form's entities
  {
    LinkedEntities linked;
    for (const auto& id : gold_use.entities)
      if (kb.has_entity(id)) linked.links.push_back({Mention{0, 0, ""}, id, 0.0});
    StagedCandidates staged;
    staged.linked = linked;
    std::vector<CandidateLogicalForm> retrieved, constructed;
    if (!cfg.toggles.lfr) {
      std::vector<KBPath> paths = enumerate_paths(kb, linked, cfg.retriever);
      retrieved = rank_retrieved(ex.question, paths_to_logical_forms(paths, kb),
                                 *comps.retriever_scorer, kb, cfg.retriever.top_k);
    }
    if (!cfg.toggles.sgsr) {
      SketchBeam beam = comps.inventory.empty()
                            ? SketchBeam{}
                            : generate_sketches(ex.question, comps.inventory,
                                                *comps.sketch_ranker, cfg.construct.beam);
      SchemaCandidates schema =
          retrieve_schema(ex.question, kb, *comps.type_scorer, *comps.relation_scorer,
                          cfg.construct.schema_top_k);
      ConstructorConfig ccfg = cfg.construct;
      ccfg.check_groundings = !cfg.toggles.lfi;
      constructed = integrate(beam, schema, linked, kb, ccfg);
    }
    if (pool_has_gold(assemble_candidates(retrieved, constructed))) out.insert("entity_linking");
  }

  if (!cfg.toggles.sgsr) {
    StagedCandidates real = enumerate_candidates(ex.question, kb, lexicon, comps, cfg);
    ConstructorConfig ccfg = cfg.construct;
    ccfg.check_groundings = !cfg.toggles.lfi;

    // (b) oracle schema retrieval: candidate arguments are the gold's own
    {
      SchemaCandidates schema;
      for (const auto& t : gold_use.types)
        if (kb.has_type(t)) schema.types.push_back({t, 1.0});
      for (const auto& r : gold_use.relations)
        if (kb.has_relation(r)) schema.relations.push_back({r, 1.0});
      SketchBeam beam = comps.inventory.empty()
                            ? SketchBeam{}
                            : generate_sketches(ex.question, comps.inventory,
                                                *comps.sketch_ranker, cfg.construct.beam);
      auto constructed = integrate(beam, schema, real.linked, kb, ccfg);
      if (pool_has_gold(assemble_candidates(real.retrieved, constructed)))
        out.insert("schema_retrieval");
    }

    // (c) oracle sketch generation: the gold's own sketch
    {
      SketchBeam beam;
      Sketch sk = extract_sketch(canonicalize(ex.gold_lf));
      sk.tree = canonicalize(sk.tree);
      beam.entries.push_back({std::move(sk), 1.0});
      SchemaCandidates schema =
          retrieve_schema(ex.question, kb, *comps.type_scorer, *comps.relation_scorer,
                          cfg.construct.schema_top_k);
      auto constructed = integrate(beam, schema, real.linked, kb, ccfg);
      if (pool_has_gold(assemble_candidates(real.retrieved, constructed)))
        out.insert("sketch_generation");
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Files

void save_predictions(const std::vector<Prediction>& preds, const std::string& path,
                      const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) throw DataError(path + ": cannot open for writing");
  if (!header_comment.empty()) out << "# " << header_comment << '\n';
  for (const auto& p : preds) {
    json j;
    j["qid"] = p.qid;
    j["lf"] = p.logical_form ? print_sexpr(*p.logical_form) : "NK";
    if (p.answer) {
      json arr = json::array();
      for (const auto& a : *p.answer) arr.push_back(a);
      j["answer"] = arr;
    } else {
      j["answer"] = "NA";
    }
    if (p.top_score) j["score"] = *p.top_score;
    j["n_candidates"] = p.n_candidates;
    out << j.dump() << '\n';
  }
}

std::vector<Prediction> load_predictions(const std::string& path, const IdClassifier& ids) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open");
  std::vector<Prediction> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::string where = path + ":" + std::to_string(lineno);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError(where + ": " + e.what());
    }
    Prediction p;
    try {
      p.qid = j.at("qid").get<std::string>();
      std::string lf = j.at("lf").get<std::string>();
      if (lf != "NK") p.logical_form = parse_sexpr(lf, ids);
      const auto& ans = j.at("answer");
      if (ans.is_array()) {
        AnswerSet a;
        for (const auto& el : ans) a.insert(el.get<std::string>());
        p.answer = std::move(a);
      } else if (ans.get<std::string>() != "NA") {
        throw DataError(where + ": answer must be an array or \"NA\"");
      }
      if (j.contains("score")) p.top_score = j.at("score").get<double>();
      p.n_candidates = j.at("n_candidates").get<size_t>();
    } catch (const json::exception& e) {
      throw DataError(where + ": " + e.what());
    }
    out.push_back(std::move(p));
  }
  return out;
}

void save_run_records(const std::vector<RunRecord>& records, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError(path + ": cannot open for writing");
  for (const auto& r : records) {
    json j;
    j["qid"] = r.prediction.qid;
    if (r.prediction.gold_in_candidates)
      j["gold_in_candidates"] = *r.prediction.gold_in_candidates;
    j["had_error"] = r.had_error;
    if (r.had_error) {
      j["error_component"] = r.error_component;
      j["error_message"] = r.error_message;
    }
    out << j.dump() << '\n';
  }
}

void merge_run_records(std::vector<Prediction>& preds, const std::string& records_path) {
  std::ifstream in(records_path);
  if (!in) throw DataError(records_path + ": cannot open");
  std::map<std::string, bool> gold_in;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    json j = json::parse(line);
    if (j.contains("gold_in_candidates"))
      gold_in[j.at("qid").get<std::string>()] = j.at("gold_in_candidates").get<bool>();
  }
  for (auto& p : preds) {
    auto it = gold_in.find(p.qid);
    if (it != gold_in.end()) p.gold_in_candidates = it->second;
  }
}

}  // namespace retina
