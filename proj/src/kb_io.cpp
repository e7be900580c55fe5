#include <filesystem>
#include <fstream>
#include <sstream>

#include "retina/kb.hpp"

namespace retina {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

// Calls fn(line_number, fields) for every non-comment, non-blank line.
void for_each_row(const std::string& path, size_t min_fields,
                  const std::function<void(size_t, const std::vector<std::string>&)>& fn) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open");
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto fields = split(line, '\t');
    if (fields.size() < min_fields)
      throw DataError(path + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(min_fields) + " tab-separated fields, got " +
                      std::to_string(fields.size()));
    fn(lineno, fields);
  }
}

std::vector<std::string> split_nonempty(const std::string& s, char sep) {
  std::vector<std::string> out;
  for (auto& part : split(s, sep))
    if (!part.empty()) out.push_back(part);
  return out;
}

RangeRef parse_range(const std::string& path, size_t lineno, const std::string& token) {
  RangeRef r;
  if (token == "number:") {
    r.kind = RangeRef::Kind::Number;
  } else if (token == "string:") {
    r.kind = RangeRef::Kind::String;
  } else if (token.empty()) {
    throw DataError(path + ":" + std::to_string(lineno) + ": empty range");
  } else {
    r.kind = RangeRef::Kind::EntityType;
    r.type_id = token;
  }
  return r;
}

}  // namespace

KbData load_kb_data(const std::string& kb_dir) {
  namespace fs = std::filesystem;
  KbData data;

  std::string types_path = (fs::path(kb_dir) / "types.tsv").string();
  for_each_row(types_path, 2, [&](size_t, const std::vector<std::string>& f) {
    data.types.push_back({f[0], f[1]});
  });

  std::string rel_path = (fs::path(kb_dir) / "relations.tsv").string();
  for_each_row(rel_path, 4, [&](size_t lineno, const std::vector<std::string>& f) {
    data.relations.push_back({f[0], f[1], f[2], parse_range(rel_path, lineno, f[3])});
  });

  std::string ent_path = (fs::path(kb_dir) / "entities.tsv").string();
  for_each_row(ent_path, 3, [&](size_t, const std::vector<std::string>& f) {
    EntityDef e;
    e.id = f[0];
    e.label = f[1];
    for (auto& t : split_nonempty(f[2], ',')) e.types.insert(t);
    if (f.size() > 3) e.aliases = split_nonempty(f[3], '|');
    data.entities.push_back(std::move(e));
  });

  std::string facts_path = (fs::path(kb_dir) / "facts.tsv").string();
  for_each_row(facts_path, 3, [&](size_t lineno, const std::vector<std::string>& f) {
    try {
      data.facts.push_back({f[0], f[1], Object::from_token(f[2])});
    } catch (const DataError& e) {
      throw DataError(facts_path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  });

  return data;
}

KbPtr load_kb(const std::string& kb_dir) {
  KbData data = load_kb_data(kb_dir);
  ValidationReport report = validate_kb(data);
  if (!report.ok()) {
    std::ostringstream msg;
    msg << kb_dir << ": " << report.violations.size() << " integrity violation(s); first: "
        << report.violations.front();
    throw IntegrityError(msg.str());
  }
  return KnowledgeBase::build(std::move(data));
}

void save_kb(const KnowledgeBase& kb, const std::string& kb_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(kb_dir);

  std::ofstream types(fs::path(kb_dir) / "types.tsv");
  for (const auto& [_, t] : kb.types()) types << t.id << '\t' << t.label << '\n';

  std::ofstream rels(fs::path(kb_dir) / "relations.tsv");
  for (const auto& [_, r] : kb.relations()) {
    std::string range = r.range.is_type()
                            ? r.range.type_id
                            : (r.range.kind == RangeRef::Kind::Number ? "number:" : "string:");
    rels << r.id << '\t' << r.label << '\t' << r.domain << '\t' << range << '\n';
  }

  std::ofstream ents(fs::path(kb_dir) / "entities.tsv");
  for (const auto& [_, e] : kb.entities()) {
    std::string types_field, aliases_field;
    for (const auto& t : e.types) {
      if (!types_field.empty()) types_field += ',';
      types_field += t;
    }
    for (const auto& a : e.aliases) {
      if (!aliases_field.empty()) aliases_field += '|';
      aliases_field += a;
    }
    ents << e.id << '\t' << e.label << '\t' << types_field << '\t' << aliases_field << '\n';
  }

  std::ofstream facts(fs::path(kb_dir) / "facts.tsv");
  for (const auto& f : kb.facts())
    facts << f.subject << '\t' << f.relation << '\t' << f.object.token() << '\n';
}

}  // namespace retina
