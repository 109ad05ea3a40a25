#include "repfair/io.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace repfair {

namespace {

using Json = nlohmann::ordered_json;

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
}

const Json& field(const Json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) throw InputError(std::string("missing field '") + key + "'");
  return obj.at(key);
}

const Json& array_field(const Json& obj, const char* key) {
  const Json& v = field(obj, key);
  if (!v.is_array()) throw InputError(std::string("field '") + key + "' must be an array");
  return v;
}

Rational rational_of(const Json& v) {
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  if (v.is_string()) {
    try {
      return Rational::parse(v.get<std::string>());
    } catch (const std::exception& e) {
      throw InputError("bad rational '" + v.get<std::string>() + "': " + e.what());
    }
  }
  throw InputError("rationals must be strings or integers, got " + v.dump());
}

std::vector<std::string> string_list(const Json& arr, const char* what) {
  std::vector<std::string> out;
  for (const auto& v : arr) {
    if (!v.is_string()) throw InputError(std::string(what) + " ids must be strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

std::vector<std::vector<Rational>> rational_rows(const Json& rows, std::size_t n, std::size_t m, const char* what) {
  if (rows.size() != n) throw InputError(std::string(what) + " needs " + std::to_string(n) + " rows");
  std::vector<std::vector<Rational>> out;
  for (const auto& row : rows) {
    if (!row.is_array() || row.size() != m) {
      throw InputError(std::string(what) + " rows need " + std::to_string(m) + " entries");
    }
    std::vector<Rational> r;
    for (const auto& v : row) r.push_back(rational_of(v));
    out.push_back(std::move(r));
  }
  return out;
}

Json allocation_json(const Instance& inst, const Allocation& a) {
  Json round = Json::object();
  for (AgentIndex i = 0; i < inst.num_agents(); ++i) {
    Json bundle = Json::array();
    for (const ItemIndex o : a.bundle(i)) bundle.push_back(inst.items()[o]);
    round[inst.agents()[i]] = std::move(bundle);
  }
  return round;
}

}  // namespace

Instance parse_instance(std::string_view json_text) {
  const Json doc = parse_json(json_text);
  auto agents = string_list(array_field(doc, "agents"), "agent");
  auto items = string_list(array_field(doc, "items"), "item");
  auto rows = rational_rows(array_field(doc, "utilities"), agents.size(), items.size(), "utilities");
  try {
    return Instance(std::move(agents), std::move(items), std::move(rows));
  } catch (const PreconditionError& e) {
    throw InputError(e.what());
  }
}

std::string format_instance(const Instance& inst) {
  Json doc;
  doc["agents"] = inst.agents();
  doc["items"] = inst.items();
  Json rows = Json::array();
  for (AgentIndex i = 0; i < inst.num_agents(); ++i) {
    Json row = Json::array();
    for (ItemIndex o = 0; o < inst.num_items(); ++o) row.push_back(inst.utility(i, o).str());
    rows.push_back(std::move(row));
  }
  doc["utilities"] = std::move(rows);
  return doc.dump(2) + "\n";
}

Sequence parse_sequence(const Instance& inst, std::string_view json_text) {
  const Json doc = parse_json(json_text);
  Sequence seq;
  for (const auto& round : array_field(doc, "rounds")) {
    if (!round.is_object()) throw InputError("each round must map agent ids to item lists");
    std::vector<std::vector<ItemIndex>> bundles(inst.num_agents());
    for (const auto& [agent, items] : round.items()) {
      if (!items.is_array()) throw InputError("bundle of '" + agent + "' must be an array");
      const AgentIndex i = inst.agent_index(agent);
      for (const auto& item : items) {
        if (!item.is_string()) throw InputError("item ids must be strings");
        bundles[i].push_back(inst.item_index(item.get<std::string>()));
      }
    }
    try {
      seq.push_back(Allocation::from_bundles(inst, bundles));
    } catch (const PreconditionError& e) {
      throw InputError("round " + std::to_string(seq.size() + 1) + ": " + e.what());
    }
  }
  if (seq.empty()) throw InputError("a sequence needs at least one round");
  return seq;
}

std::string format_sequence(const Instance& inst, const Sequence& seq) {
  Json rounds = Json::array();
  for (const auto& a : seq) rounds.push_back(allocation_json(inst, a));
  Json doc;
  doc["rounds"] = std::move(rounds);
  return doc.dump(2) + "\n";
}

FractionalAllocation parse_fraction(const Instance& inst, std::string_view json_text) {
  const Json doc = parse_json(json_text);
  const auto rows = rational_rows(array_field(doc, "shares"), inst.num_agents(), inst.num_items(), "shares");
  std::vector<Rational> flat;
  for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
  try {
    return FractionalAllocation(inst.num_agents(), inst.num_items(), std::move(flat));
  } catch (const PreconditionError& e) {
    throw InputError(e.what());
  }
}

std::string format_fraction(const FractionalAllocation& x) {
  Json rows = Json::array();
  for (AgentIndex i = 0; i < x.num_agents(); ++i) {
    Json row = Json::array();
    for (ItemIndex o = 0; o < x.num_items(); ++o) row.push_back(x.share(i, o).str());
    rows.push_back(std::move(row));
  }
  Json doc;
  doc["shares"] = std::move(rows);
  return doc.dump(2) + "\n";
}

std::string format_lottery(const Instance& inst, const RandomizedAllocation& ra) {
  Json support = Json::array();
  for (const auto& [p, a] : ra.support) {
    Json entry;
    entry["probability"] = p.str();
    entry["allocation"] = allocation_json(inst, a);
    support.push_back(std::move(entry));
  }
  Json doc;
  doc["support"] = std::move(support);
  return doc.dump(2) + "\n";
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace repfair
