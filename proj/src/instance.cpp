#include "bexplore/instance.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "bexplore/error.hpp"
#include "json.hpp"

namespace bexplore {

namespace {

using nlohmann::ordered_json;

void check_labels(const std::vector<std::string>& labels,
                  const std::string& field) {
  if (labels.empty()) throw ValidationError(field, "must be non-empty");
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (l.empty()) throw ValidationError(field, "empty label");
    for (char c : l) {
      // labels appear verbatim in signal values and trace CSV cells
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' &&
          c != '-' && c != '.') {
        throw ValidationError(field, "label \"" + l +
                                         "\" may only contain [A-Za-z0-9_.-]");
      }
    }
    if (!seen.insert(l).second) {
      throw ValidationError(field, "duplicate label \"" + l + "\"");
    }
  }
}

void check_distribution(const std::vector<Rat>& probs,
                        const std::vector<std::string>& labels,
                        const std::string& field) {
  Rat sum = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0) {
      throw ValidationError(field + "." + labels[i],
                            "weight must be positive, got " +
                                rat_to_string(probs[i]));
    }
    sum += probs[i];
  }
  if (sum != 1) {
    throw ValidationError(field, "prior sums to " + rat_to_string(sum));
  }
}

std::map<std::string, int> index_map(const std::vector<std::string>& labels) {
  std::map<std::string, int> m;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    m[labels[i]] = static_cast<int>(i);
  }
  return m;
}

Rat json_to_rational(const ordered_json& v, const std::string& path) {
  try {
    if (v.is_number_integer()) {
      return Rat(static_cast<long>(v.get<std::int64_t>()));
    }
    if (v.is_string()) return parse_rational(v.get<std::string>());
  } catch (const ValidationError& e) {
    throw ValidationError(path, e.what());
  }
  throw ValidationError(path,
                        "expected an integer or a \"p/q\" string, got " +
                            v.dump());
}

std::vector<std::string> json_to_labels(const ordered_json& doc,
                                        const std::string& field) {
  if (!doc.contains(field)) throw ValidationError(field, "missing");
  const auto& arr = doc.at(field);
  if (!arr.is_array()) throw ValidationError(field, "expected an array");
  std::vector<std::string> labels;
  for (const auto& v : arr) {
    if (!v.is_string()) throw ValidationError(field, "labels must be strings");
    labels.push_back(v.get<std::string>());
  }
  return labels;
}

std::vector<Rat> json_to_dist(const ordered_json& doc, const std::string& field,
                              const std::vector<std::string>& labels) {
  if (!doc.contains(field)) throw ValidationError(field, "missing");
  const auto& obj = doc.at(field);
  if (!obj.is_object()) throw ValidationError(field, "expected an object");
  std::vector<Rat> probs;
  for (const auto& l : labels) {
    if (!obj.contains(l)) {
      throw ValidationError(field + "." + l, "missing weight");
    }
    probs.push_back(json_to_rational(obj.at(l), field + "." + l));
  }
  if (obj.size() != labels.size()) {
    for (const auto& [key, _] : obj.items()) {
      if (std::find(labels.begin(), labels.end(), key) == labels.end()) {
        throw ValidationError(field + "." + key, "unknown label");
      }
    }
  }
  return probs;
}

}  // namespace

Instance::Instance(std::vector<std::string> states,
                   std::vector<std::string> types,
                   std::vector<std::string> actions,
                   std::vector<Rat> state_prior, std::vector<Rat> type_dist,
                   std::vector<Rat> utility)
    : states_(std::move(states)),
      types_(std::move(types)),
      actions_(std::move(actions)),
      state_prior_(std::move(state_prior)),
      type_dist_(std::move(type_dist)),
      utility_(std::move(utility)) {
  check_labels(states_, "states");
  check_labels(types_, "types");
  check_labels(actions_, "actions");
  if (state_prior_.size() != states_.size()) {
    throw ValidationError("state_prior", "wrong size");
  }
  if (type_dist_.size() != types_.size()) {
    throw ValidationError("type_dist", "wrong size");
  }
  check_distribution(state_prior_, states_, "state_prior");
  check_distribution(type_dist_, types_, "type_dist");
  if (utility_.size() != states_.size() * types_.size() * actions_.size()) {
    throw ValidationError("utility", "table is not total");
  }
  state_idx_ = index_map(states_);
  type_idx_ = index_map(types_);
  action_idx_ = index_map(actions_);
}

namespace {

int lookup(const std::map<std::string, int>& m, const std::string& label,
           const char* kind) {
  auto it = m.find(label);
  if (it == m.end()) {
    throw ValidationError(kind, "unknown label \"" + label + "\"");
  }
  return it->second;
}

}  // namespace

int Instance::state_index(const std::string& label) const {
  return lookup(state_idx_, label, "states");
}
int Instance::type_index(const std::string& label) const {
  return lookup(type_idx_, label, "types");
}
int Instance::action_index(const std::string& label) const {
  return lookup(action_idx_, label, "actions");
}

Instance load_instance(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("", std::string("malformed document: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("", "document must be an object");

  auto states = json_to_labels(doc, "states");
  auto types = json_to_labels(doc, "types");
  auto actions = json_to_labels(doc, "actions");
  auto state_prior = json_to_dist(doc, "state_prior", states);
  auto type_dist = json_to_dist(doc, "type_dist", types);

  if (!doc.contains("utility")) throw ValidationError("utility", "missing");
  const auto& u = doc.at("utility");
  if (!u.is_array() || u.size() != types.size()) {
    throw ValidationError("utility",
                          "expected one row of actions per type");
  }
  std::vector<Rat> utility;
  utility.reserve(states.size() * types.size() * actions.size());
  for (std::size_t t = 0; t < types.size(); ++t) {
    const auto& row = u.at(t);
    const std::string tpath = "utility[" + std::to_string(t) + "]";
    if (!row.is_array() || row.size() != actions.size()) {
      throw ValidationError(tpath, "expected one entry per action");
    }
    for (std::size_t a = 0; a < actions.size(); ++a) {
      const auto& cell = row.at(a);
      const std::string apath = tpath + "[" + std::to_string(a) + "]";
      if (!cell.is_array() || cell.size() != states.size()) {
        throw ValidationError(apath, "expected one value per state");
      }
      for (std::size_t w = 0; w < states.size(); ++w) {
        utility.push_back(json_to_rational(
            cell.at(w), apath + "[" + std::to_string(w) + "]"));
      }
    }
  }
  return Instance(std::move(states), std::move(types), std::move(actions),
                  std::move(state_prior), std::move(type_dist),
                  std::move(utility));
}

std::string serialize_instance(const Instance& inst) {
  ordered_json doc;
  doc["states"] = inst.states();
  doc["types"] = inst.types();
  doc["actions"] = inst.actions();
  ordered_json prior;
  for (int w = 0; w < inst.num_states(); ++w) {
    prior[inst.states()[w]] = rat_to_string(inst.state_prior(w));
  }
  doc["state_prior"] = prior;
  ordered_json dist;
  for (int t = 0; t < inst.num_types(); ++t) {
    dist[inst.types()[t]] = rat_to_string(inst.type_prob(t));
  }
  doc["type_dist"] = dist;
  ordered_json table = ordered_json::array();
  for (int t = 0; t < inst.num_types(); ++t) {
    ordered_json row = ordered_json::array();
    for (int a = 0; a < inst.num_actions(); ++a) {
      ordered_json cell = ordered_json::array();
      for (int w = 0; w < inst.num_states(); ++w) {
        cell.push_back(rat_to_string(inst.utility(t, a, w)));
      }
      row.push_back(cell);
    }
    table.push_back(row);
  }
  doc["utility"] = table;
  return doc.dump(2) + "\n";
}

Instance load_instance_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path, "cannot open instance file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_instance(buf.str());
}

Rat expected_utility_prior(const Instance& inst, int type, int action) {
  if (type < 0 || type >= inst.num_types()) {
    throw ValidationError("types", "index out of range");
  }
  if (action < 0 || action >= inst.num_actions()) {
    throw ValidationError("actions", "index out of range");
  }
  Rat total = 0;
  for (int w = 0; w < inst.num_states(); ++w) {
    total += inst.state_prior(w) * inst.utility(type, action, w);
  }
  return total;
}

Rat expected_utility_prior(const Instance& inst, const std::string& type,
                           const std::string& action) {
  return expected_utility_prior(inst, inst.type_index(type),
                                inst.action_index(action));
}

std::size_t menu_count(const Instance& inst) {
  std::size_t count = 1;
  for (int t = 0; t < inst.num_types(); ++t) {
    count *= static_cast<std::size_t>(inst.num_actions());
  }
  return count;
}

std::vector<Menu> enumerate_menus(const Instance& inst, std::size_t cap) {
  Int total = 1;
  for (int t = 0; t < inst.num_types(); ++t) total *= inst.num_actions();
  if (total > Int(static_cast<unsigned long>(cap))) {
    throw ValidationError(
        "menus", "enumeration of " + total.get_str() +
                     " menus exceeds cap " + std::to_string(cap));
  }
  std::vector<Menu> menus;
  Menu current{std::vector<int>(inst.num_types(), 0)};
  while (true) {
    menus.push_back(current);
    int t = inst.num_types() - 1;
    while (t >= 0) {
      if (++current.action_of_type[t] < inst.num_actions()) break;
      current.action_of_type[t] = 0;
      --t;
    }
    if (t < 0) break;
  }
  return menus;
}

OutcomeDistribution menu_outcome_distribution(const Instance& inst,
                                              const Menu& m, int state) {
  if (state < 0 || state >= inst.num_states()) {
    throw ValidationError("states", "index out of range");
  }
  if (static_cast<int>(m.action_of_type.size()) != inst.num_types()) {
    throw ValidationError("menu", "wrong arity");
  }
  std::map<std::pair<int, Rat>, Rat> mass;
  for (int t = 0; t < inst.num_types(); ++t) {
    int a = m.action_of_type[t];
    mass[{a, inst.utility(t, a, state)}] += inst.type_prob(t);
  }
  OutcomeDistribution dist;
  for (const auto& [pair, p] : mass) {
    if (p > 0) dist.atoms.push_back({pair.first, pair.second, p});
  }
  return dist;
}

std::string menu_to_string(const Instance& inst, const Menu& m) {
  std::string out;
  for (int t = 0; t < inst.num_types(); ++t) {
    if (t) out += "|";
    out += inst.types()[t] + ":" + inst.actions()[m.action_of_type[t]];
  }
  return out;
}

}  // namespace bexplore
