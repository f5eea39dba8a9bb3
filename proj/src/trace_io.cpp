#include <istream>
#include <ostream>
#include <sstream>

#include "bexplore/error.hpp"
#include "bexplore/policies.hpp"

namespace bexplore {

namespace {

const char* kind_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::Public:
      return "public";
    case PolicyKind::Reported:
      return "reported";
    case PolicyKind::Private:
      return "private";
  }
  return "?";
}

PolicyKind kind_from(const std::string& name) {
  if (name == "public") return PolicyKind::Public;
  if (name == "reported") return PolicyKind::Reported;
  if (name == "private") return PolicyKind::Private;
  throw ValidationError("trace", "unknown policy \"" + name + "\"");
}

std::string menu_cell(const Instance& inst, const std::vector<int>& menu) {
  std::string out;
  for (int t = 0; t < inst.num_types(); ++t) {
    if (t) out += "|";
    out += inst.types()[t] + ":" + inst.actions()[menu[t]];
  }
  return out;
}

std::vector<int> parse_menu_cell(const Instance& inst,
                                 const std::string& cell) {
  std::vector<int> menu;
  std::stringstream ss(cell);
  std::string part;
  while (std::getline(ss, part, '|')) {
    const auto colon = part.find(':');
    if (colon == std::string::npos) {
      throw ValidationError("trace", "bad menu cell \"" + cell + "\"");
    }
    const int type = inst.type_index(part.substr(0, colon));
    if (type != static_cast<int>(menu.size())) {
      throw ValidationError("trace", "menu cell out of order");
    }
    menu.push_back(inst.action_index(part.substr(colon + 1)));
  }
  if (static_cast<int>(menu.size()) != inst.num_types()) {
    throw ValidationError("trace", "menu cell arity mismatch");
  }
  return menu;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  return out;
}

}  // namespace

void write_trace_csv(const Trace& trace, const Instance& inst,
                     std::ostream& out) {
  out << "# bexplore-trace v1\n";
  out << "# policy=" << kind_name(trace.kind) << " state="
      << inst.states()[trace.state] << " T=" << trace.horizon
      << " delta=" << rat_to_string(trace.delta) << "\n";
  out << "# seeds types=" << trace.type_seed
      << " policy_seed=" << trace.policy_seed << " guess=" << trace.guess_seed
      << "\n";
  out << "# exploration_rounds=" << trace.exploration_rounds
      << " phases_completed=" << trace.phases_completed
      << " complete=" << (trace.exploration_complete ? 1 : 0) << "\n";
  if (!trace.instance_path.empty()) {
    out << "# instance=" << trace.instance_path << "\n";
  }
  for (const auto& d : trace.diagnostics) out << "# diag " << d << "\n";
  out << "t,type,message,action,reward_num,reward_den,phase,lucky,audit_margin\n";
  for (const auto& row : trace.rows) {
    out << row.round << "," << inst.types()[row.type] << ",";
    if (row.is_menu) {
      out << menu_cell(inst, row.message_menu);
    } else {
      out << inst.actions()[row.message_action];
    }
    out << "," << inst.actions()[row.action] << ","
        << row.reward.get_num().get_str() << ","
        << row.reward.get_den().get_str() << "," << row.phase << ","
        << (row.lucky ? 1 : 0) << "," << rat_to_string(row.audit_margin)
        << "\n";
  }
}

Trace read_trace_csv(std::istream& in, const Instance& inst) {
  Trace trace;
  std::string line;
  bool saw_header = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::stringstream ss(line.substr(1));
      std::string token;
      while (ss >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) {
          if (token == "diag") {
            std::string rest;
            std::getline(ss, rest);
            if (!rest.empty() && rest[0] == ' ') rest.erase(0, 1);
            trace.diagnostics.push_back(rest);
            break;
          }
          continue;
        }
        const std::string key = token.substr(0, eq);
        const std::string value = token.substr(eq + 1);
        if (key == "policy") {
          trace.kind = kind_from(value);
        } else if (key == "state") {
          trace.state = inst.state_index(value);
        } else if (key == "T") {
          trace.horizon = std::stol(value);
        } else if (key == "delta") {
          trace.delta = parse_rational(value);
        } else if (key == "types") {
          trace.type_seed = std::stoull(value);
        } else if (key == "policy_seed") {
          trace.policy_seed = std::stoull(value);
        } else if (key == "guess") {
          trace.guess_seed = std::stoull(value);
        } else if (key == "exploration_rounds") {
          trace.exploration_rounds = std::stol(value);
        } else if (key == "phases_completed") {
          trace.phases_completed = std::stoi(value);
        } else if (key == "complete") {
          trace.exploration_complete = (value == "1");
        } else if (key == "instance") {
          trace.instance_path = value;
        }
      }
      continue;
    }
    if (!saw_header) {
      if (!line.starts_with("t,type,message")) {
        throw ValidationError("trace", "missing column header");
      }
      saw_header = true;
      continue;
    }
    const std::vector<std::string> cells = split(line, ',');
    if (cells.size() != 9) {
      throw ValidationError("trace", "expected 9 columns, got " +
                                         std::to_string(cells.size()));
    }
    TraceRow row;
    row.round = std::stol(cells[0]);
    row.type = inst.type_index(cells[1]);
    if (cells[2].find(':') != std::string::npos) {
      row.is_menu = true;
      row.message_menu = parse_menu_cell(inst, cells[2]);
    } else {
      row.is_menu = false;
      row.message_action = inst.action_index(cells[2]);
    }
    row.action = inst.action_index(cells[3]);
    row.reward = Rat(Int(cells[4]), Int(cells[5]));
    row.reward.canonicalize();
    row.phase = std::stoi(cells[6]);
    row.lucky = (cells[7] == "1");
    row.audit_margin = parse_rational(cells[8]);
    trace.rows.push_back(std::move(row));
  }
  if (!saw_header) throw ValidationError("trace", "empty trace file");
  return trace;
}

}  // namespace bexplore
