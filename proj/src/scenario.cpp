#include "mdg/scenario.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>

namespace mdg {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

struct Line {
  int number;
  std::string text;
};

double parse_number(const std::string& s, int line) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ScenarioParseError(line, "expected a number, got '" + s + "'");
  }
}

// "A -> B : svc" with Any wildcards on src/service.
AclRule parse_rule(const std::string& text, int line) {
  auto arrow = text.find("->");
  auto colon = text.find(':', arrow == std::string::npos ? 0 : arrow);
  if (arrow == std::string::npos || colon == std::string::npos)
    throw ScenarioParseError(line, "expected 'src -> dst : service'");
  AclRule rule;
  std::string src = trim(text.substr(0, arrow));
  rule.dst = trim(text.substr(arrow + 2, colon - arrow - 2));
  std::string svc = trim(text.substr(colon + 1));
  if (src.empty() || rule.dst.empty() || svc.empty())
    throw ScenarioParseError(line, "empty field in ACL rule");
  if (src != kAnyToken) rule.src = src;
  if (svc != kAnyToken) rule.service = svc;
  return rule;
}

void default_costs(RewardModel& m) {
  for (const char* k : {"enter_room", "control_device", "modify_acl", "enable_port",
                        "access_service", "use_credential"}) {
    m.attack_cost.emplace(k, 1.0);
    m.damage_cost.emplace(k, 1.0);
  }
  m.defense_cost.emplace("rotate_credential", 1.0);
  m.defense_cost.emplace("restart_service", 1.0);
  m.defense_cost.emplace("cut_traffic", 1.0);
  m.defense_cost.emplace("modify_acl", 1.0);
  m.defense_cost.emplace("audit_device", 0.5);
}

}  // namespace

const CredentialInfo* Scenario::find_credential(const CredentialId& id) const {
  for (const auto& c : credentials)
    if (c.id == id) return &c;
  return nullptr;
}

std::vector<std::pair<DeviceId, ServiceName>> Scenario::service_pairs() const {
  std::vector<std::pair<DeviceId, ServiceName>> out;
  for (const auto& [id, dev] : topo.devices)
    for (const auto& svc : dev.services) out.emplace_back(id, svc.name);
  std::sort(out.begin(), out.end());
  return out;
}

Scenario load_scenario(const std::string& text, const std::string& name) {
  Scenario scn;
  scn.name = name;
  default_costs(scn.model);

  std::map<std::string, std::vector<Line>> sections;
  std::map<std::string, int> section_lines;
  {
    std::istringstream in(text);
    std::string raw;
    int number = 0;
    std::string current;
    bool any_content = false;
    while (std::getline(in, raw)) {
      ++number;
      auto hash = raw.find('#');
      if (hash != std::string::npos) raw = raw.substr(0, hash);
      std::string line = trim(raw);
      if (line.empty()) continue;
      any_content = true;
      if (line.front() == '[') {
        if (line.back() != ']') throw ScenarioParseError(number, "unterminated section header");
        current = line.substr(1, line.size() - 2);
        section_lines[current] = number;
        sections[current];
        continue;
      }
      if (current.empty())
        throw ScenarioParseError(number, "content before any [section]");
      sections[current].push_back({number, line});
    }
    if (!any_content) throw ScenarioParseError(1, "empty document");
  }

  static const char* known[] = {"rooms", "adjacency", "devices", "links", "services",
                                "credentials", "acl", "costs", "terminal_rewards"};
  for (const auto& [sec, _] : sections) {
    if (std::find_if(std::begin(known), std::end(known),
                     [&](const char* k) { return sec == k; }) == std::end(known))
      throw ScenarioParseError(section_lines[sec], "unknown section [" + sec + "]");
  }
  for (const char* required : {"rooms", "devices"})
    if (!sections.count(required))
      throw ScenarioParseError(1, std::string("missing [") + required + "] section");

  // [rooms]
  scn.topo.rooms.insert(kOutsideRoom);
  for (const auto& l : sections["rooms"]) scn.topo.rooms.insert(l.text);

  // [adjacency]: "room = a, b, c"
  for (const auto& l : sections["adjacency"]) {
    auto eq = l.text.find('=');
    if (eq == std::string::npos) throw ScenarioParseError(l.number, "expected 'room = list'");
    RoomId room = trim(l.text.substr(0, eq));
    if (!scn.topo.rooms.count(room))
      throw ScenarioValidationError("unknown room '" + room + "'", l.number);
    for (const auto& other : split(l.text.substr(eq + 1), ',')) {
      if (other.empty()) continue;
      if (!scn.topo.rooms.count(other))
        throw ScenarioValidationError("unknown room '" + other + "'", l.number);
      if (other == room)
        throw ScenarioValidationError("room adjacent to itself: " + room, l.number);
      scn.topo.adjacency[room].insert(other);
      scn.topo.adjacency[other].insert(room);
    }
  }

  // [devices]: "id = kind, room"
  for (const auto& l : sections["devices"]) {
    auto eq = l.text.find('=');
    if (eq == std::string::npos) throw ScenarioParseError(l.number, "expected 'id = kind, room'");
    Device dev;
    dev.id = trim(l.text.substr(0, eq));
    auto parts = split(l.text.substr(eq + 1), ',');
    if (parts.size() != 2) throw ScenarioParseError(l.number, "expected 'id = kind, room'");
    auto kind = device_kind_from_string(parts[0]);
    if (!kind) throw ScenarioParseError(l.number, "unknown device kind '" + parts[0] + "'");
    dev.kind = *kind;
    dev.room = parts[1];
    if (!scn.topo.rooms.count(dev.room))
      throw ScenarioValidationError("device " + dev.id + " references unknown room '" + dev.room + "'", l.number);
    if (scn.topo.devices.count(dev.id))
      throw ScenarioValidationError("duplicate device '" + dev.id + "'", l.number);
    scn.topo.devices.emplace(dev.id, dev);
  }

  // [links]: "A - B" with optional ", gated"
  for (const auto& l : sections["links"]) {
    auto parts = split(l.text, ',');
    bool gated = false;
    if (parts.size() == 2 && parts[1] == "gated") gated = true;
    else if (parts.size() != 1) throw ScenarioParseError(l.number, "expected 'A - B[, gated]'");
    auto ends = split(parts[0], '-');
    if (ends.size() != 2) throw ScenarioParseError(l.number, "expected 'A - B'");
    for (const auto& e : ends)
      if (!scn.topo.has_device(e))
        throw ScenarioValidationError("link references unknown device '" + e + "'", l.number);
    if (ends[0] == ends[1])
      throw ScenarioValidationError("self-link on '" + ends[0] + "'", l.number);
    DevicePair p = make_pair_norm(ends[0], ends[1]);
    scn.topo.links.insert(p);
    if (gated) scn.topo.gated_links.insert(p);
  }

  // [services]: "Dev.name = requires: cred; yields: a, b"
  for (const auto& l : sections["services"]) {
    auto eq = l.text.find('=');
    std::string head = trim(eq == std::string::npos ? l.text : l.text.substr(0, eq));
    auto dot = head.find('.');
    if (dot == std::string::npos)
      throw ScenarioParseError(l.number, "expected 'Device.service = ...'");
    DeviceId dev_id = head.substr(0, dot);
    Service svc;
    svc.name = head.substr(dot + 1);
    auto dev_it = scn.topo.devices.find(dev_id);
    if (dev_it == scn.topo.devices.end())
      throw ScenarioValidationError("service on unknown device '" + dev_id + "'", l.number);
    if (dev_it->second.find_service(svc.name))
      throw ScenarioValidationError("duplicate service " + head, l.number);
    if (eq != std::string::npos) {
      for (const auto& clause : split(l.text.substr(eq + 1), ';')) {
        if (clause.empty()) continue;
        auto colon = clause.find(':');
        if (colon == std::string::npos)
          throw ScenarioParseError(l.number, "expected 'requires:' or 'yields:' clause");
        std::string key = trim(clause.substr(0, colon));
        std::string value = trim(clause.substr(colon + 1));
        if (key == "requires") {
          svc.required_credential = value;
        } else if (key == "yields") {
          for (const auto& item : split(value, ','))
            if (!item.empty()) svc.yields.push_back(item);
        } else {
          throw ScenarioParseError(l.number, "unknown clause '" + key + "'");
        }
      }
    }
    dev_it->second.services.push_back(svc);
    scn.initial.service_up[{dev_id, svc.name}] = true;
  }

  // [credentials]: "id = Device.service"
  for (const auto& l : sections["credentials"]) {
    auto eq = l.text.find('=');
    if (eq == std::string::npos)
      throw ScenarioParseError(l.number, "expected 'cred = Device.service'");
    CredentialInfo cred;
    cred.id = trim(l.text.substr(0, eq));
    std::string target = trim(l.text.substr(eq + 1));
    auto dot = target.find('.');
    if (dot == std::string::npos)
      throw ScenarioParseError(l.number, "expected 'cred = Device.service'");
    cred.device = target.substr(0, dot);
    cred.service = target.substr(dot + 1);
    auto dev_it = scn.topo.devices.find(cred.device);
    if (dev_it == scn.topo.devices.end() || !dev_it->second.find_service(cred.service))
      throw ScenarioValidationError("credential " + cred.id + " unlocks unknown service " + target, l.number);
    scn.credentials.push_back(cred);
  }
  std::sort(scn.credentials.begin(), scn.credentials.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });

  // [acl]: "FW: src -> dst : service"
  for (const auto& l : sections["acl"]) {
    auto colon = l.text.find(':');
    if (colon == std::string::npos)
      throw ScenarioParseError(l.number, "expected 'Firewall: src -> dst : service'");
    DeviceId fw = trim(l.text.substr(0, colon));
    auto fw_it = scn.topo.devices.find(fw);
    if (fw_it == scn.topo.devices.end())
      throw ScenarioValidationError("ACL on unknown device '" + fw + "'", l.number);
    if (fw_it->second.kind != DeviceKind::Firewall)
      throw ScenarioValidationError("ACL on non-firewall '" + fw + "'", l.number);
    AclRule rule = parse_rule(trim(l.text.substr(colon + 1)), l.number);
    if (rule.src && !scn.topo.has_device(*rule.src))
      throw ScenarioValidationError("ACL rule references unknown device '" + *rule.src + "'", l.number);
    if (!scn.topo.has_device(rule.dst))
      throw ScenarioValidationError("ACL rule references unknown device '" + rule.dst + "'", l.number);
    scn.initial.acl[fw].push_back(rule);
  }
  // Firewalls always carry an (initially maybe empty) ACL table.
  for (const auto& [id, dev] : scn.topo.devices)
    if (dev.kind == DeviceKind::Firewall) scn.initial.acl[id];

  // [costs]
  for (const auto& l : sections["costs"]) {
    auto eq = l.text.find('=');
    if (eq == std::string::npos) throw ScenarioParseError(l.number, "expected 'key = value'");
    std::string key = trim(l.text.substr(0, eq));
    double value = parse_number(trim(l.text.substr(eq + 1)), l.number);
    if (key == "up") scn.episode.user_population_ratio = value;
    else if (key == "ap") scn.episode.attack_probability = value;
    else if (key == "max_slices") scn.episode.max_slices = static_cast<int>(value);
    else if (key == "n_attackers") scn.episode.n_attackers = static_cast<int>(value);
    else if (key == "damage_cost.harvest") scn.model.harvest_damage = value;
    else if (key.rfind("attack_cost.", 0) == 0) scn.model.attack_cost[key.substr(12)] = value;
    else if (key.rfind("damage_cost.", 0) == 0) scn.model.damage_cost[key.substr(12)] = value;
    else if (key.rfind("defense_cost.", 0) == 0) scn.model.defense_cost[key.substr(13)] = value;
    else throw ScenarioParseError(l.number, "unknown cost key '" + key + "'");
    if (value < 0 && key.find("cost") != std::string::npos)
      throw ScenarioValidationError("negative cost for '" + key + "'", l.number);
  }

  // [terminal_rewards]
  for (const auto& l : sections["terminal_rewards"]) {
    auto eq = l.text.find('=');
    if (eq == std::string::npos) throw ScenarioParseError(l.number, "expected 'key = value'");
    std::string key = trim(l.text.substr(0, eq));
    double value = parse_number(trim(l.text.substr(eq + 1)), l.number);
    auto& t = scn.model.terminal;
    if (key == "success_ar") t.success_ar = value;
    else if (key == "success_dr") t.success_dr = value;
    else if (key == "captured_ar") t.captured_ar = value;
    else if (key == "captured_dr") t.captured_dr = value;
    else if (key == "timeout_ar") t.timeout_ar = value;
    else if (key == "timeout_dr") t.timeout_dr = value;
    else throw ScenarioParseError(l.number, "unknown terminal reward '" + key + "'");
  }

  // --- validation ---
  if (scn.episode.user_population_ratio <= 0 || scn.episode.user_population_ratio > 1)
    throw ScenarioValidationError("up must be in (0, 1]");
  if (scn.episode.attack_probability < 0 || scn.episode.attack_probability > 1)
    throw ScenarioValidationError("ap must be in [0, 1]");
  if (scn.episode.max_slices < 1)
    throw ScenarioValidationError("max_slices must be >= 1");

  // Room adjacency connected from outside.
  {
    std::set<RoomId> seen{kOutsideRoom};
    std::deque<RoomId> queue{kOutsideRoom};
    while (!queue.empty()) {
      RoomId cur = queue.front();
      queue.pop_front();
      auto it = scn.topo.adjacency.find(cur);
      if (it == scn.topo.adjacency.end()) continue;
      for (const auto& next : it->second)
        if (seen.insert(next).second) queue.push_back(next);
    }
    for (const auto& room : scn.topo.rooms)
      if (!seen.count(room))
        throw ScenarioValidationError("room '" + room + "' unreachable from outside");
  }

  // Required credentials must be declared, yields that are credentials too.
  std::set<std::string> cred_ids;
  for (const auto& c : scn.credentials) cred_ids.insert(c.id);
  std::set<std::string> file_ids;
  for (const auto& [id, dev] : scn.topo.devices) {
    for (const auto& svc : dev.services) {
      if (svc.required_credential && !cred_ids.count(*svc.required_credential))
        throw ScenarioValidationError("service " + id + "." + svc.name +
                                      " requires undeclared credential '" +
                                      *svc.required_credential + "'");
      for (const auto& y : svc.yields)
        if (!cred_ids.count(y)) file_ids.insert(y);
    }
  }
  scn.files.assign(file_ids.begin(), file_ids.end());

  // Target file: the unique non-credential payload hosted on a server.
  std::vector<std::string> server_files;
  for (const auto& [id, dev] : scn.topo.devices) {
    if (dev.kind != DeviceKind::Server) continue;
    for (const auto& svc : dev.services)
      for (const auto& y : svc.yields)
        if (file_ids.count(y)) server_files.push_back(y);
  }
  if (server_files.size() != 1)
    throw ScenarioValidationError("expected exactly one file payload on a server (the target), found " +
                                  std::to_string(server_files.size()));
  scn.initial.target_file = server_files[0];

  scn.initial.actor_location["attacker"] = kOutsideRoom;
  return scn;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioParseError(0, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  auto slash = path.find_last_of('/');
  std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
  auto dot = base.find_last_of('.');
  if (dot != std::string::npos) base = base.substr(0, dot);
  return load_scenario(buf.str(), base);
}

std::vector<AclRule> candidate_acl_rules(const Scenario& scn) {
  std::vector<std::string> srcs;
  for (const auto& [id, _] : scn.topo.devices) srcs.push_back(id);
  srcs.push_back(kAnyToken);
  std::vector<AclRule> out;
  for (const auto& src : srcs) {
    for (const auto& [id, dev] : scn.topo.devices) {
      if (dev.services.empty()) continue;
      for (const auto& svc : dev.services) {
        AclRule r;
        if (src != kAnyToken) r.src = src;
        r.dst = id;
        r.service = svc.name;
        out.push_back(r);
      }
      AclRule any;
      if (src != kAnyToken) any.src = src;
      any.dst = id;
      out.push_back(any);
    }
  }
  return out;
}

std::vector<AclRule> manageable_acl_rules(const Scenario& scn) {
  std::vector<std::string> srcs;
  for (const auto& [id, dev] : scn.topo.devices)
    if (dev.kind == DeviceKind::Terminal || dev.kind == DeviceKind::SecurityDevice)
      srcs.push_back(id);
  srcs.push_back(kAnyToken);
  std::vector<AclRule> out;
  for (const auto& src : srcs) {
    for (const auto& [dst, svc] : scn.service_pairs()) {
      AclRule r;
      if (src != kAnyToken) r.src = src;
      r.dst = dst;
      r.service = svc;
      out.push_back(r);
    }
  }
  return out;
}

DefenderActionSpace build_defender_actions(const Scenario& scn) {
  DefenderActionSpace space;
  auto push = [&](GameAction a) {
    a.role = Role::Defender;
    space.actions.push_back(std::move(a));
  };
  push({});  // NoOp
  for (const auto& cred : scn.credentials) {
    GameAction a;
    a.kind = GameAction::Kind::RotateCredential;
    a.credential = cred.id;
    push(a);
  }
  for (const auto& [dev, svc] : scn.service_pairs()) {
    GameAction a;
    a.kind = GameAction::Kind::RestartService;
    a.device = dev;
    a.service = svc;
    push(a);
  }
  for (const auto& [id, _] : scn.topo.devices) {
    GameAction a;
    a.kind = GameAction::Kind::AuditDevice;
    a.device = id;
    push(a);
  }
  for (const auto& [x, y] : scn.topo.links) {
    GameAction a;
    a.kind = GameAction::Kind::CutTraffic;
    a.src = x;
    a.dst = y;
    push(a);
  }
  // Remove actions leave the firewall unnamed: the rule is stripped from
  // every firewall table carrying it.
  for (const auto& rule : manageable_acl_rules(scn)) {
    GameAction a;
    a.kind = GameAction::Kind::ModifyAcl;
    a.rule = rule;
    a.add_rule = false;
    push(a);
  }
  return space;
}

}  // namespace mdg
