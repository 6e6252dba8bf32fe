#include "diplomacy/map.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>

namespace diplomacy {

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream iss(line);
  std::vector<std::string> out;
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

}  // namespace

const std::string& unit_kind_letter(UnitKind k) {
  static const std::string a = "A", f = "F";
  return k == UnitKind::ARMY ? a : f;
}

bool Province::has_coast(const std::string& c) const {
  return std::find(coasts.begin(), coasts.end(), c) != coasts.end();
}

MapGraph MapGraph::load_string(const std::string& text) {
  std::istringstream iss(text);
  return load(iss);
}

MapGraph MapGraph::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DipError(ErrorCode::MalformedMap, "cannot open map file: " + path);
  return load(in);
}

MapGraph MapGraph::load(std::istream& in) {
  MapGraph g;
  std::string line;
  int lineno = 0;
  struct Edge {
    UnitKind kind;
    Location a, b;
    int line;
  };
  std::vector<Edge> edges;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = split_ws(line);
    if (toks.empty() || toks[0][0] == '#') continue;
    if (toks[0] == "PROVINCE") {
      if (toks.size() < 3)
        throw DipError(ErrorCode::MalformedMap,
                       "PROVINCE needs id and terrain (line " + std::to_string(lineno) + ")");
      Province p;
      p.id = toks[1];
      p.display_name = p.id;
      if (toks[2] == "LAND") p.terrain = Terrain::LAND;
      else if (toks[2] == "COAST") p.terrain = Terrain::COAST;
      else if (toks[2] == "WATER") p.terrain = Terrain::WATER;
      else throw DipError(ErrorCode::UnknownTerrain, "unknown terrain tag: " + toks[2]);
      for (size_t i = 3; i < toks.size(); ++i) {
        if (toks[i] == "SC") {
          p.is_supply_center = true;
        } else if (toks[i] == "HOME") {
          if (i + 1 >= toks.size())
            throw DipError(ErrorCode::MalformedMap, "HOME needs a power");
          auto pw = power_from_string(toks[++i]);
          if (!pw) throw DipError(ErrorCode::MalformedMap, "unknown power: " + toks[i]);
          p.home_power = *pw;
        } else if (toks[i] == "COASTS") {
          if (i + 1 >= toks.size())
            throw DipError(ErrorCode::MalformedMap, "COASTS needs a list");
          p.coasts = split_commas(toks[++i]);
        } else {
          throw DipError(ErrorCode::MalformedMap, "unknown province attribute: " + toks[i]);
        }
      }
      if (!p.coasts.empty() && p.terrain != Terrain::COAST)
        throw DipError(ErrorCode::MalformedMap, "coasts on non-COAST province " + p.id);
      if (g.provinces_.count(p.id))
        throw DipError(ErrorCode::DuplicateProvince, "duplicate province id " + p.id);
      g.provinces_.emplace(p.id, std::move(p));
    } else if (toks[0] == "EDGE") {
      if (toks.size() != 4)
        throw DipError(ErrorCode::MalformedMap,
                       "EDGE needs kind and two locations (line " + std::to_string(lineno) + ")");
      Edge e;
      if (toks[1] == "ARMY") e.kind = UnitKind::ARMY;
      else if (toks[1] == "FLEET") e.kind = UnitKind::FLEET;
      else throw DipError(ErrorCode::MalformedMap, "unknown edge kind: " + toks[1]);
      e.a = Location::parse(toks[2]);
      e.b = Location::parse(toks[3]);
      e.line = lineno;
      edges.push_back(std::move(e));
    } else {
      throw DipError(ErrorCode::MalformedMap, "unknown directive: " + toks[0]);
    }
  }
  if (g.provinces_.empty())
    throw DipError(ErrorCode::MalformedMap, "map document declares no provinces");

  auto check_loc = [&](const Location& l, UnitKind kind) {
    auto it = g.provinces_.find(l.province);
    if (it == g.provinces_.end())
      throw DipError(ErrorCode::UnknownProvince, "edge references unknown province " + l.province);
    if (!l.coast.empty() && !it->second.has_coast(l.coast))
      throw DipError(ErrorCode::UnknownCoast,
                     "province " + l.province + " has no coast " + l.coast);
    if (kind == UnitKind::ARMY && !l.coast.empty())
      throw DipError(ErrorCode::MalformedMap, "army edge with coast qualifier: " + l.str());
  };
  for (const auto& e : edges) {
    check_loc(e.a, e.kind);
    check_loc(e.b, e.kind);
    if (e.kind == UnitKind::ARMY) {
      g.army_adj_[e.a.province].insert(e.b.province);
    } else {
      g.fleet_adj_[e.a].insert(e.b);
    }
  }
  g.validate();
  return g;
}

void MapGraph::validate() const {
  for (const auto& [a, ns] : army_adj_) {
    for (const auto& b : ns) {
      auto it = army_adj_.find(b);
      if (it == army_adj_.end() || !it->second.count(a))
        throw DipError(ErrorCode::AsymmetricAdjacency,
                       "army edge " + a + "->" + b + " has no reverse");
      if (provinces_.at(a).terrain == Terrain::WATER ||
          provinces_.at(b).terrain == Terrain::WATER)
        throw DipError(ErrorCode::MalformedMap, "army edge touches water: " + a + "-" + b);
    }
  }
  for (const auto& [a, ns] : fleet_adj_) {
    const auto& pa = provinces_.at(a.province);
    if (pa.terrain == Terrain::LAND)
      throw DipError(ErrorCode::MalformedMap, "fleet edge at landlocked " + a.province);
    if (!pa.coasts.empty() && a.coast.empty())
      throw DipError(ErrorCode::MalformedMap,
                     "fleet edge at split-coast province without coast: " + a.province);
    for (const auto& b : ns) {
      auto it = fleet_adj_.find(b);
      if (it == fleet_adj_.end() || !it->second.count(a))
        throw DipError(ErrorCode::AsymmetricAdjacency,
                       "fleet edge " + a.str() + "->" + b.str() + " has no reverse");
    }
  }
}

const Province& MapGraph::province(const std::string& id) const {
  auto it = provinces_.find(id);
  if (it == provinces_.end())
    throw DipError(ErrorCode::UnknownProvince, "unknown province " + id);
  return it->second;
}

bool MapGraph::has_province(const std::string& id) const {
  return provinces_.count(id) != 0;
}

int MapGraph::supply_center_count() const {
  int n = 0;
  for (const auto& [_, p] : provinces_)
    if (p.is_supply_center) ++n;
  return n;
}

std::vector<std::string> MapGraph::supply_centers() const {
  std::vector<std::string> out;
  for (const auto& [id, p] : provinces_)
    if (p.is_supply_center) out.push_back(id);
  return out;
}

std::vector<std::string> MapGraph::home_centers(Power pw) const {
  std::vector<std::string> out;
  for (const auto& [id, p] : provinces_)
    if (p.is_supply_center && p.home_power == pw) out.push_back(id);
  return out;
}

std::vector<Location> MapGraph::fleet_nodes(const std::string& prov) const {
  const Province& p = province(prov);
  std::vector<Location> out;
  if (p.coasts.empty()) {
    Location l{prov, ""};
    if (fleet_adj_.count(l)) out.push_back(l);
  } else {
    for (const auto& c : p.coasts) {
      Location l{prov, c};
      if (fleet_adj_.count(l)) out.push_back(l);
    }
  }
  return out;
}

bool MapGraph::is_legal_location(UnitKind kind, const Location& at) const {
  auto it = provinces_.find(at.province);
  if (it == provinces_.end()) return false;
  const Province& p = it->second;
  if (kind == UnitKind::ARMY)
    return at.coast.empty() && p.terrain != Terrain::WATER;
  if (!p.coasts.empty()) return !at.coast.empty() && p.has_coast(at.coast);
  return at.coast.empty() && fleet_adj_.count(at) != 0;
}

std::set<Location> MapGraph::adjacency(UnitKind kind, const Location& at) const {
  province(at.province);  // throws on unknown id
  if (!is_legal_location(kind, at))
    throw DipError(ErrorCode::IllegalLocation,
                   (kind == UnitKind::ARMY ? std::string("army") : std::string("fleet")) +
                       " cannot stand at " + at.str());
  if (kind == UnitKind::ARMY) {
    std::set<Location> out;
    auto it = army_adj_.find(at.province);
    if (it != army_adj_.end())
      for (const auto& b : it->second) out.insert(Location{b, ""});
    return out;
  }
  auto it = fleet_adj_.find(at);
  return it == fleet_adj_.end() ? std::set<Location>{} : it->second;
}

bool MapGraph::reachable(UnitKind kind, const Location& from, const Location& to) const {
  if (!is_legal_location(kind, from)) return false;
  if (kind == UnitKind::ARMY) {
    auto it = army_adj_.find(from.province);
    return it != army_adj_.end() && it->second.count(to.province) != 0;
  }
  auto it = fleet_adj_.find(from);
  return it != fleet_adj_.end() && it->second.count(to) != 0;
}

bool MapGraph::reachable_province(UnitKind kind, const Location& from,
                                  const std::string& to_province) const {
  if (kind == UnitKind::ARMY) return reachable(kind, from, Location{to_province, ""});
  auto it = fleet_adj_.find(from);
  if (it == fleet_adj_.end()) return false;
  for (const auto& b : it->second)
    if (b.province == to_province) return true;
  return false;
}

std::optional<std::vector<std::string>> MapGraph::shortest_path(
    UnitKind kind, const Location& from, const std::string& to,
    const std::set<std::string>& blocked) const {
  province(to);  // throws on unknown id
  if (!is_legal_location(kind, from))
    throw DipError(ErrorCode::IllegalLocation, "illegal start " + from.str());
  if (from.province == to) return std::vector<std::string>{from.province};

  // BFS over Locations with sorted neighbor expansion: the first discovery of
  // each node follows the lexicographically smallest shortest path.
  std::map<Location, Location> parent;
  std::deque<Location> queue;
  parent.emplace(from, from);
  queue.push_back(from);
  std::optional<Location> goal;
  while (!queue.empty() && !goal) {
    Location cur = queue.front();
    queue.pop_front();
    std::set<Location> next;
    if (kind == UnitKind::ARMY) {
      auto it = army_adj_.find(cur.province);
      if (it != army_adj_.end())
        for (const auto& b : it->second) next.insert(Location{b, ""});
    } else {
      auto it = fleet_adj_.find(cur);
      if (it != fleet_adj_.end()) next = it->second;
    }
    for (const auto& nb : next) {
      if (parent.count(nb)) continue;
      if (nb.province != to && blocked.count(nb.province)) continue;
      parent.emplace(nb, cur);
      if (nb.province == to) {
        goal = nb;
        break;
      }
      queue.push_back(nb);
    }
  }
  if (!goal) return std::nullopt;
  std::vector<std::string> path;
  Location cur = *goal;
  while (!(cur == from)) {
    path.push_back(cur.province);
    cur = parent.at(cur);
  }
  path.push_back(from.province);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace diplomacy
