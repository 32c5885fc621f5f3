#include "yardloc/instance_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "yardloc/itinerary.hpp"
#include "yardloc/validate.hpp"

namespace yardloc {

using json = nlohmann::ordered_json;

namespace {

constexpr const char* kFormatTag = "yardloc-instance-v1";

double require_number(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key))
    throw ParseError(where + ": missing field '" + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number())
    throw ParseError(where + ": field '" + key + "' is not a number");
  return v.get<double>();
}

int require_int(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key))
    throw ParseError(where + ": missing field '" + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number_integer())
    throw ParseError(where + ": field '" + key + "' is not an integer");
  return v.get<int>();
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key) || !obj.at(key).is_string())
    throw ParseError(where + ": missing string field '" + key + "'");
  return obj.at(key).get<std::string>();
}

bool get_flag(const json& obj, const char* key) {
  return obj.contains(key) && obj.at(key).is_boolean() && obj.at(key).get<bool>();
}

void require_known_node(const Instance& inst, const NodeId& id, const std::string& where) {
  if (inst.index_of(id) < 0)
    throw ParseError(where + ": unknown node '" + id + "'");
}

}  // namespace

Instance parse_instance(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("syntax error at byte ") + std::to_string(e.byte) + ": " +
                     e.what());
  }
  if (!doc.is_object()) throw ParseError("top level must be an object");
  if (doc.contains("format") && doc.at("format") != kFormatTag)
    throw ParseError("unsupported format tag");
  if (!doc.contains("nodes") || !doc.at("nodes").is_array())
    throw ParseError("missing 'nodes' section");
  if (!doc.contains("demands") || !doc.at("demands").is_array())
    throw ParseError("missing 'demands' section");
  if (!doc.contains("economics") || !doc.at("economics").is_object())
    throw ParseError("missing 'economics' section");

  Instance inst;
  std::set<NodeId> seen;
  for (const auto& jn : doc.at("nodes")) {
    Node n;
    n.id = require_string(jn, "id", "node");
    const std::string where = "node '" + n.id + "'";
    if (n.id.empty()) throw ParseError("node: empty id");
    if (!seen.insert(n.id).second) throw ParseError("duplicate node id '" + n.id + "'");
    n.is_original_yard = get_flag(jn, "original");
    n.is_potential = get_flag(jn, "potential");
    if (jn.contains("attrs")) {
      const json& a = jn.at("attrs");
      n.attrs.accumulation_param = require_number(a, "c", where);
      n.attrs.capacity_total = require_number(a, "cap_total", where);
      n.attrs.capacity_local = require_number(a, "cap_local", where);
      n.attrs.tracks_total = require_int(a, "tracks_total", where);
      n.attrs.tracks_local = require_int(a, "tracks_local", where);
      n.attrs.reclass_cost = require_number(a, "tau", where);
    }
    if (jn.contains("plans")) {
      if (!jn.at("plans").is_array()) throw ParseError(where + ": 'plans' must be a list");
      for (const auto& jp : jn.at("plans")) {
        InvestmentPlan p;
        p.cost = require_number(jp, "cost", where);
        p.lifetime_years = require_int(jp, "lifetime", where);
        p.reclass_cost_after = require_number(jp, "tau_after", where);
        p.capacity_gain = require_number(jp, "cap_gain", where);
        p.tracks_gain = require_int(jp, "tracks_gain", where);
        n.plans.push_back(p);
      }
    }
    inst.nodes.push_back(std::move(n));
  }
  inst.finalize();

  if (doc.contains("edges")) {
    for (const auto& je : doc.at("edges")) {
      PhysicalEdge e;
      e.a = require_string(je, "a", "edge");
      e.b = require_string(je, "b", "edge");
      e.length = require_number(je, "length", "edge " + e.a + "-" + e.b);
      require_known_node(inst, e.a, "edge");
      require_known_node(inst, e.b, "edge");
      inst.edges.push_back(std::move(e));
    }
  }

  if (doc.contains("itineraries")) {
    for (const auto& ji : doc.at("itineraries")) {
      NodeId from = require_string(ji, "from", "itinerary");
      NodeId to = require_string(ji, "to", "itinerary");
      const std::string where = "itinerary " + from + "->" + to;
      require_known_node(inst, from, where);
      require_known_node(inst, to, where);
      std::vector<NodeId> via;
      if (ji.contains("via")) {
        if (!ji.at("via").is_array()) throw ParseError(where + ": 'via' must be a list");
        for (const auto& jv : ji.at("via")) {
          if (!jv.is_string()) throw ParseError(where + ": via entries must be node ids");
          NodeId k = jv.get<NodeId>();
          require_known_node(inst, k, where);
          via.push_back(std::move(k));
        }
      }
      if (!inst.itineraries.emplace(ItineraryKey{from, to}, std::move(via)).second)
        throw ParseError(where + ": duplicate itinerary");
    }
  }

  for (const auto& jd : doc.at("demands")) {
    Demand d;
    d.origin = require_string(jd, "from", "demand");
    d.destination = require_string(jd, "to", "demand");
    const std::string where = "demand " + d.origin + "->" + d.destination;
    d.volume = require_number(jd, "volume", where);
    require_known_node(inst, d.origin, where);
    require_known_node(inst, d.destination, where);
    inst.demands.push_back(std::move(d));
  }

  const json& je = doc.at("economics");
  EconomicParams& ec = inst.economics;
  ec.budget = require_number(je, "budget", "economics");
  ec.discount_rate = require_number(je, "discount_rate", "economics");
  ec.car_hour_value = require_number(je, "car_hour_value", "economics");
  ec.day_count = je.contains("day_count") ? require_int(je, "day_count", "economics") : 365;
  ec.train_size_default = require_number(je, "train_size_default", "economics");
  if (je.contains("train_size_overrides")) {
    for (const auto& jo : je.at("train_size_overrides")) {
      NodeId from = require_string(jo, "from", "train_size_override");
      NodeId to = require_string(jo, "to", "train_size_override");
      require_known_node(inst, from, "train_size_override");
      require_known_node(inst, to, "train_size_override");
      ec.train_size_overrides[{from, to}] =
          require_number(jo, "size", "train_size_override " + from + "->" + to);
    }
  }
  if (je.contains("track_fn")) {
    const json& jt = je.at("track_fn");
    std::string kind = require_string(jt, "kind", "track_fn");
    if (kind == "linear") {
      ec.track_fn.kind = TrackFn::Kind::Linear;
    } else if (kind == "step") {
      ec.track_fn.kind = TrackFn::Kind::Step;
      if (jt.contains("thresholds")) {
        for (const auto& jv : jt.at("thresholds")) {
          if (!jv.is_number()) throw ParseError("track_fn: thresholds must be numbers");
          ec.track_fn.thresholds.push_back(jv.get<double>());
        }
      }
    } else {
      throw ParseError("track_fn: unknown kind '" + kind + "'");
    }
  }

  return inst;
}

std::string serialize_instance(const Instance& inst) {
  json doc;
  doc["format"] = kFormatTag;

  json nodes = json::array();
  for (const auto& n : inst.nodes) {
    json jn;
    jn["id"] = n.id;
    jn["original"] = n.is_original_yard;
    jn["potential"] = n.is_potential;
    jn["attrs"] = {{"c", n.attrs.accumulation_param},
                   {"cap_total", n.attrs.capacity_total},
                   {"cap_local", n.attrs.capacity_local},
                   {"tracks_total", n.attrs.tracks_total},
                   {"tracks_local", n.attrs.tracks_local},
                   {"tau", n.attrs.reclass_cost}};
    json plans = json::array();
    for (const auto& p : n.plans) {
      plans.push_back({{"cost", p.cost},
                       {"lifetime", p.lifetime_years},
                       {"tau_after", p.reclass_cost_after},
                       {"cap_gain", p.capacity_gain},
                       {"tracks_gain", p.tracks_gain}});
    }
    jn["plans"] = std::move(plans);
    nodes.push_back(std::move(jn));
  }
  doc["nodes"] = std::move(nodes);

  if (!inst.edges.empty()) {
    json edges = json::array();
    for (const auto& e : inst.edges)
      edges.push_back({{"a", e.a}, {"b", e.b}, {"length", e.length}});
    doc["edges"] = std::move(edges);
  }

  if (!inst.itineraries.empty()) {
    json its = json::array();
    for (const auto& [key, via] : inst.itineraries) {
      json ji;
      ji["from"] = key.first;
      ji["to"] = key.second;
      ji["via"] = via;
      its.push_back(std::move(ji));
    }
    doc["itineraries"] = std::move(its);
  }

  json demands = json::array();
  for (const auto& d : inst.demands)
    demands.push_back({{"from", d.origin}, {"to", d.destination}, {"volume", d.volume}});
  doc["demands"] = std::move(demands);

  const EconomicParams& ec = inst.economics;
  json je;
  je["budget"] = ec.budget;
  je["discount_rate"] = ec.discount_rate;
  je["car_hour_value"] = ec.car_hour_value;
  je["day_count"] = ec.day_count;
  je["train_size_default"] = ec.train_size_default;
  if (!ec.train_size_overrides.empty()) {
    json ovr = json::array();
    for (const auto& [key, size] : ec.train_size_overrides)
      ovr.push_back({{"from", key.first}, {"to", key.second}, {"size", size}});
    je["train_size_overrides"] = std::move(ovr);
  }
  json jt;
  jt["kind"] = ec.track_fn.kind == TrackFn::Kind::Linear ? "linear" : "step";
  if (ec.track_fn.kind == TrackFn::Kind::Step) jt["thresholds"] = ec.track_fn.thresholds;
  je["track_fn"] = std::move(jt);
  doc["economics"] = std::move(je);

  return doc.dump(2) + "\n";
}

Instance read_instance_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str());
}

void write_instance_file(const Instance& inst, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << serialize_instance(inst);
}

Instance load_instance(const std::string& text) {
  Instance inst = parse_instance(text);
  ValidationReport report = validate_instance(inst);
  if (!report.ok()) {
    const Violation& v = report.violations.front();
    throw ParseError("invalid instance: [" + v.rule + "] " + v.location + ": " + v.detail);
  }
  if (!inst.edges.empty()) derive_itineraries(inst);
  return inst;
}

Instance load_instance_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_instance(ss.str());
}

}  // namespace yardloc
