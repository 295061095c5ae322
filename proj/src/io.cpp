#include "qbound/io.hpp"

#include <fstream>

#include "qbound/error.hpp"

namespace qbound::io {
namespace {

void flatten(const json& j, std::vector<json>& out) {
  if (j.is_array())
    for (const auto& e : j) flatten(e, out);
  else
    out.push_back(j);
}

template <class T>
std::vector<T> flat_array(const json& j, const char* key, std::size_t expected) {
  if (!j.contains(key)) throw Error(ErrorCode::io, std::string("missing field \"") + key + "\"");
  std::vector<json> leaves;
  flatten(j.at(key), leaves);
  if (leaves.size() != expected)
    throw Error(ErrorCode::io, std::string("field \"") + key + "\" has " + std::to_string(leaves.size()) +
                                   " entries, expected " + std::to_string(expected));
  std::vector<T> out;
  out.reserve(leaves.size());
  for (const auto& v : leaves) {
    if constexpr (std::is_same_v<T, bool>) {
      if (v.is_boolean())
        out.push_back(v.get<bool>());
      else if (v.is_number())
        out.push_back(v.get<double>() != 0.0);
      else
        throw Error(ErrorCode::io, std::string("field \"") + key + "\" must hold booleans");
    } else if constexpr (std::is_same_v<T, std::size_t>) {
      if (!v.is_number_integer() || v.get<long long>() < 0)
        throw Error(ErrorCode::io, std::string("field \"") + key + "\" must hold non-negative integers");
      out.push_back(v.get<std::size_t>());
    } else {
      if (!v.is_number()) throw Error(ErrorCode::io, std::string("field \"") + key + "\" must hold numbers");
      out.push_back(v.get<T>());
    }
  }
  return out;
}

std::size_t size_field(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number_integer() || j.at(key).get<long long>() <= 0)
    throw Error(ErrorCode::io, std::string("field \"") + key + "\" must be a positive integer");
  return j.at(key).get<std::size_t>();
}

template <class T>
json nest3(const std::vector<T>& flat, std::size_t a, std::size_t b, std::size_t c) {
  json out = json::array();
  for (std::size_t i = 0; i < a; ++i) {
    json mid = json::array();
    for (std::size_t k = 0; k < b; ++k) {
      json row = json::array();
      for (std::size_t l = 0; l < c; ++l) row.push_back(static_cast<T>(flat[(i * b + k) * c + l]));
      mid.push_back(row);
    }
    out.push_back(mid);
  }
  return out;
}

double parse_param(const std::string& text, const std::string& spec) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorCode::invalid_argument, "bad parameter in \"" + spec + "\"");
  }
}

}  // namespace

json to_json(const UnifilarChannel& ch) {
  json j;
  j["nx"] = ch.nx();
  j["ny"] = ch.ny();
  j["ns"] = ch.ns();
  j["kernel"] = nest3(ch.kernel(), ch.ny(), ch.nx(), ch.ns());
  j["next_state"] = nest3(ch.next_state(), ch.nx(), ch.ny(), ch.ns());
  if (ch.has_mask()) {
    json m = json::array();
    for (std::size_t x = 0; x < ch.nx(); ++x) {
      json row = json::array();
      for (std::size_t s = 0; s < ch.ns(); ++s) row.push_back(static_cast<bool>(ch.allowed(x, s)));
      m.push_back(row);
    }
    j["input_mask"] = m;
  }
  j["name"] = ch.name();
  if (!ch.y_labels().empty()) j["y_labels"] = ch.y_labels();
  return j;
}

UnifilarChannel channel_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::io, "channel file must hold a JSON object");
  const auto nx = size_field(j, "nx"), ny = size_field(j, "ny"), ns = size_field(j, "ns");
  auto kernel = flat_array<double>(j, "kernel", ny * nx * ns);
  auto next = flat_array<std::size_t>(j, "next_state", nx * ny * ns);
  std::vector<bool> mask;
  if (j.contains("input_mask") && !j.at("input_mask").is_null()) mask = flat_array<bool>(j, "input_mask", nx * ns);
  std::vector<std::string> labels;
  if (j.contains("y_labels")) {
    for (const auto& l : j.at("y_labels")) labels.push_back(l.is_string() ? l.get<std::string>() : l.dump());
    if (labels.size() != ny) throw Error(ErrorCode::io, "y_labels must have ny entries");
  }
  UnifilarChannel ch(nx, ny, ns, std::move(kernel), std::move(next), std::move(mask), j.value("name", ""),
                     std::move(labels));
  require_valid(ch);
  return ch;
}

json to_json(const QGraph& qg) {
  json g = json::array();
  for (std::size_t q = 0; q < qg.nq(); ++q) {
    json row = json::array();
    for (std::size_t y = 0; y < qg.ny(); ++y) row.push_back(qg.next(q, y));
    g.push_back(row);
  }
  return {{"nq", qg.nq()}, {"ny", qg.ny()}, {"g", g}, {"name", qg.name()}};
}

QGraph qgraph_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::io, "Q-graph file must hold a JSON object");
  const auto nq = size_field(j, "nq"), ny = size_field(j, "ny");
  return QGraph(nq, ny, flat_array<std::size_t>(j, "g", nq * ny), j.value("name", ""));
}

json to_json(const InputPolicy& u) {
  return {{"nx", u.nx()}, {"ns", u.ns()}, {"nq", u.nq()}, {"u", nest3(u.data(), u.nq(), u.ns(), u.nx())}};
}

InputPolicy policy_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::io, "policy file must hold a JSON object");
  const auto nx = size_field(j, "nx"), ns = size_field(j, "ns"), nq = size_field(j, "nq");
  auto flat = flat_array<double>(j, "u", nq * ns * nx);
  InputPolicy u(nx, ns, nq);
  for (std::size_t q = 0; q < nq; ++q)
    for (std::size_t s = 0; s < ns; ++s)
      for (std::size_t x = 0; x < nx; ++x) u(x, s, q) = flat[(q * ns + s) * nx + x];
  return u;
}

json to_json(const VisitHistogram& h) {
  json cells = json::array();
  for (const auto& c : h.cells) {
    json e = {{"belief", c.belief}, {"count", c.count}};
    if (!c.action.empty()) e["action"] = c.action;
    cells.push_back(e);
  }
  json trans = json::array();
  for (const auto& t : h.transitions) trans.push_back({{"from", t.from}, {"y", t.y}, {"to", t.to}, {"count", t.count}});
  json j = {{"cells", cells}, {"transitions", trans}, {"cluster_tol", h.cluster_tol}};
  if (h.channel) j["channel"] = to_json(*h.channel);
  return j;
}

VisitHistogram histogram_from_json(const json& j) {
  if (!j.is_object() || !j.contains("cells") || !j.contains("transitions"))
    throw Error(ErrorCode::io, "histogram needs \"cells\" and \"transitions\"");
  VisitHistogram h;
  try {
    for (const auto& c : j.at("cells")) {
      VisitCell cell;
      cell.belief = c.at("belief").get<std::vector<double>>();
      cell.count = c.at("count").get<std::size_t>();
      if (c.contains("action")) cell.action = c.at("action").get<std::vector<double>>();
      h.cells.push_back(std::move(cell));
    }
    for (const auto& t : j.at("transitions"))
      h.transitions.push_back({t.at("from").get<std::size_t>(), t.at("y").get<std::size_t>(),
                               t.at("to").get<std::size_t>(), t.at("count").get<std::size_t>()});
  } catch (const json::exception& e) {
    throw Error(ErrorCode::io, std::string("malformed histogram: ") + e.what());
  }
  h.cluster_tol = j.value("cluster_tol", 1e-3);
  if (j.contains("channel")) h.channel = channel_from_json(j.at("channel"));
  return h;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::io, path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

UnifilarChannel load_channel(const std::string& spec) {
  if (spec.rfind("builtin:", 0) != 0) return channel_from_json(read_json(spec));
  const std::string rest = spec.substr(8);
  const auto colon = rest.find(':');
  const std::string kind = rest.substr(0, colon);
  if (colon == std::string::npos) throw Error(ErrorCode::invalid_argument, "builtin channel needs a parameter: " + spec);
  const double v = parse_param(rest.substr(colon + 1), spec);
  if (kind == "trapdoor") return builtin_trapdoor(v);
  if (kind == "dec") return builtin_dec(v);
  if (kind == "bec" || kind == "bec_no11") return builtin_bec_no11(v);
  throw Error(ErrorCode::invalid_argument, "unknown builtin channel: " + spec);
}

QGraph load_qgraph(const std::string& spec, std::size_t ny) {
  if (spec.rfind("builtin:", 0) != 0) return qgraph_from_json(read_json(spec));
  const std::string kind = spec.substr(8);
  if (kind == "single") return builtin_single(ny);
  if (kind == "bec2") return builtin_bec2();
  if (kind == "bec3") return builtin_bec3();
  if (kind == "dec3") return builtin_dec3();
  throw Error(ErrorCode::invalid_argument, "unknown builtin Q-graph: " + spec);
}

}  // namespace qbound::io
