#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "qbound/channel.hpp"
#include "qbound/coupled.hpp"
#include "qbound/dp.hpp"
#include "qbound/qgraph.hpp"

namespace qbound::io {

using nlohmann::json;

// Channel files: {"nx","ny","ns","kernel" [y][x][s], "next_state" [x][y][s],
// "input_mask" [x][s] (optional), "name", "y_labels" (optional)}.
// Nested arrays and flat row-major arrays are both accepted on input.
json to_json(const UnifilarChannel& ch);
UnifilarChannel channel_from_json(const json& j);

// Q-graph files: {"nq","ny","g" [q][y],"name"}.
json to_json(const QGraph& qg);
QGraph qgraph_from_json(const json& j);

// Policy files: {"nx","ns","nq","u" [q][s][x]}.
json to_json(const InputPolicy& u);
InputPolicy policy_from_json(const json& j);

// Histogram files: {"cells":[{"belief","count","action"?}],
// "transitions":[{"from","y","to","count"}], "cluster_tol"?, "channel"?}.
json to_json(const VisitHistogram& h);
VisitHistogram histogram_from_json(const json& j);

json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& j);

/// "builtin:trapdoor:0.5", "builtin:dec:0.3", "builtin:bec:0.2" or a file path.
UnifilarChannel load_channel(const std::string& spec);
/// "builtin:single", "builtin:bec2", "builtin:bec3", "builtin:dec3" or a file path.
/// builtin:single needs the output alphabet size.
QGraph load_qgraph(const std::string& spec, std::size_t ny);

}  // namespace qbound::io
