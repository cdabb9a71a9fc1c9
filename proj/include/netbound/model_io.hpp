#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "netbound/graph.hpp"

namespace netbound {

struct ModelParseError : std::runtime_error {
    int line;
    ModelParseError(int line_, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

/// Render a graph as structured text. Numbers are printed with 17 significant
/// digits so the round trip restores every weight bit-exactly.
std::string serialize_model(const NetworkGraph& g);

/// Parse the textual model format. Unknown fields, malformed numbers, shape
/// mismatches and invariant violations all raise ModelParseError with the
/// offending line. Every graph returned has passed NetworkGraph::validate().
NetworkGraph deserialize_model(std::string_view text);

void save_model(const std::filesystem::path& path, const NetworkGraph& g);
NetworkGraph load_model(const std::filesystem::path& path);

}  // namespace netbound
