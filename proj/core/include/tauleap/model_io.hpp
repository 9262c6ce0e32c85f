#pragma once

#include <filesystem>
#include <string>

#include "tauleap/model.hpp"

namespace tauleap {

struct Model {
  ReactionNetwork network;
  Observable observable;
};

/// Parses a model document (JSON). Throws ConfigError with line or field context.
Model parse_model(const std::string& text);

/// Serialises a model so that parse_model(format_model(m)) == m.
std::string format_model(const Model& model);

/// Reads, parses and validates a model file; validation failures are thrown
/// as ConfigError listing every violation.
Model load_model(const std::filesystem::path& path);

void save_model(const std::filesystem::path& path, const Model& model);

}  // namespace tauleap
