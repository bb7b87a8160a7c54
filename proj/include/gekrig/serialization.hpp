#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "gekrig/models.hpp"

namespace gekrig {

inline constexpr int kModelFormatVersion = 1;

/// Versioned JSON document holding everything predict() needs. Reloading
/// refactorizes R at the stored nugget, so predictions are bit-identical.
std::string model_to_json(const FittedSurrogate& model);
FittedSurrogate model_from_json(std::string_view text);

void save_model(const FittedSurrogate& model, const std::filesystem::path& path);
FittedSurrogate load_model(const std::filesystem::path& path);

}  // namespace gekrig
