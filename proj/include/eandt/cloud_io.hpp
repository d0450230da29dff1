#pragma once

#include <string>

#include "eandt/types.hpp"

namespace eandt {

enum class CloudFormat { text_xyzilp, binary_native };

// Guess from extension: ".txt"/".xyz" -> text, anything else -> binary.
CloudFormat cloud_format_from_path(const std::string& path);

LabeledCloud load_cloud(const std::string& path, CloudFormat format);
void save_cloud(const LabeledCloud& cloud, const std::string& path,
                CloudFormat format);

// Format guessed from the extension.
LabeledCloud load_cloud(const std::string& path);
void save_cloud(const LabeledCloud& cloud, const std::string& path);

}  // namespace eandt
