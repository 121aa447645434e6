//! \file dmdeco/output.hpp
//! Output files with a JSON metadata sidecar.
#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "dmdeco/config.hpp"

namespace dmdeco
{
inline constexpr std::string_view tool_name = "dmdeco";
inline constexpr std::string_view tool_version = "1.0.0";

//! SHA-1 of "blob <size>\0" + content, as git hashes file contents
std::string git_blob_sha1(std::string_view content);

/*!
 * Metadata for one output: tool, version, model tags, the fully resolved
 * configuration (YAML text) and the content hash of the data file.
 * Nothing run-dependent (time, host, threads) is included.
 */
nlohmann::ordered_json output_metadata(ExperimentConfig const& config,
                                       std::string_view command,
                                       std::string_view data_file,
                                       std::string_view data);

//! <data>.meta.json next to a data file
std::filesystem::path metadata_path(std::filesystem::path const& data);

//! Write bytes exactly; throws InvalidInput if the file cannot be written
void write_file(std::filesystem::path const& path, std::string_view bytes);
std::string read_file(std::filesystem::path const& path);
}  // namespace dmdeco
