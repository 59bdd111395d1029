#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "json.hpp"
#include "monoembed/corpus_io.hpp"
#include "monoembed/hashing.hpp"

namespace monoembed {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kManifestFormat = "monoembed-manifest-v1";

/// Provenance record written next to every command output. Contains no
/// timestamps or host details, so identical inputs give an identical manifest.
struct RunManifest {
  std::string command;
  ojson config = ojson::object();
  std::map<std::string, std::uint64_t> seeds;
  std::map<std::string, std::string> input_hashes;
  std::map<std::string, std::string> output_hashes;

  void add_input(const std::filesystem::path& p) {
    input_hashes[p.generic_string()] = std::filesystem::is_directory(p) ? sha256_tree(p) : sha256_file(p);
  }
  void add_output(const std::filesystem::path& p) { output_hashes[p.generic_string()] = sha256_file(p); }

  ojson to_json() const {
    ojson j;
    j["format"] = kManifestFormat;
    j["command"] = command;
    j["config"] = config;
    j["seeds"] = seeds;
    j["input_hashes"] = input_hashes;
    j["output_hashes"] = output_hashes;
    j["tool_version"] = kToolVersion;
    return j;
  }

  void save(const std::filesystem::path& p) const {
    auto out = detail::open_out(p);
    out << to_json().dump(1) << '\n';
  }
};

/// Default manifest location for an output file: <output>.manifest.json.
inline std::filesystem::path manifest_path_for(const std::filesystem::path& output) {
  return output.string() + ".manifest.json";
}

}  // namespace monoembed
