#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "collasprite/png_io.hpp"
#include "collasprite/sprite.hpp"
#include "collasprite/sprite_ops.hpp"

namespace collasprite {

namespace fs = std::filesystem;

// On-disk layout: <root>/<character-id>/<pose>.png, pose in
// {back,left,front,right}. Characters iterate in lexicographic id order.

using WarnFn = std::function<void(const std::string&)>;

inline void warn_to_stderr(const std::string& msg) {
  std::cerr << "warning: " << msg << "\n";
}

inline Dataset load_dataset(const fs::path& root, const std::string& split_tag = "train",
                            const WarnFn& warn = warn_to_stderr) {
  require(fs::exists(root), "dataset root does not exist: ", root.string());
  require(fs::is_directory(root), "dataset root is not a directory: ", root.string());

  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory()) ids.push_back(entry.path().filename().string());
  std::sort(ids.begin(), ids.end());

  std::vector<CharacterSheet> sheets;
  sheets.reserve(ids.size());
  for (const auto& id : ids) {
    CharacterSheet sheet;
    sheet.id = id;
    bool complete = true;
    for (DomainId d : all_domains()) {
      fs::path file = root / id / (std::string(domain_name(d)) + ".png");
      if (!fs::exists(file)) {
        warn(concat("skipping character '", id, "': missing pose file ", file.string()));
        complete = false;
        break;
      }
      sheet.pose(d) = pad_and_alpha(read_png(file));
    }
    if (complete) sheets.push_back(std::move(sheet));
  }
  return Dataset(std::move(sheets), split_tag);
}

inline void save_dataset(const fs::path& root, const Dataset& dataset) {
  fs::create_directories(root);
  for (const auto& sheet : dataset.sheets()) {
    fs::path dir = root / sheet.id;
    fs::create_directories(dir);
    for (DomainId d : all_domains())
      write_png(dir / (std::string(domain_name(d)) + ".png"), sheet.pose(d).image());
  }
}

// Plain-text index: one "<id>\t<split>" line per character.
inline void write_manifest(const fs::path& path,
                           const std::vector<std::pair<std::string, std::string>>& entries) {
  std::ofstream out(path);
  require(out.good(), "cannot write manifest: ", path.string());
  out << "# character-id\tsplit\n";
  for (const auto& [id, tag] : entries) out << id << "\t" << tag << "\n";
  require(out.good(), "failed writing manifest: ", path.string());
}

inline std::vector<std::pair<std::string, std::string>> read_manifest(const fs::path& path) {
  std::ifstream in(path);
  require(in.good(), "cannot read manifest: ", path.string());
  std::vector<std::pair<std::string, std::string>> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto tab = line.find('\t');
    require(tab != std::string::npos, "malformed manifest line: ", line);
    entries.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return entries;
}

inline void write_dataset_manifest(const fs::path& path, const Dataset& dataset) {
  std::vector<std::pair<std::string, std::string>> entries;
  entries.reserve(dataset.size());
  for (const auto& sheet : dataset.sheets())
    entries.emplace_back(sheet.id, dataset.split_tag());
  write_manifest(path, entries);
}

}  // namespace collasprite
