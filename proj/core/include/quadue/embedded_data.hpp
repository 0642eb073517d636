#pragma once

#include <string_view>
#include <vector>

namespace quadue::data {

struct EmbeddedFile {
  std::string_view path;  // relative to core/data
  std::string_view text;
};

// Every shipped data file, sorted by path.
const std::vector<EmbeddedFile>& files();

}  // namespace quadue::data
