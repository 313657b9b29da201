#include "tagsight/continent.hpp"
#include "tagsight/error.hpp"

#include <cctype>
#include <string>

namespace tagsight {

std::string_view to_string(Continent c) {
  switch (c) {
    case Continent::africa: return "Africa";
    case Continent::asia: return "Asia";
    case Continent::australia: return "Australia";
    case Continent::europe: return "Europe";
    case Continent::north_america: return "N. America";
    case Continent::south_america: return "S. America";
    case Continent::antarctica: return "Antarctica";
  }
  return "?";
}

Continent parse_continent(std::string_view text) {
  std::string key;
  for (char ch : text) {
    if (std::isalpha(static_cast<unsigned char>(ch))) {
      key += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    }
  }
  if (key == "africa") return Continent::africa;
  if (key == "asia") return Continent::asia;
  if (key == "australia" || key == "oceania") return Continent::australia;
  if (key == "europe") return Continent::europe;
  if (key == "namerica" || key == "northamerica") return Continent::north_america;
  if (key == "samerica" || key == "southamerica") return Continent::south_america;
  if (key == "antarctica") return Continent::antarctica;
  throw ValidationError("unknown continent '" + std::string(text) + "'");
}

}  // namespace tagsight
