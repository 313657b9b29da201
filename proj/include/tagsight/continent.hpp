#pragma once

#include <array>
#include <string_view>

namespace tagsight {

enum class Continent { africa, asia, australia, europe, north_america, south_america, antarctica };

inline constexpr std::array<Continent, 7> kContinents = {
    Continent::africa,        Continent::asia,          Continent::australia, Continent::europe,
    Continent::north_america, Continent::south_america, Continent::antarctica};

// Display names: "Africa", ..., "N. America", "S. America", "Antarctica".
std::string_view to_string(Continent c);

// Accepts display names and loose spellings ("N.America", "north_america").
// Throws ValidationError for anything else.
Continent parse_continent(std::string_view text);

}  // namespace tagsight
