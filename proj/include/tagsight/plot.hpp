#pragma once

#include "tagsight/corr.hpp"
#include "tagsight/geo.hpp"
#include "tagsight/visualness.hpp"

#include <string>

namespace tagsight::plot {

// Balanced accuracy of every ranked tag, best first, coloured by category.
std::string visualness_svg(const VisualnessReport& report);

// Country outlines with one dot per geotagged post, green when resolved.
std::string geo_scatter_svg(const CountryAtlas& atlas, const GeoStats& stats);

// Diverging red/blue grid; undefined cells are grey.
std::string correlation_heatmap_svg(const CorrelationMatrix& m);

}  // namespace tagsight::plot
