#include "tagsight/corpus.hpp"
#include "tagsight/error.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include <cmath>

namespace tagsight {

std::string normalize_tag(std::string_view raw) {
  icu::UnicodeString text = icu::UnicodeString::fromUTF8(
      icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
  text.trim();
  if (text.length() > 0 && text.charAt(0) == u'#') {
    text.remove(0, 1);
    text.trim();
  }
  text.toLower(icu::Locale::getRoot());

  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) {
    throw std::runtime_error("ICU NFC normalizer unavailable");
  }
  icu::UnicodeString composed = nfc->normalize(text, status);
  if (U_FAILURE(status)) {
    throw RejectedTag("tag is not valid text: '" + std::string(raw) + "'");
  }
  if (composed.isEmpty()) {
    throw RejectedTag("tag is empty after normalization: '" + std::string(raw) + "'");
  }
  std::string out;
  composed.toUTF8String(out);
  return out;
}

bool valid_geotag(double lat, double lon) {
  return std::isfinite(lat) && std::isfinite(lon) && lat >= -90.0 && lat <= 90.0 &&
         lon >= -180.0 && lon <= 180.0;
}

}  // namespace tagsight
