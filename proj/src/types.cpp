#include "morphlex/types.hpp"

#include "morphlex/errors.hpp"
#include "morphlex/unicode.hpp"

namespace morphlex {

void AlphabetConfig::validate() const {
    if (min_length < 1) throw ConfigError("min_length must be >= 1");
    if (min_length > max_length) throw ConfigError("min_length must not exceed max_length");
    for (char32_t c : whitelist) {
        if (!valid_chars.count(c)) {
            throw ConfigError("whitelist character '" + uni::encode_utf8(c) + "' is not in the alphabet");
        }
    }
}

void PipelineConfig::validate() const {
    alphabet.validate();
    if (support_m < 0) throw ConfigError("support_m must be >= 0");
    if (epsilon < 0.0) throw ConfigError("epsilon must be >= 0");
    if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
    if (otsu_bins < 2) throw ConfigError("otsu_bins must be >= 2");
}

} // namespace morphlex
