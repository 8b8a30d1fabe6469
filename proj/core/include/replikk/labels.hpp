#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

namespace replikk {

enum class sentiment_label { pos, neg, neut, mix };

// Canonical label order. Every iteration over classes (reply generation,
// tie-breaking, report rows) uses this order.
inline constexpr std::array<sentiment_label, 4> canonical_labels = {
    sentiment_label::pos,
    sentiment_label::neg,
    sentiment_label::neut,
    sentiment_label::mix,
};

inline constexpr std::array<sentiment_label, 2> binary_labels = {
    sentiment_label::pos,
    sentiment_label::neg,
};

std::string_view to_string(sentiment_label label);
sentiment_label parse_label(std::string_view text);

// Optional per-sentence annotation strength. Stored and round-tripped but
// never consumed by any computation.
enum class intensity_level { slight, standard, strong };

std::string_view to_string(intensity_level level);
intensity_level parse_intensity(std::string_view text);

// Grammatical gender of the noun a prompt asks about. Drives which surface
// form of the class adjectives a reply uses.
enum class grammatical_gender { masculine, neuter };

std::string_view to_string(grammatical_gender gender);
grammatical_gender parse_gender(std::string_view text);

} // namespace replikk
