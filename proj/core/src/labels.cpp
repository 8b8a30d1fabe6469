#include "replikk/labels.hpp"

#include "replikk/errors.hpp"

namespace replikk {

std::string_view to_string(sentiment_label label) {
    switch (label) {
        case sentiment_label::pos: return "pos";
        case sentiment_label::neg: return "neg";
        case sentiment_label::neut: return "neut";
        case sentiment_label::mix: return "mix";
    }
    throw data_error("invalid sentiment_label value");
}

sentiment_label parse_label(std::string_view text) {
    if (text == "pos") return sentiment_label::pos;
    if (text == "neg") return sentiment_label::neg;
    if (text == "neut") return sentiment_label::neut;
    if (text == "mix") return sentiment_label::mix;
    throw data_error("unknown label '" + std::string(text) +
                     "' (expected pos, neg, neut or mix)");
}

std::string_view to_string(intensity_level level) {
    switch (level) {
        case intensity_level::slight: return "slight";
        case intensity_level::standard: return "standard";
        case intensity_level::strong: return "strong";
    }
    throw data_error("invalid intensity_level value");
}

intensity_level parse_intensity(std::string_view text) {
    if (text == "slight") return intensity_level::slight;
    if (text == "standard") return intensity_level::standard;
    if (text == "strong") return intensity_level::strong;
    throw data_error("unknown intensity '" + std::string(text) +
                     "' (expected slight, standard or strong)");
}

std::string_view to_string(grammatical_gender gender) {
    switch (gender) {
        case grammatical_gender::masculine: return "masculine";
        case grammatical_gender::neuter: return "neuter";
    }
    throw data_error("invalid grammatical_gender value");
}

grammatical_gender parse_gender(std::string_view text) {
    if (text == "masculine") return grammatical_gender::masculine;
    if (text == "neuter") return grammatical_gender::neuter;
    throw config_error("unknown gender '" + std::string(text) +
                       "' (expected masculine or neuter)");
}

} // namespace replikk
