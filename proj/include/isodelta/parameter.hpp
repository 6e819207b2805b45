#pragma once

#include <string_view>

namespace isodelta {

/// Where the family parameter C sits relative to the normalizable range.
enum class ParameterClass {
    Normalizable,  // C > 0 or C < -1
    Pursey,        // C = 0
    AbrahamMoses,  // C = -1
    ForbiddenBand  // -1 < C < 0
};

/// Band of C values for which the attractive-delta family has a pole.
/// PositiveSideBand: pole on the positive half-line, C in (-1, -1/2].
/// NegativeSideBand: pole only on the negative half-line, C in (-1/2, 0).
enum class SingularBand { None, PositiveSideBand, NegativeSideBand };

constexpr std::string_view to_string(ParameterClass c) noexcept {
    switch (c) {
        case ParameterClass::Normalizable: return "Normalizable";
        case ParameterClass::Pursey: return "Pursey";
        case ParameterClass::AbrahamMoses: return "AbrahamMoses";
        case ParameterClass::ForbiddenBand: return "ForbiddenBand";
    }
    return "?";
}

constexpr std::string_view to_string(SingularBand b) noexcept {
    switch (b) {
        case SingularBand::None: return "None";
        case SingularBand::PositiveSideBand: return "PositiveSideBand";
        case SingularBand::NegativeSideBand: return "NegativeSideBand";
    }
    return "?";
}

constexpr ParameterClass classify_constant(double C) noexcept {
    if (C == 0.0) return ParameterClass::Pursey;
    if (C == -1.0) return ParameterClass::AbrahamMoses;
    if (C > -1.0 && C < 0.0) return ParameterClass::ForbiddenBand;
    return ParameterClass::Normalizable;
}

/// The band depends only on C because g < 0 for the attractive delta.
constexpr SingularBand singular_band(double C) noexcept {
    if (C > -1.0 && C <= -0.5) return SingularBand::PositiveSideBand;
    if (C > -0.5 && C < 0.0) return SingularBand::NegativeSideBand;
    return SingularBand::None;
}

/// Family parameter with its classification. Build through IsoParameter::of.
struct IsoParameter {
    double C{};
    ParameterClass classification{ParameterClass::Normalizable};
    SingularBand band{SingularBand::None};

    static constexpr IsoParameter of(double C) noexcept {
        return {C, classify_constant(C), singular_band(C)};
    }

    constexpr bool normalizable() const noexcept {
        return classification == ParameterClass::Normalizable;
    }
};

}  // namespace isodelta
