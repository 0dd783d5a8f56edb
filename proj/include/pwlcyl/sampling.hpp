#pragma once

// Random parameter draws with a prescribed spectral type.

#include "pwlcyl/model.hpp"
#include "pwlcyl/spectral.hpp"

#include <random>
#include <utility>

namespace pwlcyl {

/// Admissible: c < 0 on every piece that has a c (the regime where the
/// parametrizations run over v, w in (0, 1)). Extended: either sign of c.
enum class SignRegime { Admissible, Extended };

std::string_view to_string(SignRegime r);

struct PieceDraw {
  double a = 0, b = 0, c = 0, d = 0;
};

/// a in +-[0.1, 1], b in [-1, 1], |c| in [0.2, 1.5]; d depends on the type.
PieceDraw draw_piece(SpectralType type, std::mt19937_64& rng, SignRegime regime);

CanonicalParams draw_canonical(std::pair<SpectralType, SpectralType> pair, std::mt19937_64& rng,
                               SignRegime regime);

/// Focus-form parameters satisfying a2 > 0, a1 < 0, Ti^2 - 4 Di < 0, Ti != 0.
FocusCanonicalParams draw_focus(std::mt19937_64& rng);

}  // namespace pwlcyl
