#include "pwlcyl/sampling.hpp"

namespace pwlcyl {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double random_sign(std::mt19937_64& rng) { return uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0; }

}  // namespace

std::string_view to_string(SignRegime r) {
  return r == SignRegime::Admissible ? "admissible" : "extended";
}

PieceDraw draw_piece(SpectralType type, std::mt19937_64& rng, SignRegime regime) {
  PieceDraw p;
  p.a = random_sign(rng) * uniform(rng, 0.1, 1.0);
  p.b = uniform(rng, -1.0, 1.0);
  const double mag = uniform(rng, 0.2, 1.5);
  const double c = regime == SignRegime::Admissible ? -mag : random_sign(rng) * mag;
  switch (type) {
    case SpectralType::Sa:
      p.c = c;
      p.d = uniform(rng, 0.1, 2.0);
      break;
    case SpectralType::No:
      p.c = c;
      p.d = -c * c / 4.0 * uniform(rng, 0.1, 0.9);
      break;
    case SpectralType::Nd:
      p.c = c;
      p.d = -c * c / 4.0;
      break;
    case SpectralType::Fo:
      p.c = c;
      p.d = -c * c / 4.0 - uniform(rng, 0.1, 2.0);
      break;
    case SpectralType::Ce:
      p.c = 0.0;
      p.d = -uniform(rng, 0.2, 2.0);
      break;
    case SpectralType::D1:
      p.c = c;
      p.d = 0.0;
      break;
    case SpectralType::D2:
      p.c = 0.0;
      p.d = 0.0;
      break;
  }
  return p;
}

CanonicalParams draw_canonical(std::pair<SpectralType, SpectralType> pair, std::mt19937_64& rng,
                               SignRegime regime) {
  const PieceDraw up = draw_piece(pair.first, rng, regime);
  const PieceDraw lo = draw_piece(pair.second, rng, regime);
  CanonicalParams p;
  p.a_plus = up.a;
  p.b_plus = up.b;
  p.c_plus = up.c;
  p.d_plus = up.d;
  p.a_minus = lo.a;
  p.b_minus = lo.b;
  p.c_minus = lo.c;
  p.d_minus = lo.d;
  p.m = uniform(rng, -1.0, 1.0);
  return p;
}

FocusCanonicalParams draw_focus(std::mt19937_64& rng) {
  FocusCanonicalParams f;
  f.a_plus = random_sign(rng) * uniform(rng, 0.1, 1.0);
  f.b_plus = uniform(rng, -1.0, 1.0);
  f.a_minus = random_sign(rng) * uniform(rng, 0.1, 1.0);
  f.b_minus = uniform(rng, -1.0, 1.0);
  f.m = uniform(rng, -1.0, 1.0);
  f.T1 = random_sign(rng) * uniform(rng, 0.1, 1.0);
  f.T2 = random_sign(rng) * uniform(rng, 0.1, 1.0);
  f.D1 = f.T1 * f.T1 / 4.0 + uniform(rng, 0.1, 2.0);
  f.D2 = f.T2 * f.T2 / 4.0 + uniform(rng, 0.1, 2.0);
  f.a2 = uniform(rng, 0.2, 2.0);
  f.a1 = -uniform(rng, 0.2, 2.0);
  return f;
}

}  // namespace pwlcyl
