#pragma once

#include <map>
#include <string>
#include <vector>

#include "hflat/caustic.hpp"
#include "hflat/frontdata.hpp"

namespace hflat {

// Scene description: everything needed to rebuild a front, serializable to
// JSON.  Expression strings use the library grammar; `w` is bound to
// sqrt(hyperelliptic) when a hyperelliptic relation is declared.
struct SceneSpec {
    std::string name;
    std::map<std::string, cplx> constants;
    std::string route;  // "gauss-pair" | "g-omega" | "omega-theta"
    std::string G, Gstar, omega, theta, xi;
    std::string hyperelliptic;  // P(z) with w^2 = P, or empty
    cplx c{1.0, 0.0};
    cplx basepoint{0.0, 0.0};
    std::vector<Puncture> punctures;
    std::vector<cplx> umbilics;
    std::vector<cplx> extra_avoid;
    int euler = 2;              // Euler number of the compactified surface
    double deg_G = 0.0, deg_Gstar = 0.0;  // declared degrees (0 = none)
    Window window;
    double clearance = 1e-3;
    double tau_radius = 0.0;    // z -> -z deck symmetry, realized at |z| = r
    bool totally_umbilic = false;
};

std::vector<std::string> catalog_names();

// Built-in parameterized scenes.  Recognized params depend on the name:
//   horosphere                ()
//   cylinder                  (c)
//   snowman                   (c, k)
//   hourglass                 (alpha, k)
//   peach                     (b_re, b_im, c_re)
//   fournoid-genus-k          (k, c)
//   pfront-3end               (b)           [c = sqrt(2)]
//   genus2-10end              ()
//   dihedral-caustic          ()
//   uend-model                (m, a0, am)
//   eend-model                (m, k, am, l, al)
SceneSpec builtin(const std::string& name,
                  const std::map<std::string, double>& params = {});

// Parameter-range validation (root clustering for the hyperelliptic
// families, degeneracy guards for the rotational ones).
void validate_spec(const SceneSpec& spec);

FrontData build_front(const SceneSpec& spec);

// The z -> -z deck path at |z| = tau_radius (counterclockwise upper arc).
Contour tau_path(const SceneSpec& spec);

std::string spec_to_json(const SceneSpec& spec);
SceneSpec spec_from_json(const std::string& text);

// Count the preimages of a value under the fixture's Gauss maps (for the
// fixtures with polynomial structure); used to certify declared degrees.
struct DegreeCheck {
    double deg_G, deg_Gstar;
    bool certified;
};
DegreeCheck check_degrees(const SceneSpec& spec);

// dense polynomial helpers (shared with tests)
struct Poly {
    std::vector<cplx> coeff;  // coeff[k] multiplies z^k
    cplx eval(cplx z) const;
    Poly derivative() const;
    int degree() const;
};
Poly poly_mul(const Poly& a, const Poly& b);
std::vector<cplx> poly_roots(const Poly& p);

}  // namespace hflat
