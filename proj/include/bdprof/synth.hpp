#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bdprof/common.hpp"
#include "bdprof/geometry.hpp"
#include "bdprof/image.hpp"

namespace bdp {

// Rotated ellipse: center, semi-axes (major first), rotation in radians.
struct EllipseSpec {
    double cx = 0.0, cy = 0.0;
    double a = 1.0, b = 1.0;  // a >= b > 0
    double theta = 0.0;
};

// Exact unsigned distance from a point to the ellipse outline.  A coarse
// parametric scan brackets the nearest boundary point, golden-section refines
// it; accurate to machine precision for any point, inside or out.
class EllipseDistance {
  public:
    explicit EllipseDistance(const EllipseSpec& e);
    double distance(double x, double y) const;
    bool inside(double x, double y) const;
    const EllipseSpec& spec() const { return spec_; }

  private:
    EllipseSpec spec_;
    double ct_ = 1.0, st_ = 0.0;
    std::vector<std::array<double, 2>> scan_;  // quarter outline, dense in angle
};

// Scaled boundary distance of a point under the minimum-over-nuclei rule,
// using the exact per-ellipse geometry (interior depth supremum = semi-minor
// axis).  0 at a deepest point, 1 on the outline, 1 + d/b outside.
double bd_true(const std::vector<EllipseSpec>& nuclei, double x, double y);

// Ground-truth radial expression templates.
enum class TemplateKind { constant, step, ramp, boundary_peak };

struct ProfileTemplate {
    TemplateKind kind = TemplateKind::constant;
    double level = 1.0;      // constant value; step inner value; ramp value at r = 0; peak height
    double level_out = 0.0;  // step outer value; ramp value at r = 2; peak baseline
    double edge = 1.0;       // step location; peak center
    double width = 0.15;     // peak Gaussian width

    double eval(double r) const;
};

struct SynthSpec {
    int width = 256, height = 256;
    std::vector<EllipseSpec> nuclei;
    std::map<std::string, ProfileTemplate> channels;  // role -> truth profile
    // Pixel intensity = illumination(x, y) * template(bd) + N(0, noise_sigma),
    // clipped to [0, 255].  Illumination is a quadratic in the normalized
    // coordinates u = x/(w-1), v = y/(h-1):
    //   c0 + c1 u + c2 v + c3 u^2 + c4 u v + c5 v^2.
    std::array<double, 6> illumination{1.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    double noise_sigma = 0.0;
    double boundary_jitter = 0.0;  // uniform radial vertex displacement half-width, pixels
    int boundary_vertices = 24;
    uint64_t seed = 0;
};

struct SynthResult {
    LabeledImage image;
    std::vector<std::vector<Point>> true_boundaries;      // vertices on the exact outline
    std::vector<std::vector<Point>> jittered_boundaries;  // radial U[-e, e] per vertex
    std::map<std::string, std::array<double, kGridSize>> truth_curves;
};

// Deterministic render: identical spec (seed included) gives identical planes
// and boundaries.  Ellipses must sit fully inside the image and be pairwise
// disjoint with enough margin for the jitter; violations are ConfigError.
SynthResult generate(const SynthSpec& spec);

// Alternating-radius star polygon for boundary stress tests.
std::vector<Point> star_polygon(double cx, double cy, double r_outer, double r_inner, int points,
                                double rotation = 0.0);

// Reads a scene description from JSON: width/height/seed, a "nuclei" array of
// {cx, cy, a, b, theta} ellipses, a "channels" object mapping role names to
// {kind, level, level_out, edge, width} templates, and optional
// "illumination" (6 coefficients), "noise_sigma", "boundary_jitter",
// "boundary_vertices".  Unknown keys are rejected (ConfigError); malformed
// JSON is a DataError.
SynthSpec parse_synth_spec(const std::string& path);

// Writes a generated scene into `dir`: the image (image.pgm/.ppm/.pam by
// channel count), boundaries_true.json, boundaries_jittered.json (only when
// jitter was applied), and truth.json with the per-channel template curves on
// the analysis grid.
void write_synth_outputs(const std::string& dir, const SynthSpec& spec, const SynthResult& result);

}  // namespace bdp
