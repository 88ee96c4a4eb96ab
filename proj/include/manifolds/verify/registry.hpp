#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "manifolds/verify/report.hpp"
#include "manifolds/verify/suites_actions.hpp"
#include "manifolds/verify/suites_common.hpp"
#include "manifolds/verify/suites_geometry.hpp"
#include "manifolds/verify/suites_spaceforms.hpp"

namespace manifolds::verify {

class UnknownSuiteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SuiteInfo {
  std::string name;
  std::string statement;  // the property the suite verifies, self-contained
  SuiteDims default_dims;
  int default_trials = 0;
  std::map<std::string, double> default_tolerances;
  std::function<void(const SuiteContext&, ReportBuilder&)> run;
};

inline const std::vector<SuiteInfo>& suite_registry() {
  static const std::vector<SuiteInfo> registry = {
      {"metric-bounds",
       "canonical-metric norm equivalence: (1/2)|V|^2 <= g_Y(V,V) <= |V|^2 with "
       "g_Y(V,V) = |V|^2 - (1/2)|Y^T V|^2, equality attained by vertical and "
       "horizontal vectors",
       {10, 3, 0, 0},
       10000,
       {{"bound_slack", 1e-12}, {"identity_tol", 1e-12}},
       run_metric_bounds},
      {"geodesic-crossval",
       "closed-form Stiefel geodesics for the embedded and canonical metrics agree "
       "with an independent Runge-Kutta integration of the geodesic equations, keep "
       "constant speed and stay on the manifold",
       {10, 3, 0, 0},
       200,
       {{"crossval", 1e-6}, {"speed_drift", 1e-8}, {"orthonormality", 1e-9}},
       run_geodesic_crossval},
      {"totally-geodesic",
       "isometric embeddings of smaller Stiefel and Grassmann manifolds are totally "
       "geodesic: embedded geodesics never leave the image subspace and metrics pull "
       "back exactly",
       {8, 2, 0, 0},
       100,
       {{"residual", 1e-9}, {"metric_preservation", 1e-12}},
       run_totally_geodesic},
      {"grassmann-hopfrinow",
       "below the cut locus the subspace log and exp invert each other and the log "
       "norm equals the principal-angle distance (minimal geodesics at finite "
       "truncation)",
       {8, 2, 0, 0},
       500,
       {{"roundtrip", 1e-8}, {"log_norm_vs_distance", 1e-10}},
       run_grassmann_hopfrinow},
      {"submersion",
       "the quotient map from frames to subspaces is a Riemannian submersion: "
       "horizontal geodesics project to subspace geodesics, the tangent splits agree "
       "in both metrics and outputs are representative-independent",
       {8, 2, 0, 0},
       100,
       {{"projection", 1e-8},
        {"metric_agreement", 1e-12},
        {"representative_independence", 1e-10}},
       run_submersion},
      {"involution",
       "the geodesic reflection through a subspace is an involutive isometry fixing "
       "it, fixing complement subspaces, with differential -Id at the fixed point",
       {8, 2, 0, 0},
       100,
       {{"fixed_point", 1e-10}, {"distance_preservation", 1e-10}},
       run_involution},
      {"curvature-sign",
       "canonical-metric sectional curvature is nonnegative and nonconstant for "
       "p >= 2, matches geodesic-deviation estimates, and reduces to the unit sphere "
       "value at p = 1",
       {0, 0, 0, 0},
       1000,
       {{"nonnegativity_floor", -1e-9},
        {"nonconstancy_spread", 0.05},
        {"jacobi_agreement", 5e-3}},
       run_curvature_sign},
      {"kaehler-bounds",
       "holomorphic sectional curvature of complex Grassmannians lies in [2/p, 2] "
       "(normalization with projective-line value 2), both ends attained, "
       "scale-invariant and consistent with geodesic-deviation estimates",
       {0, 0, 0, 0},
       1000,
       {{"bound_slack", 5e-3}, {"scaling_invariance", 1e-9}, {"jacobi_agreement", 5e-3}},
       run_kaehler_bounds},
      {"action-freeness",
       "direct-sum actions built from shifts and scalar roots of unity respect the "
       "group law, translate by exact permutations, have spectrally-certified free "
       "torsion parts, and displacement is equivariant under ambient conjugation",
       {0, 0, 1, 16},
       1000,
       {{"group_law", 1e-10}, {"displacement_equivariance", 1e-9}},
       run_action_freeness},
      {"torsion-obstruction",
       "no commuting diagonal unitary assignment of Z_p + Z_p acts freely on the "
       "sphere (exhaustive search on C^2 and C^3), while the Z_4, Z_2 + Z_3 and "
       "Z_2 + Z_9 scalar actions are certified free",
       {0, 0, 0, 0},
       1,
       {{"eigen_gap", 1e-8}},
       run_torsion_obstruction},
      {"orbit-divergence",
       "shift orbits on the cyclic window stay uniformly separated: the minimum of "
       "|g^k x - x| over the wrap-free range clears the floor for finitely supported "
       "unit vectors",
       {0, 0, 1, 32},
       100,
       {{"separation_floor", 1e-3}},
       run_orbit_divergence},
      {"clifford",
       "scalar sphere isometries have constant displacement and slide an invariant "
       "great circle; half-space translations have height-dependent displacement and "
       "are not Clifford",
       {0, 0, 0, 0},
       1000,
       {{"sphere_spread", 1e-9},
        {"halfspace_spread_min", 0.1},
        {"velocity_matching", 1e-8}},
       run_clifford},
      {"hyperbolic-models",
       "the upper half-space and hyperboloid models agree through the fixed model "
       "isometry; integer translations conjugate to Minkowski-orthogonal matrices "
       "obeying the group law; displacement is constant on horospheres and strictly "
       "decreasing in height",
       {0, 0, 2, 0},
       1000,
       {{"cross_model", 1e-9},
        {"vertical_pair", 1e-12},
        {"form_preservation", 1e-10},
        {"group_law", 1e-9},
        {"roundtrip", 1e-12}},
       run_hyperbolic_models},
      {"hinfty-action",
       "the integer-translation action on the truncated infinite-dimensional "
       "hyperboloid preserves the defining form, reduces exactly to the finite model "
       "on zero l2 block, and keeps orbits with nonzero l2 block separated",
       {0, 0, 2, 8},
       50,
       {{"constraint", 1e-10}, {"reduction", 1e-9}, {"orbit_floor", 1e-6}},
       run_hinfty_action},
      {"flat-quotient",
       "the lattice-quotient distance satisfies the metric axioms, vanishes exactly "
       "on orbits, never exceeds the euclidean distance, and matches brute-force "
       "enumeration on the square lattice",
       {4, 0, 0, 0},
       1000,
       {{"symmetry", 1e-12},
        {"triangle_slack", 1e-8},
        {"orbit_vanishing", 1e-9},
        {"brute_force", 1e-12}},
       run_flat_quotient},
      {"sphere-quotient",
       "finite groups of unit scalars over R, C and the quaternions act freely on "
       "spheres as Clifford translations: spectra avoid 1 and displacements are "
       "constant with the predicted values",
       {0, 0, 0, 0},
       200,
       {{"displacement_spread", 1e-9}},
       run_sphere_quotient},
  };
  return registry;
}

inline const SuiteInfo* find_suite(const std::string& name) {
  for (const auto& info : suite_registry())
    if (info.name == name) return &info;
  return nullptr;
}

inline std::vector<std::pair<std::string, std::string>> list_suites() {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& info : suite_registry()) out.emplace_back(info.name, info.statement);
  return out;
}

// Resolves defaults, runs the suite, catches internal failures into the
// report (the caller maps them to the exit status).
inline SuiteReport run_suite(const SuiteConfig& config) {
  const SuiteInfo* info = find_suite(config.suite_name);
  if (info == nullptr) throw UnknownSuiteError("unknown suite: " + config.suite_name);

  if (config.trials < 0) throw ConfigError("trials must be >= 1");
  if (config.dims.n < 0 || config.dims.p < 0 || config.dims.k < 0 || config.dims.window < 0)
    throw ConfigError("dimensions must be positive");
  for (const auto& [name, value] : config.tolerances) {
    if (info->default_tolerances.find(name) == info->default_tolerances.end())
      throw ConfigError("unknown tolerance for suite " + info->name + ": " + name);
    if (!(value > 0.0) && name != "nonnegativity_floor")
      throw ConfigError("tolerance must be positive: " + name);
  }

  SuiteReport report;
  report.suite_name = info->name;
  report.dims.n = config.dims.n > 0 ? config.dims.n : info->default_dims.n;
  report.dims.p = config.dims.p > 0 ? config.dims.p : info->default_dims.p;
  report.dims.k = config.dims.k > 0 ? config.dims.k : info->default_dims.k;
  report.dims.window = config.dims.window > 0 ? config.dims.window : info->default_dims.window;
  report.trials = config.trials > 0 ? config.trials : info->default_trials;
  report.seed = config.seed;
  report.tolerances = info->default_tolerances;
  for (const auto& [name, value] : config.tolerances) report.tolerances[name] = value;

  SuiteContext ctx;
  ctx.dims = report.dims;
  ctx.trials = report.trials;
  ctx.seed = report.seed;
  ctx.tolerances = &report.tolerances;

  ReportBuilder rb(&report);
  const auto start = std::chrono::steady_clock::now();
  try {
    info->run(ctx, rb);
  } catch (const std::exception& e) {
    report.error = e.what();
    report.passed = false;
  }
  const auto stop = std::chrono::steady_clock::now();
  report.runtime_ms =
      std::chrono::duration_cast<std::chrono::microseconds>(stop - start).count() / 1000.0;
  return report;
}

}  // namespace manifolds::verify
