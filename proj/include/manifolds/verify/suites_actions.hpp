#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "manifolds/actions.hpp"
#include "manifolds/rng.hpp"
#include "manifolds/space_forms.hpp"
#include "manifolds/verify/suites_common.hpp"

namespace manifolds::verify {

namespace detail_suites {

// Exhaustive search over commuting diagonal unitary assignments of
// Z_p (+) Z_p on C^dim; returns the number of assignments that act freely.
inline long count_free_diagonal_assignments(int prime, int dim, long* total_out) {
  long assignments = 1;
  for (int i = 0; i < 2 * dim; ++i) assignments *= prime;
  long free_count = 0;
  const GroupSpec spec(0, {{prime, 1}, {prime, 1}});
  std::vector<int> e1(dim, 0), e2(dim, 0);
  for (long code = 0; code < assignments; ++code) {
    long rest = code;
    for (int i = 0; i < dim; ++i) {
      e1[i] = static_cast<int>(rest % prime);
      rest /= prime;
    }
    for (int i = 0; i < dim; ++i) {
      e2[i] = static_cast<int>(rest % prime);
      rest /= prime;
    }
    const LinearIsometryAction action(spec, {},
                                      {diagonal_unitary(e1, prime), diagonal_unitary(e2, prime)});
    if (freeness_check(action).torsion_free) ++free_count;
  }
  if (total_out) *total_out = assignments;
  return free_count;
}

inline double min_eigen_gap(const FreenessCertificate& cert, const LinearIsometryAction& action) {
  double gap = std::numeric_limits<double>::infinity();
  for (const auto& g : enumerate_torsion_elements(action.group)) {
    const MatrixXcd m = action.represent(g);
    Eigen::ComplexEigenSolver<MatrixXcd> eig(m);
    for (int i = 0; i < eig.eigenvalues().size(); ++i)
      gap = std::min(gap, std::abs(eig.eigenvalues()(i) - std::complex<double>(1.0, 0.0)));
  }
  (void)cert;
  return gap;
}

}  // namespace detail_suites

// Same-prime torsion pairs never act freely (exhaustive over diagonal
// assignments); distinct-prime scalar actions certify free.
inline void run_torsion_obstruction(const SuiteContext& ctx, ReportBuilder& rb) {
  long total = 0;
  const long f22 = detail_suites::count_free_diagonal_assignments(2, 2, &total);
  rb.check_true("z2+z2-on-C2-assignment-count", total == 16);
  rb.check("z2+z2-on-C2-free-assignments", static_cast<double>(f22), 0.0, Bound::upper);

  const long f23 = detail_suites::count_free_diagonal_assignments(2, 3, &total);
  rb.check_true("z2+z2-on-C3-assignment-count", total == 64);
  rb.check("z2+z2-on-C3-free-assignments", static_cast<double>(f23), 0.0, Bound::upper);

  const long f33 = detail_suites::count_free_diagonal_assignments(3, 3, &total);
  rb.check_true("z3+z3-on-C3-assignment-count", total == 729);
  rb.check("z3+z3-on-C3-free-assignments", static_cast<double>(f33), 0.0, Bound::upper);

  const auto scalar_free_check = [&](const std::string& id, const GroupSpec& spec, int dim) {
    std::vector<MatrixXcd> torsion;
    for (const auto& t : spec.torsion)
      torsion.push_back(torsion_scalar_action(t.prime, t.exponent, dim));
    const LinearIsometryAction action(spec, {}, torsion);
    const FreenessCertificate cert = freeness_check(action);
    rb.check_true(id + "-free", cert.torsion_free);
    rb.check(id + "-eigen-gap", detail_suites::min_eigen_gap(cert, action), 0.1, Bound::lower);
  };
  scalar_free_check("z4-scalar", GroupSpec(0, {{2, 2}}), 2);
  scalar_free_check("z2+z3-scalar", GroupSpec(0, {{2, 1}, {3, 1}}), 2);
  scalar_free_check("z2+z9-scalar", GroupSpec(0, {{2, 1}, {3, 2}}), 2);
}

// Shift orbits on the cyclic window keep a uniform separation floor for
// finitely supported unit vectors in the wrap-free range.
inline void run_orbit_divergence(const SuiteContext& ctx, ReportBuilder& rb) {
  const double floor = ctx.tol("separation_floor");
  for (int pass = 0; pass < 2; ++pass) {
    const int radius = ctx.dims.window + 2 * pass;
    const int max_power = radius - 1;
    const int trials = pass == 0 ? ctx.trials : ctx.stability_trials();
    const std::string tag = pass == 0 ? "" : "@r+2";

    const GroupSpec spec(1);
    const L2Truncation trunc(1, radius, BoundaryMode::cyclic);
    const LinearIsometryAction action = build_action(spec, trunc);
    GroupElement shift = identity_element(spec);
    shift.free_part(0) = 1;
    const long dim = trunc.dimension();

    // basis vector case: images stay orthonormal, min displacement sqrt(2)
    VectorXcd e0 = VectorXcd::Zero(dim);
    e0(0) = 1.0;
    const OrbitDivergenceReport basis_report =
        orbit_divergence_check(action, shift, e0, std::min(10, max_power), floor);
    rb.check("basis-vector-min-displacement" + tag,
             std::abs(basis_report.min_displacement - std::sqrt(2.0)), 1e-12, Bound::upper);

    double worst = std::numeric_limits<double>::infinity();
    json witness;
    for (int t = 0; t < trials; ++t) {
      CounterRng rng(ctx.seed, 11000003ull * pass + t);
      const int width = rng.uniform_int(1, std::max(2, radius / 2));
      const int start = rng.uniform_int(0, static_cast<int>(dim) - 1);
      VectorXd x = VectorXd::Zero(dim);
      for (int i = 0; i < width; ++i)
        x((start + i) % dim) = rng.normal();
      if (x.norm() < 1e-12) x(start) = 1.0;
      x /= x.norm();
      const OrbitDivergenceReport rep =
          orbit_divergence_check(action, shift, x.cast<std::complex<double>>(), max_power, floor);
      if (rep.min_displacement < worst) {
        worst = rep.min_displacement;
        witness = json{{"support_start", start},
                       {"support_width", width},
                       {"argmin_power", rep.argmin_power},
                       {"x", vector_to_json(x)}};
      }
    }
    rb.check("min-orbit-displacement" + tag, worst, floor, Bound::lower, witness);
  }
}

// Scalar sphere actions are Clifford translations; half-space translations
// are not; Clifford isometries slide an invariant geodesic.
inline void run_clifford(const SuiteContext& ctx, ReportBuilder& rb) {
  const double sphere_tol = ctx.tol("sphere_spread");
  const double halfspace_spread_min = ctx.tol("halfspace_spread_min");
  const double velocity_tol = ctx.tol("velocity_matching");

  for (int pass = 0; pass < 2; ++pass) {
    const int complex_dim = 2 + pass;  // C^2, then C^3 for stability
    const std::string tag = pass == 0 ? "" : "@n+1";
    const int samples = pass == 0 ? ctx.trials : ctx.stability_trials();

    double spread = 0.0, delta_err = 0.0;
    bool all_clifford = true;
    for (double theta : {0.3, 1.0, std::numbers::pi / 2.0, std::numbers::pi}) {
      const MatrixXcd scalar =
          std::polar(1.0, theta) * MatrixXcd::Identity(complex_dim, complex_dim);
      const MatrixXd map = realify_operator(scalar);
      CounterRng rng(ctx.seed, 12000003ull * pass + static_cast<std::uint64_t>(theta * 1000));
      const CliffordVerdict v = clifford_detector_sphere(map, samples, sphere_tol, rng);
      spread = std::max(spread, v.spread);
      delta_err = std::max(delta_err, std::abs(v.profile.mean - theta));
      all_clifford = all_clifford && v.clifford;
    }
    rb.check_true("scalar-clifford-verdicts" + tag, all_clifford);
    rb.check("scalar-displacement-spread" + tag, spread, sphere_tol, Bound::upper);
    rb.check("scalar-displacement-value" + tag, delta_err, 1e-12, Bound::upper);
  }

  // half-space translation: displacement depends on the height
  {
    const Eigen::VectorXi m = Eigen::Vector2i(1, 0);
    const auto delta_at = [&](double h) {
      const HalfSpacePoint x((VectorXd(3) << 0.0, 0.0, h).finished());
      return halfspace_distance(x, zn_halfspace_action(m, x));
    };
    rb.check("halfspace-height-spread", std::abs(delta_at(0.5) - delta_at(2.0)),
             halfspace_spread_min, Bound::lower);

    CounterRng rng(ctx.seed, 13000003ull);
    const CliffordVerdict v = clifford_detector(
        [&rng](int) {
          VectorXd c(3);
          c(0) = rng.normal();
          c(1) = rng.normal();
          c(2) = std::exp(rng.normal());
          return c;
        },
        [&m](const VectorXd& c) { return zn_halfspace_action(m, HalfSpacePoint(c)).coords; },
        [](const VectorXd& a, const VectorXd& b) {
          return halfspace_distance(HalfSpacePoint(a), HalfSpacePoint(b));
        },
        std::max(ctx.trials, 16), 1e-3);
    rb.check_true("halfspace-not-clifford", !v.clifford,
                  json{{"witness_min", vector_to_json(v.witness_min)},
                       {"witness_max", vector_to_json(v.witness_max)},
                       {"spread", v.spread}});
  }

  // invariant geodesics: rotation circle, antipodal map, flat translation
  {
    CounterRng rng(ctx.seed, 14000003ull);
    const MatrixXd hopf =
        realify_operator(std::polar(1.0, 0.7) * MatrixXcd::Identity(2, 2));
    const CliffordVerdict hv = clifford_detector_sphere(hopf, 64, 1e-9, rng);
    const VectorXd x0 = random_unit_vector(rng, 4);
    const InvariantGeodesicCertificate hopf_cert = invariant_geodesic_sphere(hopf, x0, hv);
    rb.check("rotation-circle-velocity-angle", hopf_cert.velocity_angle, velocity_tol,
             Bound::upper);
    rb.check("rotation-circle-mapping-residual", hopf_cert.mapping_residual, velocity_tol,
             Bound::upper);

    const MatrixXd antipodal = -MatrixXd::Identity(4, 4);
    const CliffordVerdict av = clifford_detector_sphere(antipodal, 64, 1e-9, rng);
    const InvariantGeodesicCertificate anti_cert = invariant_geodesic_sphere(antipodal, x0, av);
    rb.check("antipodal-velocity-angle", anti_cert.velocity_angle, velocity_tol, Bound::upper);
    rb.check("antipodal-mapping-residual", anti_cert.mapping_residual, velocity_tol, Bound::upper);

    const VectorXd translation = rng.gaussian_vector(3);
    const CliffordVerdict fv = clifford_detector(
        [&rng](int) { return VectorXd(rng.gaussian_vector(3)); },
        [&translation](const VectorXd& x) { return VectorXd(x + translation); },
        [](const VectorXd& a, const VectorXd& b) { return (a - b).norm(); }, 64, 1e-9);
    rb.check_true("translation-clifford-verdict", fv.clifford);
    const InvariantGeodesicCertificate flat_cert =
        invariant_geodesic_flat(translation, rng.gaussian_vector(3), fv);
    rb.check("translation-velocity-angle", flat_cert.velocity_angle, velocity_tol, Bound::upper);
    rb.check("translation-mapping-residual", flat_cert.mapping_residual, velocity_tol,
             Bound::upper);
  }
}

// Construction invariants of the direct-sum actions: group law, exact
// isometry of the translations, spectra of the torsion part, displacement
// equivariance under ambient conjugation.
inline void run_action_freeness(const SuiteContext& ctx, ReportBuilder& rb) {
  const double law_tol = ctx.tol("group_law");
  const double equiv_tol = ctx.tol("displacement_equivariance");

  for (int pass = 0; pass < 2; ++pass) {
    const int radius = ctx.dims.window + 2 * pass;
    const std::string tag = pass == 0 ? "" : "@r+2";
    const int trials = pass == 0 ? ctx.trials : ctx.stability_trials();

    const GroupSpec spec(1, {{2, 2}});  // Z (+) Z_4
    const L2Truncation trunc(1, radius, BoundaryMode::cyclic);
    const LinearIsometryAction action = build_action(spec, trunc);
    const long dim = trunc.dimension();

    double law_resid = 0.0;
    json witness;
    for (int t = 0; t < trials; ++t) {
      CounterRng rng(ctx.seed, 15000003ull * pass + t);
      GroupElement g1 = identity_element(spec), g2 = identity_element(spec);
      g1.free_part(0) = rng.uniform_int(-5, 5);
      g2.free_part(0) = rng.uniform_int(-5, 5);
      g1.torsion_part[0] = rng.uniform_int(0, 3);
      g2.torsion_part[0] = rng.uniform_int(0, 3);
      const double r = (action.represent(compose(spec, g1, g2)) -
                        action.represent(g1) * action.represent(g2))
                           .norm();
      if (r > law_resid) {
        law_resid = r;
        witness = json{{"g1_free", g1.free_part(0)},
                       {"g1_torsion", g1.torsion_part[0]},
                       {"g2_free", g2.free_part(0)},
                       {"g2_torsion", g2.torsion_part[0]}};
      }
    }
    rb.check("group-law-residual" + tag, law_resid, law_tol, Bound::upper, witness);

    // permutation part moves entries without arithmetic
    {
      CounterRng rng(ctx.seed, 16000003ull * pass);
      GroupElement g = identity_element(spec);
      g.free_part(0) = 3;
      GroupElement g_free = g;
      const TranslationMatrix perm = right_translation_matrix(
          GroupElement{g_free.free_part, {0}},
          trunc);
      const VectorXd x = rng.gaussian_vector(dim);
      VectorXd gx = perm.matrix * x;
      std::vector<double> xs(x.data(), x.data() + x.size());
      std::vector<double> gxs(gx.data(), gx.data() + gx.size());
      std::sort(xs.begin(), xs.end());
      std::sort(gxs.begin(), gxs.end());
      rb.check_true("translation-permutes-entries-exactly" + tag, xs == gxs);
      rb.check("translation-norm-residual" + tag, std::abs(gx.norm() - x.norm()), 1e-15,
               Bound::upper);
    }

    const FreenessCertificate cert = freeness_check(action, false);
    rb.check_true("torsion-part-free" + tag, cert.torsion_free);
    rb.check_true("torsion-elements-checked" + tag,
                  cert.checked_elements == spec.torsion_order() - 1);

    // displacement equivariance under conjugation by an ambient isometry
    double equiv_resid = 0.0;
    for (int t = 0; t < 20; ++t) {
      CounterRng rng(ctx.seed, 17000003ull * pass + t);
      GroupElement g = identity_element(spec);
      g.free_part(0) = rng.uniform_int(1, 3);
      g.torsion_part[0] = rng.uniform_int(0, 3);
      const MatrixXd rep = real_representation(action, g);
      const int rdim = static_cast<int>(rep.rows());
      const MatrixXd conj = random_orthogonal(rng, rdim);
      const VectorXd x = random_unit_vector(rng, rdim);
      const double d1 = sphere_distance(x, rep * x);
      const VectorXd tx = conj * x;
      const double d2 = sphere_distance(tx, conj * rep * conj.transpose() * tx);
      equiv_resid = std::max(equiv_resid, std::abs(d1 - d2));
    }
    rb.check("displacement-equivariance" + tag, equiv_resid, equiv_tol, Bound::upper);
  }
}

// Finite scalar groups over R, C, H act freely and by Clifford translations.
inline void run_sphere_quotient(const SuiteContext& ctx, ReportBuilder& rb) {
  const double clifford_tol = ctx.tol("displacement_spread");

  {  // Z_2 = {+-1} over R
    const ScalarGroupSpec spec(ScalarField::real, {Quaternion(-1, 0, 0, 0)});
    const SphereQuotientCertificate c =
        sphere_quotient_check(spec, 3, std::max(ctx.trials, 16), ctx.seed, clifford_tol);
    rb.check_true("z2-real-closed", c.closed && c.group_order == 2);
    rb.check_true("z2-real-free", c.free);
    rb.check("z2-real-spread", c.max_displacement_spread, clifford_tol, Bound::upper);
    rb.check("z2-real-displacement", std::abs(c.displacements[0] - std::numbers::pi), 1e-12,
             Bound::upper);
  }

  for (int pass = 0; pass < 2; ++pass) {  // Z_5 in U(1) on C^d
    const int d = 2 + pass;
    const std::string tag = pass == 0 ? "" : "@d+1";
    const double a = 2.0 * std::numbers::pi / 5.0;
    const ScalarGroupSpec spec(ScalarField::complex,
                               {Quaternion(std::cos(a), std::sin(a), 0, 0)});
    const SphereQuotientCertificate c =
        sphere_quotient_check(spec, d, std::max(ctx.trials, 16), ctx.seed, clifford_tol);
    rb.check_true("z5-complex-closed" + tag, c.closed && c.group_order == 5);
    rb.check_true("z5-complex-free" + tag, c.free);
    rb.check("z5-complex-spread" + tag, c.max_displacement_spread, clifford_tol, Bound::upper);
    std::vector<double> expected;
    for (int k = 1; k <= 4; ++k) expected.push_back(std::acos(std::cos(a * k)));
    std::sort(expected.begin(), expected.end());
    std::vector<double> got = c.displacements;
    std::sort(got.begin(), got.end());
    double derr = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) derr = std::max(derr, std::abs(got[i] - expected[i]));
    rb.check("z5-complex-displacements" + tag, derr, 1e-9, Bound::upper);
  }

  {  // quaternion group Q8 = {+-1, +-i, +-j, +-k} on the quaternionic line
    const ScalarGroupSpec spec(ScalarField::quaternion,
                               {Quaternion(0, 1, 0, 0), Quaternion(0, 0, 1, 0)});
    const SphereQuotientCertificate c =
        sphere_quotient_check(spec, 1, std::max(ctx.trials, 16), ctx.seed, clifford_tol);
    rb.check_true("q8-closed", c.closed && c.group_order == 8);
    rb.check_true("q8-free", c.free);
    rb.check("q8-spread", c.max_displacement_spread, clifford_tol, Bound::upper);
    // displacements: pi for -1, pi/2 for the six imaginary units
    std::vector<double> got = c.displacements;
    std::sort(got.begin(), got.end());
    double derr = 0.0;
    for (std::size_t i = 0; i < got.size(); ++i) {
      const double expected = i + 1 < got.size() ? std::numbers::pi / 2.0 : std::numbers::pi;
      derr = std::max(derr, std::abs(got[i] - expected));
    }
    rb.check("q8-displacements", derr, 1e-9, Bound::upper);
  }
}

}  // namespace manifolds::verify
