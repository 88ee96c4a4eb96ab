#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "manifolds/rng.hpp"
#include "manifolds/space_forms.hpp"
#include "manifolds/verify/suites_common.hpp"

namespace manifolds::verify {

// Upper half-space vs hyperboloid: the fixed model isometry preserves
// distances, the vertical pair has unit distance, and integer translations
// conjugate to Minkowski-orthogonal matrices obeying the group law.
inline void run_hyperbolic_models(const SuiteContext& ctx, ReportBuilder& rb) {
  const double cross_tol = ctx.tol("cross_model");
  const double vertical_tol = ctx.tol("vertical_pair");
  const double form_tol = ctx.tol("form_preservation");
  const double law_tol = ctx.tol("group_law");

  for (int pass = 0; pass < 2; ++pass) {
    const int rank = (ctx.dims.k > 0 ? ctx.dims.k : 2) + pass;  // Z^rank
    const int dim = rank + 1;                                   // half-space coords
    const int trials = pass == 0 ? ctx.trials : ctx.stability_trials();
    const std::string tag = pass == 0 ? "" : "@n+1";

    double cross_resid = 0.0, roundtrip_resid = 0.0;
    json witness;
    for (int t = 0; t < trials; ++t) {
      CounterRng rng(ctx.seed, 21000003ull * pass + t);
      VectorXd a(dim), b(dim);
      for (int i = 0; i < dim - 1; ++i) {
        a(i) = 2.0 * rng.normal();
        b(i) = 2.0 * rng.normal();
      }
      a(dim - 1) = std::exp(rng.normal());
      b(dim - 1) = std::exp(rng.normal());
      const HalfSpacePoint x(a), y(b);
      const double dh = halfspace_distance(x, y);
      const double dm = hyperboloid_distance(halfspace_to_hyperboloid(x),
                                             halfspace_to_hyperboloid(y));
      const double r = std::abs(dh - dm);
      if (r > cross_resid) {
        cross_resid = r;
        witness = json{{"x", vector_to_json(a)}, {"y", vector_to_json(b)}};
      }
      roundtrip_resid =
          std::max(roundtrip_resid,
                   (hyperboloid_to_halfspace(halfspace_to_hyperboloid(x)).coords - a).norm());
    }
    rb.check("cross-model-distance" + tag, cross_resid, cross_tol, Bound::upper, witness);
    rb.check("model-roundtrip" + tag, roundtrip_resid, ctx.tol("roundtrip"), Bound::upper);

    // basepoint normalization
    VectorXd base = VectorXd::Zero(dim);
    base(dim - 1) = 1.0;
    VectorXd base_image = halfspace_to_hyperboloid(HalfSpacePoint(base)).coords;
    VectorXd expected = VectorXd::Zero(dim + 1);
    expected(dim) = 1.0;
    rb.check("basepoint-normalization" + tag, (base_image - expected).norm(), 1e-14,
             Bound::upper);

    // Minkowski matrices: form preservation, group law, conjugation consistency
    const MinkowskiForm form(dim, 1);
    const MatrixXd q = form.metric_matrix();
    double form_resid = 0.0, law_resid = 0.0, conj_resid = 0.0;
    for (int t = 0; t < std::max(trials / 4, 10); ++t) {
      CounterRng rng(ctx.seed, 22000003ull * pass + t);
      VectorXi m1(rank), m2(rank);
      for (int i = 0; i < rank; ++i) {
        m1(i) = rng.uniform_int(-5, 5);
        m2(i) = rng.uniform_int(-5, 5);
      }
      const MatrixXd g1 = zn_minkowski_matrix(m1);
      const MatrixXd g2 = zn_minkowski_matrix(m2);
      form_resid = std::max(form_resid, (g1.transpose() * q * g1 - q).norm());
      law_resid = std::max(law_resid, (zn_minkowski_matrix(m1 + m2) - g1 * g2).norm());

      VectorXd c(dim);
      for (int i = 0; i < dim - 1; ++i) c(i) = rng.normal();
      c(dim - 1) = std::exp(rng.normal());
      const HalfSpacePoint x(c);
      const VectorXd via_halfspace =
          halfspace_to_hyperboloid(zn_halfspace_action(m1, x)).coords;
      const VectorXd via_matrix = g1 * halfspace_to_hyperboloid(x).coords;
      conj_resid = std::max(conj_resid, (via_halfspace - via_matrix).norm());
    }
    rb.check("minkowski-form-preservation" + tag, form_resid, form_tol, Bound::upper);
    rb.check("minkowski-group-law" + tag, law_resid, law_tol, Bound::upper);
    rb.check("conjugation-consistency" + tag, conj_resid, law_tol, Bound::upper);

    // displacement: constant on horospheres, strictly decreasing in height
    VectorXi m = VectorXi::Zero(rank);
    m(0) = 1;
    const auto delta_at = [&](double x1, double h) {
      VectorXd c = VectorXd::Zero(dim);
      c(0) = x1;
      c(dim - 1) = h;
      const HalfSpacePoint x(c);
      return halfspace_distance(x, zn_halfspace_action(m, x));
    };
    double horo_resid = 0.0;
    for (double h : {0.5, 1.0, 2.0})
      horo_resid = std::max(horo_resid, std::abs(delta_at(0.0, h) - delta_at(3.7, h)));
    rb.check("horosphere-constancy" + tag, horo_resid, 1e-12, Bound::upper);
    const double drop1 = delta_at(0.0, 0.5) - delta_at(0.0, 1.0);
    const double drop2 = delta_at(0.0, 1.0) - delta_at(0.0, 2.0);
    rb.check("height-monotonicity" + tag, std::min(drop1, drop2), 1e-6, Bound::lower);
  }

  // 1-dimensional vertical pair: d((0,1),(0,e)) = 1
  const HalfSpacePoint v1((VectorXd(2) << 0.0, 1.0).finished());
  const HalfSpacePoint v2((VectorXd(2) << 0.0, std::numbers::e).finished());
  rb.check("vertical-pair-unit-distance", std::abs(halfspace_distance(v1, v2) - 1.0),
           vertical_tol, Bound::upper);
}

// Z^n on the truncated infinite-dimensional hyperboloid: the quadratic form
// is preserved, zero l2 block reduces to the finite model, orbits of points
// with nonzero l2 block stay separated in the wrap-free range.
inline void run_hinfty_action(const SuiteContext& ctx, ReportBuilder& rb) {
  const double constraint_tol = ctx.tol("constraint");
  const double reduction_tol = ctx.tol("reduction");
  const double floor = ctx.tol("orbit_floor");

  for (int pass = 0; pass < 2; ++pass) {
    const int rank = ctx.dims.k > 0 ? ctx.dims.k : 2;
    const int radius = (ctx.dims.window > 0 ? ctx.dims.window : 8) + 2 * pass;
    const int trials = pass == 0 ? ctx.trials : ctx.stability_trials();
    const std::string tag = pass == 0 ? "" : "@r+2";

    const L2Truncation trunc(rank, radius, BoundaryMode::cyclic);
    const long dim = trunc.dimension();

    const auto sample_point = [&](CounterRng& rng, double l2_scale) {
      VectorXd x = VectorXd::Zero(dim);
      if (l2_scale > 0) {
        const int width = std::max(1, radius / 2);
        for (int i = 0; i < width; ++i) x(i) = rng.normal();
        x *= l2_scale / std::max(x.norm(), 1e-12);
      }
      VectorXd xi = rng.gaussian_vector(rank + 1);
      const double t = std::sqrt(1.0 + x.squaredNorm() + xi.squaredNorm());
      return HinftyPoint(x, xi, t, 1e-8);
    };

    double constraint_resid = 0.0, inverse_resid = 0.0;
    json witness;
    for (int t = 0; t < trials; ++t) {
      CounterRng rng(ctx.seed, 23000003ull * pass + t);
      const HinftyPoint z = sample_point(rng, rng.uniform(0.2, 1.0));
      VectorXi m(rank);
      for (int i = 0; i < rank; ++i) m(i) = rng.uniform_int(-3, 3);
      const HinftyPoint gz = hinfty_action(m, z, trunc);
      const double r = std::abs(gz.quadratic_form() + 1.0);
      if (r > constraint_resid) {
        constraint_resid = r;
        witness = json{{"m", vector_to_json(m.cast<double>())},
                       {"l2_norm", z.l2_block.norm()},
                       {"t", z.t}};
      }
      const HinftyPoint back = hinfty_action(-m, gz, trunc);
      inverse_resid = std::max(
          inverse_resid, (back.l2_block - z.l2_block).norm() +
                             (back.spatial_block - z.spatial_block).norm() +
                             std::abs(back.t - z.t));
    }
    rb.check("constraint-preservation" + tag, constraint_resid, constraint_tol, Bound::upper,
             witness);
    rb.check("inverse-action" + tag, inverse_resid, 1e-9, Bound::upper);

    // orbit separation for a nonzero l2 block
    {
      CounterRng rng(ctx.seed, 24000003ull * pass);
      const HinftyPoint z = sample_point(rng, 0.7);
      VectorXi m = VectorXi::Zero(rank);
      m(0) = 1;
      double min_d = std::numeric_limits<double>::infinity();
      HinftyPoint zk = z;
      for (int k = 1; k < radius; ++k) {
        zk = hinfty_action(m, zk, trunc);
        min_d = std::min(min_d, hinfty_distance(z, zk));
      }
      rb.check("orbit-separation-floor" + tag, min_d, floor, Bound::lower);
    }

    // zero l2 block: reduces to the finite-dimensional model exactly
    {
      CounterRng rng(ctx.seed, 25000003ull * pass);
      const HinftyPoint z0 = sample_point(rng, 0.0);
      VectorXi m(rank);
      for (int i = 0; i < rank; ++i) m(i) = rng.uniform_int(-3, 3);
      const HinftyPoint gz0 = hinfty_action(m, z0, trunc);
      rb.check("zero-block-stays-zero" + tag, gz0.l2_block.norm(), 0.0, Bound::upper);

      VectorXd block(rank + 2);
      block.head(rank + 1) = z0.spatial_block;
      block(rank + 1) = z0.t;
      const VectorXd expected = zn_minkowski_matrix(m) * block;
      const double finite_resid =
          (gz0.spatial_block - expected.head(rank + 1)).norm() +
          std::abs(gz0.t - expected(rank + 1));
      rb.check("finite-block-reduction" + tag, finite_resid, 1e-12, Bound::upper);

      // and the finite block matches the half-space route
      const HalfSpacePoint hs = hyperboloid_to_halfspace(HyperboloidPoint(block, 1e-8));
      const VectorXd via_halfspace =
          halfspace_to_hyperboloid(zn_halfspace_action(m, hs)).coords;
      rb.check("halfspace-route-agreement" + tag, (via_halfspace - expected).norm(),
               reduction_tol, Bound::upper);
    }
  }
}

// Lattice quotient distance: metric axioms, vanishing exactly on orbits,
// brute-force agreement on Z^2, euclidean behaviour off the lattice span.
inline void run_flat_quotient(const SuiteContext& ctx, ReportBuilder& rb) {
  const double sym_tol = ctx.tol("symmetry");
  const double triangle_slack = ctx.tol("triangle_slack");
  const double orbit_tol = ctx.tol("orbit_vanishing");
  const double brute_tol = ctx.tol("brute_force");

  for (int pass = 0; pass < 2; ++pass) {
    const int dim = (ctx.dims.n > 0 ? ctx.dims.n : 4) + pass;
    const int trials = pass == 0 ? ctx.trials : ctx.stability_trials();
    const std::string tag = pass == 0 ? "" : "@n+1";

    double sym_resid = 0.0, tri_viol = -1e300, orbit_resid = 0.0, euclid_viol = -1e300;
    json witness;
    for (int rank = 1; rank <= dim && rank <= 4; ++rank) {
      for (int t = 0; t < trials / 4; ++t) {
        CounterRng rng(ctx.seed, 26000003ull * pass + 97ull * rank + t);
        MatrixXd gens;
        double cond = 1e300;
        for (int attempt = 0; attempt < 50 && cond > 30.0; ++attempt) {
          gens = rng.gaussian(dim, rank);
          Eigen::JacobiSVD<MatrixXd> svd(gens);
          cond = svd.singularValues()(0) / svd.singularValues()(rank - 1);
        }
        const Lattice lat(gens);
        const VectorXd x = 2.0 * rng.gaussian_vector(dim);
        const VectorXd y = 2.0 * rng.gaussian_vector(dim);
        const VectorXd z = 2.0 * rng.gaussian_vector(dim);

        const double dxy = flat_quotient_distance(lat, x, y);
        const double dyx = flat_quotient_distance(lat, y, x);
        const double dxz = flat_quotient_distance(lat, x, z);
        const double dyz = flat_quotient_distance(lat, y, z);
        sym_resid = std::max(sym_resid, std::abs(dxy - dyx));
        const double tv = dxz - (dxy + dyz);
        if (tv > tri_viol) {
          tri_viol = tv;
          witness = json{{"generators", matrix_to_json(gens)},
                         {"x", vector_to_json(x)},
                         {"y", vector_to_json(y)},
                         {"z", vector_to_json(z)}};
        }
        euclid_viol = std::max(euclid_viol, dxy - (x - y).norm());

        VectorXd zint(rank);
        for (int i = 0; i < rank; ++i) zint(i) = rng.uniform_int(-3, 3);
        orbit_resid =
            std::max(orbit_resid, flat_quotient_distance(lat, x, x + gens * zint));
      }
    }
    rb.check("symmetry" + tag, sym_resid, sym_tol, Bound::upper);
    rb.check("triangle-violation" + tag, tri_viol, triangle_slack, Bound::upper, witness);
    rb.check("orbit-vanishing" + tag, orbit_resid, orbit_tol, Bound::upper);
    rb.check("never-exceeds-euclidean" + tag, euclid_viol, 1e-12, Bound::upper);
  }

  // Z^2 closed cases and brute-force agreement
  {
    const Lattice z2(MatrixXd::Identity(2, 2));
    const VectorXd zero = VectorXd::Zero(2);
    const VectorXd half = (VectorXd(2) << 0.5, 0.5).finished();
    rb.check("z2-half-cell-distance",
             std::abs(flat_quotient_distance(z2, zero, half) - std::sqrt(2.0) / 2.0), brute_tol,
             Bound::upper);

    double brute_resid = 0.0;
    for (int t = 0; t < 100; ++t) {
      CounterRng rng(ctx.seed, 27000003ull + t);
      const VectorXd x = 2.0 * rng.gaussian_vector(2);
      const VectorXd y = 2.0 * rng.gaussian_vector(2);
      double brute = std::numeric_limits<double>::infinity();
      for (int w1 = -6; w1 <= 6; ++w1)
        for (int w2 = -6; w2 <= 6; ++w2) {
          const VectorXd w = (VectorXd(2) << w1, w2).finished();
          brute = std::min(brute, (x - y - w).norm());
        }
      brute_resid =
          std::max(brute_resid, std::abs(flat_quotient_distance(z2, x, y) - brute));
    }
    rb.check("z2-brute-force-agreement", brute_resid, brute_tol, Bound::upper);
  }

  // rank < dimension: unreduced directions contribute euclidean distance
  {
    MatrixXd gens = MatrixXd::Zero(4, 1);
    gens(0, 0) = 1.0;
    const Lattice line(gens);
    const VectorXd x = VectorXd::Zero(4);
    const VectorXd y = (VectorXd(4) << 0.3, 1.0, 2.0, 3.0).finished();
    double expected = std::numeric_limits<double>::infinity();
    for (int w = -5; w <= 5; ++w)
      expected = std::min(expected,
                          std::sqrt((0.3 - w) * (0.3 - w) + 1.0 + 4.0 + 9.0));
    rb.check("partial-rank-euclidean",
             std::abs(flat_quotient_distance(line, x, y) - expected), brute_tol, Bound::upper);
  }
}

}  // namespace manifolds::verify
