#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "manifolds/grassmann.hpp"
#include "manifolds/kaehler.hpp"
#include "manifolds/rng.hpp"
#include "manifolds/stiefel.hpp"
#include "manifolds/verify/suites_common.hpp"

namespace manifolds::verify {

// Norm-equivalence bounds of the canonical metric, with the explicit
// operator Id - 1/2 Y Y^T as the independent evaluation route.
inline void run_metric_bounds(const SuiteContext& ctx, ReportBuilder& rb) {
  const double slack = ctx.tol("bound_slack");
  const double id_tol = ctx.tol("identity_tol");
  for (int pass = 0; pass < 2; ++pass) {
    const int n = ctx.dims.n + 2 * pass;
    const int p = ctx.dims.p;
    const int trials = pass == 0 ? ctx.trials : ctx.stability_trials();
    const std::string tag = pass == 0 ? "" : "@n+2";

    double lower_viol = -1e300, upper_viol = -1e300, identity_res = 0.0;
    double vertical_res = 0.0, horizontal_res = 0.0;
    json witness;
    for (int t = 0; t < trials; ++t) {
      CounterRng rng(ctx.seed, 1000003ull * pass + t);
      const StiefelPoint y = random_stiefel(rng, n, p);
      const TangentAtStiefel v = random_tangent(rng, y);
      const double vv = frobenius_inner(v.direction, v.direction);
      const double g = metric(v, v, MetricKind::canonical);

      const MatrixXd l_op =
          MatrixXd::Identity(n, n) - 0.5 * y.frame * y.frame.transpose();
      const double g_explicit = (v.direction.transpose() * l_op * v.direction).trace();
      const MatrixXd ytv = y.frame.transpose() * v.direction;
      const double g_formula = vv - 0.5 * ytv.squaredNorm();

      const double lo = 0.5 * vv - g;
      const double hi = g - vv;
      const double ir = std::abs(g_explicit - g_formula);
      if (lo > lower_viol || hi > upper_viol) {
        witness = json{{"Y", matrix_to_json(y.frame)}, {"V", matrix_to_json(v.direction)}};
      }
      lower_viol = std::max(lower_viol, lo);
      upper_viol = std::max(upper_viol, hi);
      identity_res = std::max(identity_res, ir);

      if (t % 50 == 0) {  // equality cases: vertical and horizontal vectors
        MatrixXd skew = rng.gaussian(p, p);
        skew = 0.5 * (skew - skew.transpose().eval());
        const TangentAtStiefel vert(y, y.frame * skew, 1e-8);
        const double gv = metric(vert, vert, MetricKind::canonical);
        vertical_res = std::max(
            vertical_res, std::abs(gv - 0.5 * frobenius_inner(vert.direction, vert.direction)));
        const MatrixXd yperp = orthogonal_complement(y.frame);
        const TangentAtStiefel horiz(y, yperp * rng.gaussian(n - p, p), 1e-8);
        const double gh = metric(horiz, horiz, MetricKind::canonical);
        horizontal_res = std::max(
            horizontal_res, std::abs(gh - frobenius_inner(horiz.direction, horiz.direction)));
      }
    }
    rb.check("lower-bound-violation" + tag, lower_viol, slack, Bound::upper, witness);
    rb.check("upper-bound-violation" + tag, upper_viol, slack, Bound::upper);
    rb.check("norm-identity-residual" + tag, identity_res, id_tol, Bound::upper);
    rb.check("vertical-equality-residual" + tag, vertical_res, id_tol, Bound::upper);
    rb.check("horizontal-equality-residual" + tag, horizontal_res, id_tol, Bound::upper);
  }
}

// Closed-form geodesics against the Runge-Kutta integration of the geodesic
// equations, plus constant speed and on-manifold residuals.
inline void run_geodesic_crossval(const SuiteContext& ctx, ReportBuilder& rb) {
  const double agree_tol = ctx.tol("crossval");
  const double speed_tol = ctx.tol("speed_drift");
  const double orth_tol = ctx.tol("orthonormality");
  const int ode_steps = 2000;

  for (int pass = 0; pass < 2; ++pass) {
    const int n = ctx.dims.n + 2 * pass;
    const int p = ctx.dims.p;
    const int trials = pass == 0 ? ctx.trials : ctx.stability_trials();
    const std::string tag = pass == 0 ? "" : "@n+2";

    double worst_agree = 0.0, worst_speed = 0.0, worst_orth = 0.0;
    json witness;
    for (int t = 0; t < trials; ++t) {
      CounterRng rng(ctx.seed, 2000003ull * pass + t);
      const StiefelPoint y = random_stiefel(rng, n, p);
      TangentAtStiefel v = random_tangent(rng, y);
      const double target = rng.uniform(0.2, 2.0);
      v = TangentAtStiefel(y, v.direction * (target / v.direction.norm()), 1e-8);

      for (MetricKind kind : {MetricKind::euclidean, MetricKind::canonical}) {
        const StiefelPoint closed = geodesic(y, v, 1.0, kind);
        const StiefelPoint ode = geodesic_ode(y, v, 1.0, kind, ode_steps);
        const double agree = (closed.frame - ode.frame).norm();
        if (agree > worst_agree) {
          worst_agree = agree;
          witness = json{{"Y", matrix_to_json(y.frame)},
                         {"V", matrix_to_json(v.direction)},
                         {"metric", kind == MetricKind::euclidean ? "euclidean" : "canonical"}};
        }

        const double speed0 = tangent_norm(v, kind);
        for (double tt : {0.25, 0.5, 0.75, 1.0}) {
          const GeodesicState st = geodesic_with_velocity(y, v, tt, kind);
          const TangentAtStiefel vel(st.point, st.velocity, 1e-6);
          worst_speed = std::max(worst_speed, std::abs(tangent_norm(vel, kind) - speed0));
          worst_orth = std::max(worst_orth,
                                (st.point.frame.transpose() * st.point.frame -
                                 MatrixXd::Identity(p, p))
                                    .norm());
        }
      }
    }
    rb.check("closed-vs-ode" + tag, worst_agree, agree_tol, Bound::upper, witness);
    rb.check("constant-speed-drift" + tag, worst_speed, speed_tol, Bound::upper);
    rb.check("on-manifold-residual" + tag, worst_orth, orth_tol, Bound::upper);
  }
}

// Isometric embeddings St(p, m) -> St(p, n) and Gr(p, m) -> Gr(p, n):
// embedded geodesics stay in the image subspace and metrics pull back.
inline void run_totally_geodesic(const SuiteContext& ctx, ReportBuilder& rb) {
  const double resid_tol = ctx.tol("residual");
  const double metric_tol = ctx.tol("metric_preservation");

  for (int pass = 0; pass < 2; ++pass) {
    const int n = ctx.dims.n + 2 * pass;
    const int m = ctx.dims.n / 2;
    const int p = ctx.dims.p;
    const int trials = pass == 0 ? ctx.trials : ctx.stability_trials();
    const std::string tag = pass == 0 ? "" : "@n+2";

    double st_resid = 0.0, st_metric = 0.0, gr_resid = 0.0, gr_metric = 0.0;
    json witness;
    for (int t = 0; t < trials; ++t) {
      CounterRng rng(ctx.seed, 3000003ull * pass + t);
      const MatrixXd l = detail::polar_orthonormalize(rng.gaussian(n, m));
      const MatrixXd proj_out = MatrixXd::Identity(n, n) - l * l.transpose();

      const StiefelPoint y = random_stiefel(rng, m, p);
      TangentAtStiefel v = random_tangent(rng, y);
      const double target = rng.uniform(0.3, 1.5);
      v = TangentAtStiefel(y, v.direction * (target / v.direction.norm()), 1e-8);
      const TangentAtStiefel w = random_tangent(rng, y);
      const StiefelPoint ye = embed_isometric(l, y);
      const TangentAtStiefel ve = embed_isometric(l, v);
      const TangentAtStiefel we = embed_isometric(l, w);

      for (MetricKind kind : {MetricKind::euclidean, MetricKind::canonical}) {
        st_metric = std::max(st_metric,
                             std::abs(metric(ve, we, kind) - metric(v, w, kind)));
        for (int i = 0; i <= 8; ++i) {
          const double tt = 2.0 * i / 8.0;
          const double r = (proj_out * geodesic(ye, ve, tt, kind).frame).norm();
          if (r > st_resid) {
            st_resid = r;
            witness = json{{"L", matrix_to_json(l)},
                           {"Y", matrix_to_json(y.frame)},
                           {"V", matrix_to_json(v.direction)},
                           {"t", tt}};
          }
        }
      }

      const GrassmannPoint x = random_grassmann(rng, m, p);
      HorizontalAtGrassmann xi = random_horizontal(rng, x);
      xi = HorizontalAtGrassmann(x, xi.direction * (target / xi.direction.norm()), 1e-8);
      const HorizontalAtGrassmann eta = random_horizontal(rng, x);
      const GrassmannPoint xe = grassmann_embed(l, x);
      const HorizontalAtGrassmann xie(xe, l * xi.direction, 1e-8);
      const HorizontalAtGrassmann etae(xe, l * eta.direction, 1e-8);
      gr_metric = std::max(gr_metric, std::abs(submersion_metric(xie, etae) -
                                               submersion_metric(xi, eta)));
      for (int i = 0; i <= 8; ++i) {
        const double tt = 2.0 * i / 8.0;
        gr_resid = std::max(gr_resid,
                            (proj_out * grassmann_geodesic(xe, xie, tt).basis).norm());
      }
    }
    rb.check("stiefel-out-of-subspace-residual" + tag, st_resid, resid_tol, Bound::upper, witness);
    rb.check("grassmann-out-of-subspace-residual" + tag, gr_resid, resid_tol, Bound::upper);
    rb.check("stiefel-metric-preservation" + tag, st_metric, metric_tol, Bound::upper);
    rb.check("grassmann-metric-preservation" + tag, gr_metric, metric_tol, Bound::upper);
  }
}

// exp/log roundtrips below the cut locus and log-norm vs principal-angle
// distance.
inline void run_grassmann_hopfrinow(const SuiteContext& ctx, ReportBuilder& rb) {
  const double roundtrip_tol = ctx.tol("roundtrip");
  const double norm_tol = ctx.tol("log_norm_vs_distance");

  for (int pass = 0; pass < 2; ++pass) {
    const int n = ctx.dims.n + 2 * pass;
    const int p = ctx.dims.p;
    const int trials = pass == 0 ? ctx.trials : ctx.stability_trials();
    const std::string tag = pass == 0 ? "" : "@n+2";

    double worst_roundtrip = 0.0, worst_norm = 0.0;
    int resamples = 0;
    json witness;
    for (int t = 0; t < trials; ++t) {
      CounterRng rng(ctx.seed, 4000003ull * pass + t);
      const GrassmannPoint x = random_grassmann(rng, n, p);
      for (int attempt = 0; attempt < 50; ++attempt) {
        const GrassmannPoint y = random_grassmann(rng, n, p);
        try {
          const HorizontalAtGrassmann xi = grassmann_log(x, y);
          const double rt = projector_distance(grassmann_geodesic(x, xi, 1.0), y);
          if (rt > worst_roundtrip) {
            worst_roundtrip = rt;
            witness = json{{"X", matrix_to_json(x.basis)}, {"Y", matrix_to_json(y.basis)}};
          }
          worst_norm = std::max(
              worst_norm, std::abs(horizontal_norm(xi) - grassmann_distance(x, y)));
          break;
        } catch (const CutLocusError&) {
          ++resamples;
        }
      }
    }
    rb.check("exp-log-roundtrip" + tag, worst_roundtrip, roundtrip_tol, Bound::upper, witness);
    rb.check("log-norm-vs-distance" + tag, worst_norm, norm_tol, Bound::upper);
    rb.check("cut-locus-resamples" + tag, static_cast<double>(resamples),
             static_cast<double>(trials), Bound::upper);
  }
}

// Horizontal Stiefel geodesics project onto subspace geodesics; outputs are
// representative-independent; the two tangent splits agree in both metrics.
inline void run_submersion(const SuiteContext& ctx, ReportBuilder& rb) {
  const double project_tol = ctx.tol("projection");
  const double metric_tol = ctx.tol("metric_agreement");
  const double rep_tol = ctx.tol("representative_independence");

  for (int pass = 0; pass < 2; ++pass) {
    const int n = ctx.dims.n + 2 * pass;
    const int p = ctx.dims.p;
    const int trials = pass == 0 ? ctx.trials : ctx.stability_trials();
    const std::string tag = pass == 0 ? "" : "@n+2";

    double split_orth = 0.0, metric_agree = 0.0, project_resid = 0.0, rep_resid = 0.0;
    json witness;
    for (int t = 0; t < trials; ++t) {
      CounterRng rng(ctx.seed, 5000003ull * pass + t);
      const StiefelPoint y = random_stiefel(rng, n, p);
      const TangentAtStiefel v = random_tangent(rng, y);
      const HorizontalAtGrassmann h = horizontal_project(y, v);
      const MatrixXd vertical = v.direction - h.direction;
      const TangentAtStiefel hv(y, h.direction, 1e-8);
      const TangentAtStiefel vv(y, vertical, 1e-8);
      split_orth = std::max(split_orth,
                            std::abs(metric(hv, vv, MetricKind::euclidean)));
      split_orth = std::max(split_orth,
                            std::abs(metric(hv, vv, MetricKind::canonical)));
      metric_agree = std::max(metric_agree,
                              std::abs(submersion_metric(h, h) -
                                       metric(hv, hv, MetricKind::canonical)));

      const GrassmannPoint x(y.frame);
      for (MetricKind kind : {MetricKind::euclidean, MetricKind::canonical}) {
        for (double tt : {0.25, 0.5, 0.75, 1.0}) {
          const StiefelPoint lifted = geodesic(y, hv, tt, kind);
          const GrassmannPoint projected(lifted.frame, 1e-8);
          const double r =
              projector_distance(projected, grassmann_geodesic(x, h, tt));
          if (r > project_resid) {
            project_resid = r;
            witness = json{{"Y", matrix_to_json(y.frame)},
                           {"xi", matrix_to_json(h.direction)},
                           {"t", tt}};
          }
        }
      }

      const MatrixXd a = random_orthogonal(rng, p);
      const GrassmannPoint x2(y.frame * a, 1e-8);
      const HorizontalAtGrassmann h2(x2, h.direction * a, 1e-8);
      rep_resid = std::max(rep_resid,
                           projector_distance(grassmann_geodesic(x2, h2, 0.7),
                                              grassmann_geodesic(x, h, 0.7)));
      const GrassmannPoint other = random_grassmann(rng, n, p);
      rep_resid = std::max(rep_resid, std::abs(grassmann_distance(x2, other) -
                                               grassmann_distance(x, other)));
      rep_resid = std::max(rep_resid,
                           projector_distance(involution(other, x2), involution(other, x)));
    }
    rb.check("split-orthogonality" + tag, split_orth, metric_tol, Bound::upper);
    rb.check("metric-agreement" + tag, metric_agree, metric_tol, Bound::upper);
    rb.check("geodesic-projection" + tag, project_resid, project_tol, Bound::upper, witness);
    rb.check("representative-independence" + tag, rep_resid, rep_tol, Bound::upper);
  }
}

// Geodesic reflection through a subspace: involutive isometry, fixes the
// subspace, differential -Id at the fixed point.
inline void run_involution(const SuiteContext& ctx, ReportBuilder& rb) {
  const double fix_tol = ctx.tol("fixed_point");
  const double dist_tol = ctx.tol("distance_preservation");

  for (int pass = 0; pass < 2; ++pass) {
    const int n = ctx.dims.n + 2 * pass;
    const int p = ctx.dims.p;
    const int trials = pass == 0 ? ctx.trials : ctx.stability_trials();
    const std::string tag = pass == 0 ? "" : "@n+2";

    double fix_resid = 0.0, invol_sq = 0.0, dist_resid = 0.0, diff_resid = 0.0,
           perp_resid = 0.0;
    json witness;
    for (int t = 0; t < trials; ++t) {
      CounterRng rng(ctx.seed, 6000003ull * pass + t);
      const GrassmannPoint w = random_grassmann(rng, n, p);
      const GrassmannPoint x = random_grassmann(rng, n, p);
      const GrassmannPoint y = random_grassmann(rng, n, p);

      const double fr = projector_distance(involution(w, w), w);
      if (fr > fix_resid) {
        fix_resid = fr;
        witness = json{{"W", matrix_to_json(w.basis)}};
      }
      invol_sq = std::max(invol_sq, projector_distance(involution(w, involution(w, x)), x));
      dist_resid = std::max(dist_resid,
                            std::abs(grassmann_distance(involution(w, x), involution(w, y)) -
                                     grassmann_distance(x, y)));

      // (d sigma_W)_W = -Id along geodesics through W
      const HorizontalAtGrassmann xi = random_horizontal(rng, w);
      for (double h : {1e-2, 1e-3}) {
        const double r = projector_distance(involution(w, grassmann_geodesic(w, xi, h)),
                                            grassmann_geodesic(w, xi, -h));
        diff_resid = std::max(diff_resid, r / (h * h));
      }

      // subspaces of the complement are fixed
      const MatrixXd comp = orthogonal_complement(w.basis);
      const GrassmannPoint inside(comp.leftCols(p), 1e-8);
      perp_resid = std::max(perp_resid, projector_distance(involution(w, inside), inside));
    }
    rb.check("fixes-center" + tag, fix_resid, fix_tol, Bound::upper, witness);
    rb.check("involution-squared" + tag, invol_sq, fix_tol, Bound::upper);
    rb.check("distance-preservation" + tag, dist_resid, dist_tol, Bound::upper);
    rb.check("differential-minus-id" + tag, diff_resid, 1.0, Bound::upper);
    rb.check("fixes-complement-subspaces" + tag, perp_resid, fix_tol, Bound::upper);
  }
}

// Canonical-metric sectional curvature: nonnegative, nonconstant for p >= 2,
// submersion evaluation vs geodesic-deviation estimates, unit-sphere value
// at p = 1 (this pins the submersion metric scale).
inline void run_curvature_sign(const SuiteContext& ctx, ReportBuilder& rb) {
  const double nonneg_floor = ctx.tol("nonnegativity_floor");
  const double spread_min = ctx.tol("nonconstancy_spread");
  const double fd_tol = ctx.tol("jacobi_agreement");

  std::vector<std::pair<int, int>> pairs;  // (p, n)
  if (ctx.dims.p > 0 && ctx.dims.n > 0) {
    pairs = {{ctx.dims.p, ctx.dims.n}};
  } else {
    pairs = {{2, 4}, {2, 6}, {3, 6}};
  }

  double fd_resid = 0.0;
  json fd_witness;
  for (const auto& [p, n] : pairs) {
    double kmin = 1e300, kmax = -1e300;
    json witness;
    for (int t = 0; t < ctx.trials; ++t) {
      CounterRng rng(ctx.seed, 7000003ull * p + 13ull * n + 1000ull * t);
      const StiefelPoint y = random_stiefel(rng, n, p, MetricKind::canonical);
      const TangentAtStiefel v = random_tangent(rng, y);
      const TangentAtStiefel w = random_tangent(rng, y);
      double kk = 0.0;
      try {
        kk = sectional_curvature_canonical(y, v, w);
      } catch (const std::invalid_argument&) {
        continue;  // degenerate plane
      }
      if (kk < kmin) {
        kmin = kk;
        witness = json{{"Y", matrix_to_json(y.frame)},
                       {"V", matrix_to_json(v.direction)},
                       {"W", matrix_to_json(w.direction)}};
      }
      kmax = std::max(kmax, kk);

      if (t < 17) {
        const double fd = sectional_curvature_jacobi_fd(y, v, w);
        const double r = std::abs(kk - fd);
        if (r > fd_resid) {
          fd_resid = r;
          fd_witness = witness;
        }
      }
    }
    const std::string tag = "(p=" + std::to_string(p) + ",n=" + std::to_string(n) + ")";
    rb.check("min-curvature" + tag, kmin, nonneg_floor, Bound::lower, witness);
    rb.check("curvature-spread" + tag, kmax - kmin, spread_min, Bound::lower);
  }
  rb.check("oneill-vs-jacobi-fd", fd_resid, fd_tol, Bound::upper, fd_witness);

  // p = 1: every plane carries the unit-sphere curvature.
  double sphere_resid = 0.0;
  for (int t = 0; t < 100; ++t) {
    CounterRng rng(ctx.seed, 8000003ull + t);
    const StiefelPoint y = random_stiefel(rng, 6, 1, MetricKind::canonical);
    const TangentAtStiefel v = random_tangent(rng, y);
    const TangentAtStiefel w = random_tangent(rng, y);
    try {
      sphere_resid = std::max(sphere_resid,
                              std::abs(sectional_curvature_canonical(y, v, w) - 1.0));
    } catch (const std::invalid_argument&) {
      continue;
    }
  }
  rb.check("p1-sphere-normalization", sphere_resid, 1e-9, Bound::upper);
}

// Holomorphic sectional curvature of complex Grassmannians: values fill
// [2/p, 2] (normalization with projective-line value 2), both ends attained,
// scale-invariant, and consistent with geodesic-deviation estimates.
inline void run_kaehler_bounds(const SuiteContext& ctx, ReportBuilder& rb) {
  const double slack = ctx.tol("bound_slack");
  const double scale_tol = ctx.tol("scaling_invariance");
  const double fd_tol = ctx.tol("jacobi_agreement");

  std::vector<int> ps;
  if (ctx.dims.p > 0) {
    ps = {ctx.dims.p};
  } else {
    ps = {1, 2, 3};
  }

  for (int p : ps) {
    for (int pass = 0; pass < 2; ++pass) {
      const int n = (ctx.dims.n > 0 ? ctx.dims.n : 2 * p + 2) + 2 * pass;
      const int trials = pass == 0 ? ctx.trials : ctx.stability_trials();
      const std::string tag = "(p=" + std::to_string(p) + ")" + (pass == 0 ? "" : "@n+2");

      double kmin = 1e300, kmax = -1e300, scale_resid = 0.0, fd_resid = 0.0;
      json witness;
      for (int t = 0; t < trials; ++t) {
        CounterRng rng(ctx.seed, 9000003ull * p + 4000ull * pass + t);
        const ComplexGrassmannPoint x = random_complex_grassmann(rng, n, p);
        const MatrixXcd big_x = random_complex_horizontal(rng, x);
        const double kk = holomorphic_sectional_curvature(x, big_x);
        if (kk < kmin || kk > kmax) {
          witness = json{{"X_basis", matrix_to_json(x.basis)},
                         {"X_dir", matrix_to_json(big_x)}};
        }
        kmin = std::min(kmin, kk);
        kmax = std::max(kmax, kk);

        if (t % 100 == 0) {
          for (double c : {2.0, 10.0}) {
            scale_resid = std::max(
                scale_resid, std::abs(holomorphic_sectional_curvature(x, c * big_x) - kk));
          }
        }
        if (pass == 0 && t < 8) {
          const double fd = holomorphic_curvature_jacobi_fd(x, big_x);
          fd_resid = std::max(fd_resid, std::abs(kk - 0.5 * fd));
        }
      }
      rb.check("min-curvature" + tag, kmin, 2.0 / p - slack, Bound::lower, witness);
      rb.check("max-curvature" + tag, kmax, 2.0 + slack, Bound::upper, witness);
      if (p == 1)
        rb.check("p1-constant-two" + tag, std::max(std::abs(kmin - 2.0), std::abs(kmax - 2.0)),
                 slack, Bound::upper);
      rb.check("scaling-invariance" + tag, scale_resid, scale_tol, Bound::upper);
      if (pass == 0) rb.check("closed-vs-jacobi-fd" + tag, fd_resid, fd_tol, Bound::upper);
    }

    // explicit witnesses for both ends at p >= 2
    if (p >= 2) {
      const int n = 2 * p + 2;
      MatrixXcd basis = MatrixXcd::Zero(n, p);
      for (int i = 0; i < p; ++i) basis(i, i) = 1.0;
      const ComplexGrassmannPoint x0(basis);
      MatrixXcd rank_one = MatrixXcd::Zero(n, p);
      rank_one(p, 0) = 1.0;
      MatrixXcd balanced = MatrixXcd::Zero(n, p);
      for (int i = 0; i < p; ++i) balanced(p + i, i) = 1.0;
      const std::string tag = "(p=" + std::to_string(p) + ")";
      rb.check("upper-end-witness" + tag, holomorphic_sectional_curvature(x0, rank_one),
               2.0 - slack, Bound::lower);
      rb.check("lower-end-witness" + tag, holomorphic_sectional_curvature(x0, balanced),
               2.0 / p + slack, Bound::upper);
    }
  }
}

}  // namespace manifolds::verify
