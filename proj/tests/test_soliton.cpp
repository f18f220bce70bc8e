#include <doctest.h>

#include <cmath>
#include <random>

#include "soliton_forge/curvature.hpp"
#include "soliton_forge/errors.hpp"
#include "soliton_forge/example_manifold.hpp"
#include "soliton_forge/soliton.hpp"
#include "support.hpp"

using namespace sforge;

namespace {

const Point unit3{1.0, 1.0, 1.0};
const double s3 = std::sqrt(3.0);

TensorField zero_vector(int dim) { return constant_field(zeros({1, 0}, dim)); }

}  // namespace

TEST_CASE("torse-forming detection") {
  SUBCASE("k = 2, l = ln t at (1,1,1): f = 2, gamma = -dt") {
    const auto e = build_example(1, EllProfile::log(), 2.0);
    const auto r = detect_torse_forming(e.transformed, e.potential(), unit3, 1e-10);
    CHECK(r.is_torse_forming);
    CHECK_FALSE(r.trivial);
    CHECK(r.f == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(r.k == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::abs(r.gamma[0]) <= 1e-12);
    CHECK(std::abs(r.gamma[1]) <= 1e-12);
    CHECK(r.gamma[2] == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(r.residual <= 1e-10);
  }
  SUBCASE("parallel constant field on the flat base is trivial") {
    const auto e = build_example(1, EllProfile::log(), 1.0);
    auto v = zeros({1, 0}, 3);
    v(0) = 1.0;
    v(1) = -2.0;
    const auto r = detect_torse_forming(e.base, constant_field(v), Point{0.5, 1.5, 2.0}, 1e-10);
    CHECK(r.is_torse_forming);
    CHECK(r.trivial);
    CHECK(r.f == 0.0);
    for (double x : r.gamma) CHECK(x == 0.0);
  }
  SUBCASE("scaled_log, k = 1, t = 2: f = (1 + sqrt 3)/4") {
    const auto e = build_example(1, EllProfile::scaled_log(), 1.0);
    const auto r = detect_torse_forming(e.transformed, e.potential(), Point{1.0, 1.0, 2.0}, 1e-10);
    CHECK(r.f == doctest::Approx((1.0 + s3) / 4.0).epsilon(1e-12));
  }
  SUBCASE("vanishing potential is a degeneracy") {
    const auto e = build_example(1, EllProfile::log(), 1.0);
    CHECK_THROWS_AS(detect_torse_forming(e.transformed, zero_vector(3), unit3, 1e-10), DegeneracyError);
  }
  SUBCASE("a field that is not torse-forming is rejected") {
    // x^1 d/dx1 + x^2 d/dx2 on the flat base: nabla = diag(1, 1, 0) has rank 2
    const auto e = build_example(1, EllProfile::log(), 1.0);
    TensorField w = [](CoordinateJets x) {
      Tensor<Jet3> out({1, 0}, 3, Jet3(3));
      out(0) = x[0];
      out(1) = x[1];
      return out;
    };
    const auto r = detect_torse_forming(e.base, w, Point{1.0, 1.0, 1.0}, 1e-8);
    CHECK_FALSE(r.is_torse_forming);
    CHECK(r.residual > 0.1);
  }
}

TEST_CASE("gamma + (f/k) eta = 0 and f = k l' for every preset, n and k") {
  for (int n = 1; n <= 3; ++n)
    for (double k : {1.0, 2.0, -1.0})
      for (const auto& [name, make] : testing::presets()) {
        CAPTURE(name);
        CAPTURE(n);
        CAPTURE(k);
        const auto e = build_example(n, make(k, n), k);
        for (const auto& p : default_grid(e, 8)) {
          const auto r = detect_torse_forming(e.transformed, e.potential(), p, 1e-8);
          const double t = p[2 * n];
          CHECK(r.is_torse_forming);
          CHECK(testing::rel_err(r.f, k * e.profile.first(t)) <= 1e-8);
          LocalGeometry geo(e.transformed, p);
          for (int a = 0; a < 2 * n + 1; ++a)
            CHECK(std::abs(r.gamma[static_cast<std::size_t>(a)] + r.f / k * geo.eta()(a)) <= 1e-8);
        }
      }
}

TEST_CASE("regularity") {
  SUBCASE("scaled_log, k = 1, t = 1: value 1/2, regular") {
    const auto e = build_example(1, EllProfile::scaled_log(), 1.0);
    const auto r = regularity(e.transformed, e.potential(), unit3, 1e-6);
    CHECK(r.is_regular);
    CHECK(r.kdfxi_plus_f2 == doctest::Approx(0.5).epsilon(1e-8));
    CHECK(r.route_spread <= 1e-8);
  }
  SUBCASE("scaled_log matches k^2/(2t^2) for several k and t") {
    for (double k : {1.0, 2.0, -1.0}) {
      const auto e = build_example(2, EllProfile::scaled_log(), k);
      for (const auto& p : default_grid(e, 6)) {
        const double t = p[4];
        const auto r = regularity(e.transformed, e.potential(), p, 1e-6);
        CHECK(r.is_regular);
        CHECK(std::abs(r.kdfxi_plus_f2 - k * k / (2 * t * t)) <= 1e-6);
      }
    }
  }
  SUBCASE("l = ln t: value 0, non-regular") {
    const auto e = build_example(1, EllProfile::log(), 1.0);
    for (const auto& p : default_grid(e, 9)) {
      const auto r = regularity(e.transformed, e.potential(), p, 1e-6);
      CHECK_FALSE(r.is_regular);
      CHECK(std::abs(r.kdfxi_plus_f2) <= 1e-6);
    }
  }
  SUBCASE("linear profile: constant f = alpha, value alpha^2") {
    const auto e = build_example(1, EllProfile::linear(0.7), 1.0);
    const auto r = regularity(e.transformed, e.potential(), unit3, 1e-6);
    CHECK(r.is_regular);
    CHECK(r.f == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(std::abs(r.df_xi) <= 1e-8);
    CHECK(r.kdfxi_plus_f2 == doctest::Approx(0.49).epsilon(1e-8));
  }
}

TEST_CASE("Einstein-like fit") {
  SUBCASE("l = ln t at (1,1,1): (-1, 0, 1)") {
    const auto e = build_example(1, EllProfile::log(), 1.0);
    const auto r = einstein_like_fit(e.transformed, unit3, 1e-9);
    CHECK(r.almost_einstein_like);
    CHECK(r.almost_eta_einstein);
    CHECK_FALSE(r.almost_einstein);
    CHECK(r.fit.coeffs[0] == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(std::abs(r.fit.coeffs[1]) <= 1e-10);
    CHECK(r.fit.coeffs[2] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(r.fit.residual <= 1e-9);
  }
  SUBCASE("linear profile: (-2, 0, 0), Einstein") {
    const auto e = build_example(1, EllProfile::linear(), 1.0);
    for (const auto& p : default_grid(e, 9)) {
      const auto r = einstein_like_fit(e.transformed, p, 1e-9);
      CHECK(r.almost_einstein);
      CHECK(r.fit.coeffs[0] == doctest::Approx(-2.0).epsilon(1e-10));
      CHECK(std::abs(r.fit.coeffs[2]) <= 1e-10);
    }
  }
  SUBCASE("flat base: zero with residual 0") {
    const auto e = build_example(1, EllProfile::log(), 1.0);
    const auto r = einstein_like_fit(e.base, unit3, 1e-9);
    for (double c : r.fit.coeffs) CHECK(c == 0.0);
    CHECK(r.fit.residual == 0.0);
  }
  SUBCASE("exact coefficients recovered from a synthetic target") {
    const auto e = build_example(1, EllProfile::scaled_log(), 1.0);
    LocalGeometry geo(e.transformed, Point{0.4, -1.3, 0.8});
    const auto gt = associated_metric_values(geo);
    TensorComponents target = zeros({0, 2}, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        target(i, j) = 0.25 * geo.metric()(i, j) - 3.0 * gt(i, j) + 1.5 * geo.eta()(i) * geo.eta()(j);
    const auto fit = fit_span(geo, target);
    CHECK(fit.coeffs[0] == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(fit.coeffs[1] == doctest::Approx(-3.0).epsilon(1e-12));
    CHECK(fit.coeffs[2] == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(fit.residual <= 1e-13);
    target(0, 2) += 1.0;
    target(2, 0) += 1.0;
    CHECK(fit_span(geo, target).residual > 0.1);
  }
}

TEST_CASE("soliton fit") {
  SUBCASE("scaled_log at (1,1,1): (1, 0, 0), expanding Ricci soliton") {
    const auto e = build_example(1, EllProfile::scaled_log(), 1.0);
    const auto r = soliton_fit(e.transformed, e.potential(), unit3, 1e-9);
    CHECK(r.almost_ricci_like);
    CHECK(r.almost_eta_ricci);
    CHECK(r.almost_ricci);
    CHECK(r.kind == SolitonKind::expanding);
    CHECK(r.fit.coeffs[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(r.fit.coeffs[1]) <= 1e-10);
    CHECK(std::abs(r.fit.coeffs[2]) <= 1e-10);
  }
  SUBCASE("linear profile: (1, 0, 1) on the whole grid") {
    const auto e = build_example(1, EllProfile::linear(), 1.0);
    for (const auto& p : default_grid(e, 27)) {
      const auto r = soliton_fit(e.transformed, e.potential(), p, 1e-9);
      CHECK(r.almost_eta_ricci);
      CHECK_FALSE(r.almost_ricci);
      CHECK(r.fit.coeffs[0] == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(r.fit.coeffs[2] == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
  SUBCASE("flat base, zero potential: (0, 0, 0), steady") {
    const auto e = build_example(1, EllProfile::log(), 1.0);
    const auto r = soliton_fit(e.base, zero_vector(3), unit3, 1e-9);
    for (double c : r.fit.coeffs) CHECK(c == 0.0);
    CHECK(r.kind == SolitonKind::steady);
    CHECK(to_string(SolitonKind::shrinking) == "shrinking");
  }
}

TEST_CASE("coefficient relations") {
  SUBCASE("scaled_log, t = 1: a + lambda + f = 0 and lambda + mu + nu = 1") {
    const double f = (1 + s3) / 2, fp = -(1 + s3) / 2;
    const std::array<double, 3> abc{-(3 + s3) / 2, 0.0, (1 + s3) / 2};
    const std::array<double, 3> lmn{1.0, 0.0, 0.0};
    const auto r = verify_thm32(abc, lmn, f, 1.0, fp, 1, 1e-12);
    CHECK(r.pass);
    CHECK(r.residual("a+lambda+f") <= 1e-15);
    CHECK(r.residual("sum_lmn-regularity") <= 1e-15);
  }
  SUBCASE("l = ln t: lambda + mu + nu = 0 = -(a + b + c)") {
    const auto r = verify_thm32({-1.0, 0.0, 1.0}, {0.0, 0.0, 0.0}, 1.0, 1.0, -1.0, 1, 1e-12);
    CHECK(r.pass);
    CHECK(r.residual("sum_lmn+sum_abc") == 0.0);
  }
  SUBCASE("linear: c + nu - f = 0") {
    const auto r = verify_thm32({-2.0, 0.0, 0.0}, {1.0, 0.0, 1.0}, 1.0, 1.0, 0.0, 1, 1e-12);
    CHECK(r.pass);
    CHECK(r.residual("c+nu-f") == 0.0);
    CHECK(r.residuals.size() == 5);
  }
  SUBCASE("perturbed triples fail on the right relation") {
    auto r = verify_thm32({-2.0, 0.0, 0.0}, {1.0, 0.1, 1.0}, 1.0, 1.0, 0.0, 1, 1e-8);
    CHECK_FALSE(r.pass);
    CHECK(r.residual("b+mu") == doctest::Approx(0.1));
    CHECK(r.residual("a+lambda+f") == 0.0);
    r = verify_thm32({-2.0, 0.0, 0.0}, {1.0, 0.0, 1.0}, 1.0, 1.0, 0.5, 1, 1e-8);
    CHECK_FALSE(r.pass);
    CHECK(r.residual("sum_lmn-regularity") == doctest::Approx(1.0));
  }
}

TEST_CASE("ODE and xi-section relations") {
  SUBCASE("scaled_log, t = 1: both sides from closed forms agree") {
    const double f = (1 + s3) / 2, fp = -(1 + s3) / 2;
    const int n = 1;
    const double tau = -(2.0 * n) * (2 * fp + (2 * n + 1) * f * f);
    const double a = -(fp + 2 * n * f * f);
    Cor35Input in;
    in.f = f;
    in.f_prime = fp;
    in.a = a;
    in.tau = tau;
    in.K_xi = tau / (2 * n) - a;
    const auto r = verify_cor35(in, 1e-9);
    CHECK(r.pass);
    CHECK(r.residual("ode") <= 1e-12);
    CHECK(r.residual("K_xi") <= 1e-12);
  }
  SUBCASE("l = ln t: K_xi = -1 - (-1) = 0") {
    Cor35Input in;
    in.f = 1.0;
    in.f_prime = -1.0;
    in.a = -1.0;
    in.tau = -2.0;
    in.K_xi = 0.0;
    CHECK(verify_cor35(in, 1e-12).pass);
    in.K_xi = 0.3;
    const auto bad = verify_cor35(in, 1e-12);
    CHECK_FALSE(bad.pass);
    CHECK(bad.residual("K_xi") == doctest::Approx(0.3));
  }
  SUBCASE("missing K_xi is reported, not failed") {
    Cor35Input in;
    in.f = 1.0;
    in.f_prime = -1.0;
    in.a = -1.0;
    in.tau = -2.0;
    const auto r = verify_cor35(in, 1e-12);
    CHECK(r.pass);
    CHECK_FALSE(r.notices.empty());
  }
  SUBCASE("horizontal gradient of f vanishes for every preset") {
    for (const auto& [name, make] : testing::presets())
      for (int n = 1; n <= 2; ++n) {
        const auto e = build_example(n, make(1.0, n), 1.0);
        for (const auto& p : default_grid(e, 4)) {
          LocalGeometry geo(e.transformed, p);
          const auto tf = torse_forming_jet(geo, e.potential(), 1e-8);
          CHECK(horizontal_gradient(tf, geo) <= 1e-9);
        }
      }
  }
}

TEST_CASE("curvature equalities for a vertical torse-forming potential") {
  SUBCASE("l = ln t, t = 1: rho(xi, xi) = 0 and R(x, xi) xi = 0") {
    const auto e = build_example(1, EllProfile::log(), 1.0);
    LocalGeometry geo(e.transformed, unit3);
    const auto r = thm22_curvature_checks(geo, e.potential(), 1e-8);
    CHECK(r.pass);
    CHECK(std::abs(geo.ricci()(2, 2)) <= 1e-10);
    for (int x = 0; x < 3; ++x)
      for (int w = 0; w < 3; ++w) CHECK(std::abs(geo.riemann()(w, x, 2, 2)) <= 1e-10);
  }
  SUBCASE("scaled_log, t = 1: rho(xi, xi) = -1") {
    const auto e = build_example(1, EllProfile::scaled_log(), 1.0);
    LocalGeometry geo(e.transformed, unit3);
    CHECK(geo.ricci()(2, 2) == doctest::Approx(-1.0).epsilon(1e-10));
    const auto r = thm22_curvature_checks(geo, e.potential(), 1e-8);
    CHECK(r.pass);
    CHECK(r.worst() <= 1e-9);
  }
  SUBCASE("flat base with parallel xi: every residual is zero") {
    const auto e = build_example(1, EllProfile::log(), 1.0);
    const auto r = thm22_curvature_checks(e.base, vertical_potential(e.base, 1.0), Point{0.5, 1.5, 2.0}, 1e-8);
    CHECK(r.pass);
    CHECK(r.worst() == 0.0);
  }
  SUBCASE("all presets, n = 1..3, k in {1, 2, -1}") {
    for (int n = 1; n <= 3; ++n)
      for (double k : {1.0, 2.0, -1.0})
        for (const auto& [name, make] : testing::presets()) {
          const auto e = build_example(n, make(k, n), k);
          for (const auto& p : default_grid(e, 3)) {
            CAPTURE(name);
            CAPTURE(n);
            const auto r = thm22_curvature_checks(e.transformed, e.potential(), p, 1e-8);
            CHECK(r.pass);
          }
        }
  }
  SUBCASE("K(xi, x) does not depend on x") {
    const auto e = build_example(2, EllProfile::exponential(1.0, 1.0, 2), 1.0);
    LocalGeometry geo(e.transformed, default_grid(e, 5)[3]);
    const auto sweep = xi_sections(geo, random_directions(5, 10, 7));
    CHECK(sweep.values.size() + static_cast<std::size_t>(sweep.skipped_degenerate) == 10);
    CHECK(sweep.values.size() >= 8);
    CHECK(sweep.spread() <= 1e-9);
  }
}

TEST_CASE("fit properties over the n = 1 family") {
  for (double k : {1.0, 2.0, -1.0})
    for (const auto& [name, make] : testing::presets()) {
      CAPTURE(name);
      CAPTURE(k);
      const auto e = build_example(1, make(k, 1), k);
      for (const auto& p : default_grid(e, 9)) {
        LocalGeometry geo(e.transformed, p);
        const auto el = einstein_like_fit(geo, 1e-8);
        const auto sf = soliton_fit(geo, e.potential(), 1e-8);
        const auto reg = regularity(e.transformed, e.potential(), p, 1e-6);
        // fits succeed together
        CHECK(el.almost_einstein_like == sf.almost_ricci_like);
        const auto& abc = el.fit.coeffs;
        const auto& lmn = sf.fit.coeffs;
        CHECK(reg.is_regular == (std::abs(abc[0] + abc[1] + abc[2]) > 1e-6));
        CHECK(reg.is_regular == (std::abs(lmn[0] + lmn[1] + lmn[2]) > 1e-6));
        CHECK(verify_thm32(abc, lmn, reg.f, k, reg.df_xi, 1, 1e-6).pass);
      }
    }
}

TEST_CASE("mu = -b for every n") {
  std::mt19937 rng(31);
  for (int n = 1; n <= 3; ++n)
    for (const auto& [name, make] : testing::presets()) {
      const auto e = build_example(n, make(1.0, n), 1.0);
      for (int trial = 0; trial < 2; ++trial) {
        LocalGeometry geo(e.transformed, testing::random_point(n, rng));
        const double b = einstein_like_fit(geo, 1e-8).fit.coeffs[1];
        const double mu = soliton_fit(geo, e.potential(), 1e-8).fit.coeffs[1];
        CHECK(std::abs(b + mu) <= 1e-10 * std::max(1.0, std::abs(b)));
      }
    }
}

TEST_CASE("parallel symmetric tensors") {
  SUBCASE("h = 5 g is parallel with multiple 5") {
    for (const auto& [name, make] : testing::presets()) {
      const auto e = build_example(1, make(1.0, 1), 1.0);
      const auto r = parallel_check(e.transformed, metric_multiple(5.0), default_grid(e, 6), 1e-9);
      CHECK(r.is_parallel);
      REQUIRE(r.constant_multiple.has_value());
      CHECK(*r.constant_multiple == doctest::Approx(5.0).epsilon(1e-12));
    }
  }
  SUBCASE("linear profile: h = -g, lambda + mu + nu = 2 = 2n f^2") {
    const auto e = build_example(1, EllProfile::linear(), 1.0);
    const auto grid = default_grid(e, 27);
    const auto h = soliton_tensor(e.potential(), constant_scalar(0.0), constant_scalar(1.0));
    const auto r = parallel_check(e.transformed, h, grid, 1e-7);
    CHECK(r.is_parallel);
    CHECK(r.max_nabla_norm <= 1e-7);
    REQUIRE(r.constant_multiple.has_value());
    CHECK(*r.constant_multiple == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(r.h_curvature_xi <= 1e-9);
    CHECK(r.h_vertical <= 1e-9);
    // triple: parallel h, constant lambda from the fit, a + b + c = -(lambda + mu + nu)
    const double lambda = -*r.constant_multiple;
    for (const auto& p : grid) {
      const auto sf = soliton_fit(e.transformed, e.potential(), p, 1e-8);
      const auto el = einstein_like_fit(e.transformed, p, 1e-8);
      const double sum = sf.fit.coeffs[0] + sf.fit.coeffs[1] + sf.fit.coeffs[2];
      CHECK(sf.fit.coeffs[0] == doctest::Approx(lambda).epsilon(1e-10));
      CHECK(sum == doctest::Approx(2.0).epsilon(1e-10));
      CHECK(el.fit.coeffs[0] + el.fit.coeffs[1] + el.fit.coeffs[2] == doctest::Approx(-sum).epsilon(1e-10));
    }
  }
  SUBCASE("scaled_log: the same combination is not parallel") {
    const auto e = build_example(1, EllProfile::scaled_log(), 1.0);
    const auto h = soliton_tensor(e.potential(), constant_scalar(0.0), conformal_scalar(e.potential()));
    const auto r = parallel_check(e.transformed, h, default_grid(e, 9), 1e-7);
    CHECK_FALSE(r.is_parallel);
    CHECK(r.max_nabla_norm > 1e-3);
    CHECK_FALSE(r.constant_multiple.has_value());
  }
}
