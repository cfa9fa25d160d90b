#include "octo/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <initializer_list>
#include <string>

#include "octo/calculus.hpp"
#include "octo/error.hpp"
#include "octo/norm.hpp"
#include "octo/serialize.hpp"
#include "rng.hpp"

namespace octo {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;
using detail::Rng;

constexpr std::size_t kRetries = 64;

json num(Real v) { return static_cast<double>(v); }

json num_array(const std::vector<Real>& values) {
  json out = json::array();
  for (Real v : values) out.push_back(num(v));
  return out;
}

/// Collects evaluations of one inequality written as excess = lhs - rhs <= tolerance.
class Tally {
 public:
  Tally(std::string name, Real tolerance) {
    sub_.name = std::move(name);
    sub_.tolerance = tolerance;
  }

  void record(Real excess, const std::function<json()>& witness) {
    ++sub_.evaluations;
    if (std::isnan(excess)) excess = INFINITY;
    if (excess > sub_.tolerance) ++sub_.violations;
    if (sub_.evaluations == 1 || excess > sub_.worst_violation) {
      sub_.worst_violation = excess;
      sub_.worst_witness = witness();
    }
  }

  const SubCheck& result() const { return sub_; }

 private:
  SubCheck sub_;
};

Real pick_tol(const VerifyOptions& options, Real fallback) { return options.tol.value_or(fallback); }

std::size_t pick_samples(const VerifyOptions& options, std::size_t fallback) {
  return options.samples == 0 ? fallback : options.samples;
}

void validate(const TowerSpace& space, const VerifyOptions& options) {
  if (options.tol && !(*options.tol > 0 && std::isfinite(*options.tol))) {
    throw Error(ErrorCode::invalid_argument, "verification tolerance must be positive");
  }
  if (options.max_degree < 2) {
    throw Error(ErrorCode::invalid_argument, "max_degree must be at least 2");
  }
  if (space.max_level() < 2) {
    throw Error(ErrorCode::schedule_invalid, "verification needs at least two levels");
  }
}

std::size_t degree_cap(const TowerSpace& space, const VerifyOptions& options) {
  return std::min(options.max_degree, space.max_level());
}

Real norm_at(const TowerSpace& space, const TowerVector& x, std::size_t n) {
  return level_norm(space, x, n).value;
}

/// Generic draw, optionally sparsified; never returns the zero vector.
TowerVector draw(const TowerSpace& space, std::size_t degree, Rng& rng, bool sparse,
                 SampleStyle style = SampleStyle::generic, const SampleParams& params = {}) {
  TowerVector x = random_vector(space, degree, style, rng.bits(), params);
  if (sparse) {
    for (Real& c : x.coords) {
      if (rng.index(0, 2) == 0) c = 0;
    }
    if (rng.index(0, 3) == 0) std::fill(x.base.begin(), x.base.end(), Real(0));
  }
  if (x.is_zero()) x = TowerVector::unit(space.base().dim, std::max<std::size_t>(degree, 1));
  return x;
}

TowerVector normalized(const TowerSpace& space, const TowerVector& x, std::size_t n) {
  return scaled(1 / norm_at(space, x, n), x);
}

std::uint64_t check_seed(const VerifyOptions& options, std::uint64_t check_id) {
  return detail::derive_seed(options.seed, check_id);
}

class Report {
 public:
  explicit Report(std::string name, Real tolerance) : start_(Clock::now()) {
    report_.check_name = std::move(name);
    report_.tolerance = tolerance;
  }

  VerificationReport& get() { return report_; }

  VerificationReport finish(std::initializer_list<const Tally*> tallies) {
    Real best_margin = -INFINITY;
    for (const Tally* t : tallies) {
      const SubCheck& sub = t->result();
      report_.sub_checks.push_back(sub);
      report_.violations += sub.violations;
      if (sub.evaluations == 0) continue;
      const Real margin = sub.worst_violation - sub.tolerance;
      if (margin > best_margin || report_.worst_witness.is_null()) {
        best_margin = margin;
        report_.worst_violation = sub.worst_violation;
        report_.worst_witness = sub.worst_witness;
        report_.worst_witness["sub_check"] = sub.name;
        report_.worst_witness["sub_tolerance"] = num(sub.tolerance);
      }
    }
    report_.passed = report_.violations == 0;
    report_.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start_)
                             .count();
    return std::move(report_);
  }

 private:
  VerificationReport report_;
  Clock::time_point start_;
};

struct Certification {
  std::size_t attempts = 0;
  std::size_t accepted = 0;
  json rejected = json::object();

  void reject(const std::string& reason) {
    ++attempts;
    rejected[reason] = rejected.value(reason, 0) + 1;
  }
  void accept() {
    ++attempts;
    ++accepted;
  }
  json to_json() const {
    return {{"attempts", attempts}, {"accepted", accepted}, {"rejected", rejected}};
  }
};

}  // namespace

// ---------------------------------------------------------------------------

VerificationReport verify_shape(const TowerSpace& space, const VerifyOptions& options) {
  validate(space, options);
  const Real tol = pick_tol(options, 1e-12L);
  Report report("shape", tol);
  Tally sandwich("sandwich", tol), junctions("junctions", tol), convexity("convexity", tol),
      monotone("monotone", tol), endpoints("endpoints", tol);

  constexpr std::size_t grid = 10001;
  const std::size_t levels = std::min(pick_samples(options, space.max_level()), space.max_level());
  for (std::size_t n = 1; n <= levels; ++n) {
    const ShapeFn& f = space.schedule().shape(n);
    auto at = [n](Real t) { return [n, t] { return json{{"level", n}, {"t", num(t)}}; }; };
    sandwich.record(sandwich_violation(f, grid), at(-1));
    junctions.record(junction_mismatch(f), at(-1));
    endpoints.record(std::max(std::fabs(f.value(f.z)), std::fabs(f.value(1) - 1)), at(f.z));

    Real prev = f.value(0), cur = f.value(Real(1) / (grid - 1));
    monotone.record(prev - cur, at(0));
    for (std::size_t i = 2; i < grid; ++i) {
      const Real t = static_cast<Real>(i) / (grid - 1);
      const Real next = f.value(t);
      monotone.record(cur - next, at(t));
      convexity.record(-(prev - 2 * cur + next), at(t));
      prev = cur;
      cur = next;
    }
  }
  report.get().samples = levels;
  report.get().details = {{"grid_size", grid}, {"levels_checked", levels}};
  return report.finish({&sandwich, &junctions, &convexity, &monotone, &endpoints});
}

// ---------------------------------------------------------------------------

VerificationReport verify_structure(const TowerSpace& space, const VerifyOptions& options) {
  validate(space, options);
  const Real tol = pick_tol(options, 1e-10L);
  const Real oracle_tol = pick_tol(options, 1e-8L);
  Report report("structure", tol);
  Tally monotone("projection_monotonicity", tol), flat("flat_region_invariance", tol),
      growth("growth_past_flat_region", 0), oracle("oracle_equivalence", oracle_tol),
      homogeneity("homogeneity", tol), triangle("triangle_inequality", tol),
      midpoint("midpoint_convexity", tol), symmetry("sign_symmetry", tol);

  const std::size_t samples = pick_samples(options, 1000);
  const std::size_t cap = degree_cap(space, options);
  const std::uint64_t seed = check_seed(options, 2);
  const std::size_t dim = space.base().dim;
  const Tolerances oracle_solver{1e-13L, space.tol().max_iterations};

  for (std::size_t i = 0; i < samples; ++i) {
    Rng rng(detail::derive_seed(seed, i));
    const std::size_t d = rng.index(1, cap);
    const bool sparse = i % 2 == 1;
    const TowerVector x = draw(space, d, rng, sparse);
    const TowerVector y = draw(space, d, rng, sparse);
    auto wx = [&](json extra = json::object()) {
      return [&, extra] {
        json w = {{"x", vector_to_json(x)}, {"level", d}};
        w.update(extra);
        return w;
      };
    };

    const LevelNormResult rx = level_norm(space, x, d);
    for (std::size_t k = 0; k < d; ++k) {
      monotone.record((rx.per_level[k] - rx.per_level[k + 1]) / std::max<Real>(1, rx.value),
                      wx({{"k", k}}));
    }

    const Real via_oracle = minkowski_oracle(space, x, d, oracle_solver);
    oracle.record(std::fabs(rx.value - via_oracle) / rx.value, wx({{"oracle", num(via_oracle)}}));

    const Real a = rng.sign() * std::pow(Real(10), rng.uniform(-3, 3));
    const Real scaled_value = norm_at(space, scaled(a, x), d);
    homogeneity.record(std::fabs(scaled_value - std::fabs(a) * rx.value) / (std::fabs(a) * rx.value),
                       wx({{"a", num(a)}}));

    const Real ny = norm_at(space, y, d);
    const Real scale = std::max<Real>(1, rx.value + ny);
    auto wxy = [&] { return json{{"x", vector_to_json(x)}, {"y", vector_to_json(y)}, {"level", d}}; };
    triangle.record((norm_at(space, axpy(1, x, 1, y), d) - rx.value - ny) / scale, wxy);
    midpoint.record((norm_at(space, axpy(0.5L, x, 0.5L, y), d) - (rx.value + ny) / 2) / scale, wxy);

    // Flip one coordinate sign (index 0 means the first base component).
    TowerVector flipped = x;
    const std::size_t slot = rng.index(0, d);
    if (slot == 0) {
      flipped.base[rng.index(0, dim - 1)] *= -1;
    } else {
      flipped.coords[slot - 1] *= -1;
    }
    const LevelNormResult rf = level_norm(space, flipped, d);
    Real trail_gap = 0;
    for (std::size_t k = 0; k <= d; ++k) {
      trail_gap = std::max(trail_gap, std::fabs(rf.per_level[k] - rx.per_level[k]));
    }
    symmetry.record(trail_gap / std::max<Real>(1, rx.value), wx({{"flipped_slot", slot}}));

    if (d < space.max_level()) {
      const TowerVector unit = normalized(space, project(x, d), d);
      const ShapeFn& next = space.schedule().shape(d + 1);
      TowerVector lifted = project(unit, d + 1);
      lifted.coords[d] = rng.sign() * Real(0.99L) * next.z;
      flat.record(std::fabs(norm_at(space, lifted, d + 1) - 1),
                  [&, lifted] { return json{{"x", vector_to_json(lifted)}, {"level", d + 1}}; });
      lifted.coords[d] = rng.sign() * Real(1.5L) * next.l;
      growth.record(1 + 1e-12L - norm_at(space, lifted, d + 1),
                    [&, lifted] { return json{{"x", vector_to_json(lifted)}, {"level", d + 1}}; });
    }
  }
  report.get().samples = samples;
  report.get().details = {{"max_degree", cap}, {"base_dim", dim}};
  return report.finish(
      {&monotone, &flat, &growth, &oracle, &homogeneity, &triangle, &midpoint, &symmetry});
}

// ---------------------------------------------------------------------------

VerificationReport verify_equivalence(const TowerSpace& space, const VerifyOptions& options) {
  validate(space, options);
  const Real tol = pick_tol(options, 1e-9L);
  Report report("equivalence", tol);
  Tally lower("lower_bound", tol), upper("upper_bound", tol), lower_level("level_lower_bound", tol),
      upper_level("level_upper_bound", tol);

  const std::size_t samples = pick_samples(options, 1000);
  const std::size_t cap = degree_cap(space, options);
  const std::size_t deep = std::min<std::size_t>(space.max_level(), 30);
  const std::uint64_t seed = check_seed(options, 3);
  const EquivalenceConstants full = equivalence_constants(space, space.max_level());
  const Real infinite_product = full.product * full.tail_bound;

  for (std::size_t i = 0; i < samples; ++i) {
    Rng rng(detail::derive_seed(seed, i));
    TowerVector x;
    switch (i % 4) {
      case 0: x = draw(space, rng.index(1, cap), rng, false); break;
      case 1: x = draw(space, rng.index(1, cap), rng, true); break;
      case 2: {
        SampleParams p;
        p.tail_constant = rng.uniform(0.5L, 3);
        x = draw(space, deep, rng, false, SampleStyle::summable_tail, p);
        break;
      }
      default: {
        x = draw(space, rng.index(1, cap), rng, false);
        std::fill(x.coords.begin(), x.coords.end(), Real(0));
        if (x.is_zero()) x.base[0] = 1;
        break;
      }
    }
    const std::size_t d = x.degree();
    const LevelNormResult r = level_norm(space, x, d);
    const Real ell1 = ell1_sum_norm(space, x);
    const Real scale = std::max<Real>(1, ell1);
    auto wx = [&](json extra = json::object()) {
      return [&, extra] {
        json w = {{"x", vector_to_json(x)}};
        w.update(extra);
        return w;
      };
    };

    lower.record((ell1 / infinite_product - r.value) / scale, wx({{"product", num(infinite_product)}}));
    upper.record((r.value - ell1) / scale, wx());
    for (std::size_t n = 1; n <= d; ++n) {
      const Real comparison = r.per_level[n - 1] + std::fabs(x.coord(n));
      const Real factor = 1 + space.schedule().offset(n);
      lower_level.record((comparison / factor - r.per_level[n]) / scale, wx({{"level", n}}));
      upper_level.record((r.per_level[n] - comparison) / scale, wx({{"level", n}}));
    }
  }
  report.get().samples = samples;
  report.get().details = {{"product_prefix_2", num(equivalence_constants(space, 2).product)},
                          {"product_all_levels", num(full.product)},
                          {"infinite_product_bound", num(infinite_product)}};
  return report.finish({&lower, &upper, &lower_level, &upper_level});
}

// ---------------------------------------------------------------------------

std::size_t octahedral_start_level(const TowerSpace& space, Real epsilon) {
  if (!(epsilon > 0 && epsilon < 1)) {
    throw Error(ErrorCode::invalid_argument, "octahedrality target must lie in (0, 1)");
  }
  const ShapeSchedule& s = space.schedule();
  for (std::size_t n = 1; n <= s.levels(); ++n) {
    const Real a = s.z(n) + s.l(n);
    if (a / (a + 2) <= epsilon) return n;
  }
  throw Error(ErrorCode::hypothesis_failure,
              "no level within the schedule reaches octahedrality target " +
                  std::to_string(static_cast<double>(epsilon)));
}

VerificationReport verify_octahedral(const TowerSpace& space, const VerifyOptions& options) {
  validate(space, options);
  const Real tol = pick_tol(options, 1e-9L);
  const Real eps = options.epsilon;
  const std::size_t n0 = octahedral_start_level(space, eps);
  Report report("octahedral", tol);
  Tally witness("witness_inequality", tol);

  std::vector<std::size_t> levels;
  for (std::size_t n = n0; n <= std::min(space.max_level(), n0 + 5); ++n) levels.push_back(n);

  const std::size_t samples = pick_samples(options, 500);
  const std::uint64_t seed = check_seed(options, 4);
  for (std::size_t i = 0; i < samples; ++i) {
    Rng rng(detail::derive_seed(seed, i));
    const std::size_t n = levels[i % levels.size()];
    SampleParams p;
    p.bound = std::pow(Real(10), rng.uniform(-2, 1));
    const TowerVector y = draw(space, n - 1, rng, i % 3 == 2, SampleStyle::generic, p);
    const Real ny = norm_at(space, y, n - 1);
    for (int k = -6; k <= 6; ++k) {
      for (Real sign : {Real(1), Real(-1)}) {
        const Real alpha = sign * std::pow(Real(10), Real(k) / 2);
        TowerVector z = project(y, n);
        z.coords[n - 1] = alpha;
        const Real lhs = (1 - eps) * (ny + std::fabs(alpha));
        witness.record((lhs - norm_at(space, z, n)) / std::max<Real>(1, ny + std::fabs(alpha)), [&] {
          return json{{"y", vector_to_json(y)}, {"alpha", num(alpha)}, {"level", n},
                      {"epsilon", num(eps)}};
        });
      }
    }
  }
  const ShapeSchedule& s = space.schedule();
  json ratios = json::array();
  for (std::size_t n = 1; n <= std::min<std::size_t>(s.levels(), 8); ++n) {
    const Real a = s.z(n) + s.l(n);
    ratios.push_back(num(a / (a + 2)));
  }
  report.get().samples = samples;
  report.get().details = {{"n0", n0},
                          {"epsilon", num(eps)},
                          {"witness_levels", levels},
                          {"alpha_grid", "+-10^(k/2), k = -6..6"},
                          {"octahedrality_constants", ratios}};
  return report.finish({&witness});
}

// ---------------------------------------------------------------------------

VerificationReport verify_case1(const TowerSpace& space, const VerifyOptions& options) {
  validate(space, options);
  const Real tol = pick_tol(options, 1e-8L);
  constexpr Real kDecayThreshold = 1e-5L;
  Report report("case1", tol);
  Tally ratio("ratio_inequality", tol), teles("telescoped_bound", tol),
      doubling("doubling_bound", tol), bj("inherited_orthogonality", tol),
      homothety("homothety_identity", tol), decay("decay", 0);

  const std::size_t samples = pick_samples(options, 200);
  const std::size_t cap = degree_cap(space, options);
  const std::uint64_t seed = check_seed(options, 5);
  const std::vector<Real> grid = symmetric_log_grid(1, 17);
  const Real tiny = std::ldexp(Real(1), -20);
  Certification cert;

  for (std::size_t i = 0; i < samples; ++i) {
    TowerVector x, h;
    std::size_t n = 0, d = 0;
    bool ok = false;
    for (std::size_t attempt = 0; attempt < kRetries && !ok; ++attempt) {
      Rng rng(detail::derive_seed(seed, i * kRetries + attempt));
      d = rng.index(2, cap);
      x = draw(space, d, rng, i % 2 == 1);
      x = normalized(space, x, d);
      const LevelNormResult rx = level_norm(space, x, d);
      std::vector<std::size_t> candidates;
      for (std::size_t m = 1; m < d; ++m) {
        if (rx.per_level[m] >= 0.5L) candidates.push_back(m);
      }
      if (candidates.empty()) {
        cert.reject("half_norm_level");
        continue;
      }
      n = candidates[rng.index(0, candidates.size() - 1)];
      const TowerVector raw = draw(space, n, rng, false);
      const TowerVector tangent = tangent_decomposition(space, x, raw, n).h_tangent;
      const Real size = norm_at(space, tangent, n);
      if (!(size > 1e-6L)) {
        cert.reject("degenerate_direction");
        continue;
      }
      h = scaled(1 / size, tangent);
      if (!is_bj_orthogonal(space, project(x, n), h, 1e-6L)) {
        cert.reject("not_orthogonal");
        continue;
      }
      cert.accept();
      ok = true;
    }
    if (!ok) {
      throw Error(ErrorCode::hypothesis_failure,
                  "could not construct a tangent sample after " + std::to_string(kRetries) +
                      " attempts");
    }

    const LevelNormResult base = level_norm(space, x, d);
    const std::vector<Real>& T = base.per_level;
    auto wt = [&](Real t, std::size_t m) {
      return [&, t, m] {
        return json{{"x", vector_to_json(x)}, {"h", vector_to_json(h)}, {"n", n},
                    {"m", m}, {"t", num(t)}};
      };
    };

    for (Real t : grid) {
      const std::vector<Real> P = level_norm(space, axpy(1, x, t, h), d).per_level;
      const Real phi_n = P[n] - T[n];
      for (std::size_t m = n; m <= d; ++m) {
        const Real phi_m = P[m] - T[m];
        bj.record(-phi_m, wt(t, m));
        if (m < d) {
          ratio.record(P[m + 1] / P[m] - T[m + 1] / T[m], wt(t, m));
          // |||P_m(x + th)||| = H(|||P_{m+1}(x + th)|||), H(l) = l (1 - f(|x_{m+1}|/l)).
          const ShapeFn& f = space.schedule().shape(m + 1);
          const Real u = std::fabs(x.coord(m + 1));
          auto H = [&](Real l) { return u == 0 ? l : l * f.complement(std::min<Real>(1, u / l)); };
          homothety.record(std::fabs(H(P[m + 1]) - H(T[m + 1]) - phi_m), wt(t, m));
        }
        if (m > n) {
          const Real weight = T[m] / T[n];
          teles.record(phi_m - weight * phi_n, wt(t, m));
          doubling.record(weight * phi_n - 2 * phi_n, wt(t, m));
        }
      }
    }
    for (Real t : {tiny, -tiny}) {
      const Real q = (norm_at(space, axpy(1, x, t, h), n) - T[n]) / std::fabs(t);
      decay.record(std::fabs(q) - kDecayThreshold, wt(t, n));
    }
  }
  report.get().samples = samples;
  report.get().details = {{"hypotheses", cert.to_json()},
                          {"t_grid", "+-2^-k, k = 0..16"},
                          {"decay_step", num(tiny)},
                          {"decay_threshold", num(kDecayThreshold)}};
  return report.finish({&ratio, &teles, &doubling, &bj, &homothety, &decay});
}

// ---------------------------------------------------------------------------

json to_json(const Case2Trace& trace) {
  return {{"n", trace.n},
          {"k", trace.k},
          {"C_sequence", num_array(trace.C_sequence)},
          {"h_gaps", num_array(trace.h_gaps)},
          {"E_values", num_array(trace.E_values)},
          {"t", num(trace.t)},
          {"lhs", num(trace.lhs)},
          {"rhs", num(trace.rhs)}};
}

VerificationReport verify_case2(const TowerSpace& space, const VerifyOptions& options) {
  validate(space, options);
  const Real tol = pick_tol(options, 1e-8L);
  const Real c_tol = pick_tol(options, 1e-6L);
  const Real final_tol = pick_tol(options, 1e-7L);
  constexpr Real kLimitThreshold = 1e-4L;
  Report report("case2", tol);
  Tally c_bound("c_bound", c_tol), c_step("c_increment", tol), h_step("tangent_increment", tol),
      err("error_term", tol), routes("error_term_routes", tol), bracket("step_bracket", tol),
      final_bound("final_estimate", final_tol), limit("derivative_limit", 0);

  const std::size_t samples = pick_samples(options, 100);
  const std::size_t D = std::min<std::size_t>(space.max_level(), 24);
  const std::uint64_t seed = check_seed(options, 6);
  std::vector<Real> grid = symmetric_log_grid(0.25L, 17);
  const Real trace_t = 0.0625L;
  Certification cert;
  json trace_json;

  for (std::size_t i = 0; i < samples; ++i) {
    TowerVector x, h;
    std::size_t N = 0;
    bool ok = false;
    for (std::size_t attempt = 0; attempt < kRetries && !ok; ++attempt) {
      Rng rng(detail::derive_seed(seed, i * kRetries + attempt));
      SampleParams p;
      p.tail_constant = rng.uniform(0.5L, 2);
      x = normalized(space, draw(space, D, rng, false, SampleStyle::summable_tail, p), D);
      N = 1;
      while (N < D && !(ell1_tail(x, N) < 1.0L / 16)) ++N;
      if (N + 2 > D) {
        cert.reject("tail_too_heavy");
        continue;
      }
      h = draw(space, N, rng, false);
      h = normalized(space, h, N);
      const LevelNormResult rx = level_norm(space, x, D);
      bool heavy = false;
      for (std::size_t n = N + 1; n <= D; ++n) heavy = heavy || !(rx.per_level[n] > 15.0L / 16);
      if (heavy) {
        cert.reject("truncation_below_15_16");
        continue;
      }
      cert.accept();
      ok = true;
    }
    if (!ok) {
      throw Error(ErrorCode::hypothesis_failure,
                  "could not construct a certified sample after " + std::to_string(kRetries) +
                      " attempts");
    }

    const std::vector<Real> T = level_norm(space, x, D).per_level;
    auto wt = [&](Real t, std::size_t j) {
      return [&, t, j] {
        return json{{"x", vector_to_json(x)}, {"h", vector_to_json(h)}, {"N", N},
                    {"level", j}, {"t", num(t)}};
      };
    };

    // C_j and h_j for j = N+1..D, stored at index j.
    std::vector<Real> C(D + 1, 0);
    std::vector<TowerVector> hs(D + 1);
    for (std::size_t j = N + 1; j <= D; ++j) {
      const TangentDecomposition td = tangent_decomposition(space, x, h, j);
      C[j] = td.C;
      hs[j] = td.h_tangent;
      c_bound.record(std::fabs(C[j]) - 16.0L / 15, wt(0, j));
    }
    std::vector<Real> gaps(D + 1, 0);
    for (std::size_t j = N + 1; j < D; ++j) {
      const Real xj = std::fabs(x.coord(j + 1));
      c_step.record(std::fabs(C[j + 1] - C[j]) - 2 * xj, wt(0, j));
      gaps[j] = norm_at(space, axpy(1, hs[j + 1], -1, hs[j]), j + 1);
      h_step.record(gaps[j] - 4 * xj, wt(0, j));
    }

    // Final estimate from the first certified level and from the first level whose tail is below 1e-2.
    std::vector<std::size_t> starts{N + 1};
    for (std::size_t n = N + 2; n < D; ++n) {
      if (ell1_tail(x, n - 1) < 1e-2L) {
        starts.push_back(n);
        break;
      }
    }
    const bool record_trace = trace_json.is_null();
    Case2Trace trace;
    for (Real t : grid) {
      const std::vector<Real> P = level_norm(space, axpy(1, x, t, h), D).per_level;
      for (std::size_t j = N + 1; j <= D; ++j) {
        const Real step = 1 + t * C[j];
        bracket.record(std::max(0.5L - step, step - 1.5L), wt(t, j));
      }
      for (std::size_t j = N + 1; j < D; ++j) {
        const TowerVector y = scaled(1 + t * C[j + 1], project(x, j + 1));
        const Real with_hj = norm_at(space, axpy(1, y, t, hs[j]), j + 1);
        const Real e_tangent = norm_at(space, axpy(1, y, t, hs[j + 1]), j + 1) - with_hj;
        const Real ny = norm_at(space, y, j + 1);
        const Real e_split = (P[j + 1] - T[j + 1]) - (with_hj - ny) - t * C[j + 1] * T[j + 1];
        err.record(std::fabs(e_tangent) - std::fabs(t) * gaps[j], wt(t, j));
        routes.record(std::fabs(e_tangent - e_split), wt(t, j));
        if (record_trace && t == trace_t) trace.E_values.push_back(e_tangent);
      }

      for (std::size_t n : starts) {
        const Real tail = ell1_tail(x, n - 1);
        const TowerVector xn = project(x, n);
        auto phi_n = [&](Real s) { return norm_at(space, axpy(1, xn, s, hs[n]), n) - T[n]; };
        const Real anchor = 2 * phi_n(t / (1 + t * C[n]));
        for (std::size_t k = 1; n + k <= D; ++k) {
          const Real lhs = std::fabs((P[n + k] - T[n + k]) - (P[n] - T[n]));
          const Real rhs = 16 * std::fabs(t) * tail + 2 * phi_n(t / (1 + t * C[n + k])) + anchor;
          final_bound.record(lhs - rhs, [&, t, n, k] {
            return json{{"x", vector_to_json(x)}, {"h", vector_to_json(h)}, {"N", N},
                        {"n", n}, {"k", k}, {"t", num(t)}, {"lhs", num(lhs)}, {"rhs", num(rhs)}};
          });
          if (record_trace && t == trace_t && n == N + 1 && n + k == D) {
            trace.lhs = lhs;
            trace.rhs = rhs;
          }
        }
      }
    }

    const DerivativeEstimate dd = directional_derivative(space, x, h);
    const Real c_limit = C[D] * T[D];
    limit.record(std::fabs(dd.right - c_limit) - kLimitThreshold, [&] {
      return json{{"x", vector_to_json(x)}, {"h", vector_to_json(h)}, {"derivative", num(dd.right)},
                  {"C_limit", num(c_limit)}};
    });

    if (record_trace) {
      trace.n = N + 1;
      trace.k = D - trace.n;
      trace.t = trace_t;
      for (std::size_t j = trace.n; j <= D; ++j) trace.C_sequence.push_back(C[j]);
      for (std::size_t j = trace.n; j < D; ++j) trace.h_gaps.push_back(gaps[j]);
      trace_json = to_json(trace);
    }
  }
  report.get().samples = samples;
  report.get().details = {{"hypotheses", cert.to_json()},
                          {"truncation_degree", D},
                          {"t_grid", "+-2^-k, k = 2..18"},
                          {"derivative_limit_threshold", num(kLimitThreshold)},
                          {"trace", trace_json}};
  return report.finish(
      {&c_bound, &c_step, &h_step, &err, &routes, &bracket, &final_bound, &limit});
}

// ---------------------------------------------------------------------------

VerificationReport verify_smoothness(const TowerSpace& space, const VerifyOptions& options) {
  validate(space, options);
  const Real tol = pick_tol(options, 1e-9L);
  constexpr Real kDecayThreshold = 1e-4L;
  constexpr Real kSidesThreshold = 1e-6L;
  constexpr Real kLimitThreshold = 1e-4L;
  constexpr int kSteps = 20;
  Report report("smoothness", tol);
  Tally monotone("quotient_monotone", tol), decay("quotient_decay", 0),
      sides("two_sided_agreement", 0), limit("tail_limit", 0);

  const std::size_t y_points = pick_samples(options, 100);
  const std::size_t tail_points = std::max<std::size_t>(1, y_points / 5);
  const std::size_t cap = degree_cap(space, options);
  const std::size_t deep = std::min<std::size_t>(space.max_level(), 30);
  const std::uint64_t seed = check_seed(options, 7);
  json worst_trail;
  Real worst_final = -1;

  for (std::size_t i = 0; i < y_points + tail_points; ++i) {
    Rng rng(detail::derive_seed(seed, i));
    const bool tail_point = i >= y_points;
    TowerVector x;
    if (tail_point) {
      SampleParams p;
      p.tail_constant = rng.uniform(0.5L, 2);
      x = draw(space, deep, rng, false, SampleStyle::summable_tail, p);
    } else {
      x = draw(space, rng.index(1, cap), rng, i % 2 == 1);
    }
    x = normalized(space, x, x.degree());
    TowerVector h = draw(space, rng.index(1, cap), rng, i % 3 == 2);
    h = normalized(space, h, h.degree());
    auto wx = [&](json extra = json::object()) {
      return [&, extra] {
        json w = {{"x", vector_to_json(x)}, {"h", vector_to_json(h)}, {"tail_point", tail_point}};
        w.update(extra);
        return w;
      };
    };

    std::vector<Real> trail;
    for (int k = 0; k <= kSteps; ++k) {
      trail.push_back(symmetric_quotient(space, x, h, std::ldexp(Real(1), -k)));
      if (k > 0) monotone.record(trail[k] - trail[k - 1], wx({{"k", k}}));
    }
    decay.record(trail.back() - kDecayThreshold, wx({{"quotient", num(trail.back())}}));
    if (trail.back() > worst_final) {
      worst_final = trail.back();
      worst_trail = {{"x", vector_to_json(x)}, {"h", vector_to_json(h)}, {"quotients", num_array(trail)}};
    }

    const DerivativeEstimate dd = directional_derivative(space, x, h);
    sides.record(std::fabs(dd.right - dd.left) - kSidesThreshold,
                 wx({{"right", num(dd.right)}, {"left", num(dd.left)}}));
    if (tail_point) {
      const std::size_t D = std::max(x.degree(), h.degree());
      const TangentDecomposition td = tangent_decomposition(space, x, h, D);
      const Real c_limit = td.C * norm_at(space, x, D);
      limit.record(std::fabs(dd.right - c_limit) - kLimitThreshold,
                   wx({{"derivative", num(dd.right)}, {"C_limit", num(c_limit)}}));
    }
  }
  report.get().samples = y_points + tail_points;
  report.get().details = {{"y_points", y_points},
                          {"tail_points", tail_points},
                          {"steps", "2^-k, k = 0..20"},
                          {"decay_threshold", num(kDecayThreshold)},
                          {"two_sided_threshold", num(kSidesThreshold)},
                          {"slowest_trail", worst_trail}};
  return report.finish({&monotone, &decay, &sides, &limit});
}

// ---------------------------------------------------------------------------

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names{"shape", "structure", "equivalence", "octahedral",
                                              "case1", "case2",     "smoothness"};
  return names;
}

VerificationReport run_check(const std::string& name, const TowerSpace& space,
                             const VerifyOptions& options) {
  if (name == "shape") return verify_shape(space, options);
  if (name == "structure") return verify_structure(space, options);
  if (name == "equivalence") return verify_equivalence(space, options);
  if (name == "octahedral") return verify_octahedral(space, options);
  if (name == "case1") return verify_case1(space, options);
  if (name == "case2") return verify_case2(space, options);
  if (name == "smoothness") return verify_smoothness(space, options);
  throw Error(ErrorCode::invalid_argument, "unknown check '" + name + "'");
}

std::vector<VerificationReport> run_all(const TowerSpace& space, const VerifyOptions& options) {
  std::vector<VerificationReport> out;
  for (const std::string& name : check_names()) out.push_back(run_check(name, space, options));
  return out;
}

json to_json(const VerificationReport& report) {
  auto finite_or_null = [](Real v) { return std::isfinite(v) ? num(v) : json(nullptr); };
  json subs = json::array();
  for (const SubCheck& s : report.sub_checks) {
    subs.push_back({{"name", s.name},
                    {"evaluations", s.evaluations},
                    {"violations", s.violations},
                    {"worst_violation", finite_or_null(s.worst_violation)},
                    {"tolerance", num(s.tolerance)}});
  }
  return {{"check_name", report.check_name},
          {"samples", report.samples},
          {"violations", report.violations},
          {"worst_violation", finite_or_null(report.worst_violation)},
          {"worst_witness", report.worst_witness},
          {"tolerance", num(report.tolerance)},
          {"passed", report.passed},
          {"runtime_ms", report.runtime_ms},
          {"sub_checks", subs},
          {"details", report.details}};
}

}  // namespace octo
