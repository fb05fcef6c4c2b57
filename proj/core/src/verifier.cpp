#include "mpkit/verifier.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <sstream>

#include "mpkit/errors.hpp"
#include "mpkit/matched.hpp"
#include "mpkit/random.hpp"
#include "mpkit/spectral.hpp"

namespace mpkit {

namespace {

constexpr std::uint64_t kEquivarianceSeed = 0x6d61746368ULL;
constexpr int kSweepSteps = 16;
constexpr std::array<double, 4> kProbePoints = {0.0, 0.25, 0.5, 0.75};
constexpr double kHalvingLow = 0.45;
constexpr double kHalvingHigh = 0.55;

// Several sub-residuals with their own thresholds folded into one
// residual/threshold pair: residual = max_i r_i / t_i against threshold 1.
class Compound {
 public:
  void add(std::string_view label, double residual, double threshold) {
    const double ratio =
        std::isnan(residual) ? std::numeric_limits<double>::infinity() : residual / threshold;
    worst_ = std::max(worst_, ratio);
    if (!notes_.str().empty()) notes_ << "; ";
    notes_ << label << "=" << residual;
  }
  void flag(std::string_view label, bool ok, std::string_view detail) {
    if (!ok) worst_ = std::max(worst_, 2.0);
    if (!notes_.str().empty()) notes_ << "; ";
    notes_ << label << "=" << (ok ? "ok" : "FAIL") << " (" << detail << ")";
  }
  CheckResult finish(std::string id) const {
    return {std::move(id), worst_, 1.0, worst_ <= 1.0, notes_.str()};
  }

 private:
  double worst_ = 0.0;
  std::ostringstream notes_;
};

CheckResult exception_result(std::string_view id, const std::exception& e) {
  return {std::string(id), std::numeric_limits<double>::infinity(), 1.0, false,
          std::string("exception: ") + e.what()};
}

template <class F>
CheckResult guarded(std::string_view id, F&& run) {
  try {
    return run();
  } catch (const std::exception& e) {
    return exception_result(id, e);
  }
}

CheckResult single(std::string id, double residual, double threshold, std::string notes = {}) {
  return {std::move(id), residual, threshold, residual <= threshold, std::move(notes)};
}

// Shared intermediate values for one verification run.
struct Context {
  const Idempotent& q;
  const Tolerances& tol;
  const BlockForm& block;
  ComplexMatrix mat;
  ComplexMatrix adj;
  ComplexMatrix eye;
  double threshold;
  std::map<Formula, ComplexMatrix> formulas;
  ComplexMatrix m;
  ComplexMatrix abs_q, abs_qs, abs_iq, abs_iqs;  // |Q|, |Q*|, |I-Q|, |I-Q*|

  Context(const Idempotent& idem, const Tolerances& t, const BlockForm& bf)
      : q(idem), tol(t), block(bf), mat(idem.matrix()), adj(mat.adjoint()),
        eye(identity(idem.size())), threshold(t.identity_threshold(mat.squaredNorm())) {
    for (Formula f : kAllFormulas) formulas.emplace(f, matched_by(f, q, tol, &block));
    m = formulas.at(kReferenceFormula);
    abs_q = abs_op(mat, tol);
    abs_qs = abs_op(adj, tol);
    abs_iq = abs_op(eye - mat, tol);
    abs_iqs = abs_op(eye - adj, tol);
  }

  ComplexMatrix reference(const ComplexMatrix& x) const {
    return matched_symmetric(validate_idempotent(x, tol), tol);
  }
};

CheckResult five_formula_agreement(const Context& c) {
  double worst = 0.0;
  for (auto i = c.formulas.begin(); i != c.formulas.end(); ++i)
    for (auto j = std::next(i); j != c.formulas.end(); ++j)
      worst = std::max(worst, fro_norm(i->second - j->second));
  return single("P1_agreement", worst, c.threshold);
}

CheckResult projection_property(const Context& c) {
  double worst = 0.0;
  std::string worst_name;
  for (const auto& [f, m] : c.formulas) {
    const double r = projection_residual(m);
    if (r >= worst) {
      worst = r;
      worst_name = formula_name(f);
    }
  }
  return single("P2_projection", worst, c.threshold, "worst formula: " + worst_name);
}

CheckResult fixed_point(const Context& c) {
  Compound out;
  const ComplexMatrix p = range_projection(c.q);
  out.add("m(P_R(Q))-P_R(Q)", fro_norm(c.reference(p) - p), c.threshold);
  out.add("m(m(Q))-m(Q)", fro_norm(c.reference(c.m) - c.m), c.threshold);
  return out.finish("P3_fixed_point");
}

CheckResult complement(const Context& c) {
  const ComplexMatrix m_comp = c.reference(c.eye - c.mat);
  return single("P4_complement", fro_norm(m_comp - (c.eye - c.m)), c.threshold);
}

CheckResult equivariance(const Context& c) {
  Compound out;
  Rng rng(derive_seed(kEquivarianceSeed, static_cast<std::uint64_t>(c.q.size())));
  const ComplexMatrix u = random_unitary(c.q.size(), rng);
  const ComplexMatrix conj = c.reference(u.adjoint() * c.mat * u);
  out.add("unitary", fro_norm(conj - u.adjoint() * c.m * u), c.threshold);

  const ComplexMatrix embedded = c.reference(block_diag_twice(c.mat));
  out.add("diag(X,X)", fro_norm(embedded - block_diag_twice(c.m)),
          c.tol.identity_threshold(2.0 * c.mat.squaredNorm()));
  return out.finish("P5_equivariance");
}

CheckResult adjoint_invariance(const Context& c) {
  return single("P6_adjoint_invariance", fro_norm(c.reference(c.adj) - c.m), c.threshold);
}

CheckResult similarity(const Context& c) {
  const ComplexMatrix s = symmetry_operator(c.m, c.tol);
  return single("P7_similarity", fro_norm(s * c.mat * s - c.adj), c.threshold);
}

CheckResult polar_identities(const Context& c) {
  Compound out;
  const ComplexMatrix s = symmetry_operator(c.m, c.tol);
  out.add("Q(2m-I)-|Q*|", fro_norm(c.mat * s - c.abs_qs), c.threshold);
  out.add("Q*(2m-I)-|Q|", fro_norm(c.adj * s - c.abs_q), c.threshold);
  out.add("|Q||Q*|-Q*", fro_norm(c.abs_q * c.abs_qs - c.adj), c.threshold);
  out.add("|Q*||Q|-Q", fro_norm(c.abs_qs * c.abs_q - c.mat), c.threshold);
  return out.finish("P8_polar_identities");
}

CheckResult t_identities(const Context& c) {
  Compound out;
  const ComplexMatrix t = c.abs_qs + c.abs_iq;
  const ComplexMatrix s = c.abs_q + c.abs_iqs;
  const ComplexMatrix gram = c.eye - c.mat - c.adj + c.mat * c.adj + c.adj * c.mat;
  out.add("T^2-G", fro_norm(t * t - gram), c.threshold);
  out.add("S^2-G", fro_norm(s * s - gram), c.threshold);
  out.add("T-S", fro_norm(t - s), c.threshold);
  return out.finish("P9_t_identities");
}

CheckResult sum_identities(const Context& c) {
  Compound out;
  const ComplexMatrix sym = c.mat + c.adj;
  out.add("|Q|+|Q*|-|Q+Q*|", fro_norm(c.abs_q + c.abs_qs - abs_op(sym, c.tol)), c.threshold);
  out.add("|I-Q|+|I-Q*|-|2-(Q+Q*)|",
          fro_norm(c.abs_iq + c.abs_iqs - abs_op(2.0 * c.eye - sym, c.tol)), c.threshold);
  return out.finish("P10_sum_identities");
}

CheckResult block_structure(const Context& c) {
  Compound out;
  const BlockForm& bf = c.block;
  const Index r = bf.rank();
  const Index k = bf.size() - r;
  const ComplexMatrix& a = bf.corner;
  const ComplexMatrix& u = bf.basis;

  const ComplexMatrix t = abs_conjugate_complement(bf, c.tol);
  const ComplexMatrix comp = c.eye - c.mat;
  out.add("T-|(I-Q)*|", fro_norm(t - c.abs_iqs), c.threshold);
  out.add("T^2-(I-Q)(I-Q)*", fro_norm(t * t - comp * comp.adjoint()), c.threshold);

  // |Q*| = diag(B, 0) and T = [[B^-1 AA*, -B^-1 A], [-A*B^-1, (I+A*A)^-1/2]].
  const ComplexMatrix b = sqrt_psd(identity(r) + a * a.adjoint(), c.tol);
  const ComplexMatrix b_inv = r > 0 ? ComplexMatrix(b.llt().solve(identity(r))) : b;
  const ComplexMatrix inv_sqrt = spectral_apply(
      identity(k) + a.adjoint() * a, [](double x) { return 1.0 / std::sqrt(x); }, c.tol);

  ComplexMatrix abs_adj_block = ComplexMatrix::Zero(bf.size(), bf.size());
  abs_adj_block.topLeftCorner(r, r) = b;
  out.add("|Q*|-diag(B,0)", fro_norm(u.adjoint() * c.abs_qs * u - abs_adj_block), c.threshold);

  ComplexMatrix t_block(bf.size(), bf.size());
  t_block.topLeftCorner(r, r) = b_inv * a * a.adjoint();
  t_block.topRightCorner(r, k) = -b_inv * a;
  t_block.bottomLeftCorner(k, r) = -a.adjoint() * b_inv;
  t_block.bottomRightCorner(k, k) = inv_sqrt;
  out.add("T-block", fro_norm(u.adjoint() * t * u - t_block), c.threshold);

  // A* f(I + AA*) = f(I + A*A) A* for f = sqrt and t^(-1/4).
  const ComplexMatrix left = identity(r) + a * a.adjoint();
  const ComplexMatrix right = identity(k) + a.adjoint() * a;
  auto intertwine = [&](auto f) {
    return fro_norm(a.adjoint() * spectral_apply(left, f, c.tol) -
                    spectral_apply(right, f, c.tol) * a.adjoint());
  };
  out.add("intertwine(sqrt)", intertwine([](double x) { return std::sqrt(x); }), c.threshold);
  out.add("intertwine(x^-1/4)", intertwine([](double x) { return std::pow(x, -0.25); }),
          c.threshold);
  return out.finish("P11_block_structure");
}

CheckResult homotopy(const Context& c) {
  Compound out;
  const HomotopySweep sweep = homotopy_sweep(c.q, kSweepSteps, c.tol);
  out.add("max||Q_t^2-Q_t||", sweep.max_idempotent_residual, c.threshold);
  out.add("max proj residual m(Q_t)", sweep.max_projection_residual, c.threshold);
  out.add("m(Q_0)-P_R(Q)", sweep.start_deviation, c.threshold);
  out.add("m(Q_1)-m(Q)", sweep.end_deviation, c.threshold);

  // Forward differences at step h and h/2 from a few base points: a
  // continuous, differentiable path gives a ratio near 1/2. The step is
  // scaled by ||Q|| so the probe resolves the fastest part of the path.
  const ComplexMatrix p = range_projection(c.q);
  auto m_at = [&](double t) { return c.reference((1.0 - t) * p + t * c.mat); };
  const double h = 1.0 / (64.0 * (1.0 + std::sqrt(c.mat.squaredNorm())));
  double worst_ratio_gap = 0.0;
  std::ostringstream ratios;
  for (double t0 : kProbePoints) {
    const ComplexMatrix base = m_at(t0);
    const double full = fro_norm(m_at(t0 + h) - base);
    const double half = fro_norm(m_at(t0 + h / 2.0) - base);
    if (full <= c.threshold) {
      ratios << " stationary";
      continue;
    }
    const double ratio = half / full;
    ratios << " " << ratio;
    worst_ratio_gap = std::max(worst_ratio_gap, std::abs(ratio - 0.5));
  }
  out.add("halving ratio |r-0.5| (ratios:" + ratios.str() + ")", worst_ratio_gap,
          (kHalvingHigh - kHalvingLow) / 2.0);
  return out.finish("P12_homotopy");
}

CheckResult gap_check(const Context& c) { return check_spectral_gap(c.q, c.tol); }
CheckResult order_check(const Context& c) { return check_order_relation(c.q, c.m, c.tol); }
CheckResult tplus_check(const Context& c) { return check_tplus_identities(c.q, c.m, c.tol); }
CheckResult pinv_check(const Context& c) { return check_pinv_formula(c.q, c.m, c.tol); }
CheckResult range_check(const Context& c) { return check_range_relations(c.q, c.m, c.tol); }

struct RegisteredCheck {
  CheckInfo info;
  CheckResult (*run)(const Context&);
};

constexpr std::array<RegisteredCheck, 17> kChecks = {{
    {{"P1_agreement", "all five formulas give the same matrix"}, five_formula_agreement},
    {{"P2_projection", "every formula output satisfies m^2 = m = m*"}, projection_property},
    {{"P3_fixed_point", "m(P) = P for the projections P_R(Q) and m(Q)"}, fixed_point},
    {{"P4_complement", "m(I - Q) = I - m(Q)"}, complement},
    {{"P5_equivariance", "m commutes with unitary conjugation and X -> diag(X, X)"},
     equivariance},
    {{"P6_adjoint_invariance", "m(Q*) = m(Q)"}, adjoint_invariance},
    {{"P7_similarity", "(2m - I) Q (2m - I) = Q*"}, similarity},
    {{"P8_polar_identities", "Q(2m-I) = |Q*|, Q*(2m-I) = |Q|, |Q||Q*| = Q*, |Q*||Q| = Q"},
     polar_identities},
    {{"P9_t_identities", "(|Q*|+|I-Q|)^2 = I-Q-Q*+QQ*+Q*Q = (|Q|+|I-Q*|)^2"}, t_identities},
    {{"P10_sum_identities", "|Q|+|Q*| = |Q+Q*| and |I-Q|+|I-Q*| = |2-(Q+Q*)|"},
     sum_identities},
    {{"P11_block_structure", "block-form T equals |(I-Q)*|; intertwining identities"},
     block_structure},
    {{"P12_homotopy", "Q_t is idempotent and m(Q_t) a continuous path of projections"},
     homotopy},
    {{"spectral_gap", "spectrum of Q + Q* avoids (0, 2)"}, gap_check},
    {{"order_relation", "m Q m >= m"}, order_check},
    {{"tplus_identities", "T_+ >= 2m, m = T_+ T_+^+ = T T_+^+, mT = Tm = T_+"}, tplus_check},
    {{"pinv_formula", "m = 1/2 (Q + Q*) (m Q m)^+"}, pinv_check},
    {{"range_relations", "R(m) in R(Q + Q*) = R(|Q| + |Q*|), equality iff Q = Q*"},
     range_check},
}};

constexpr std::array<CheckInfo, kChecks.size()> make_registry() {
  std::array<CheckInfo, kChecks.size()> out{};
  for (std::size_t i = 0; i < kChecks.size(); ++i) out[i] = kChecks[i].info;
  return out;
}

constexpr auto kRegistry = make_registry();

// PSD test shared by every order check: min eigenvalue >= -tol.clip * scale.
double psd_violation(const ComplexMatrix& h, const Tolerances& tol) {
  return std::max(0.0, -min_eigenvalue(h, tol));
}

CheckResult check_spectral_gap_impl(const Idempotent& q, const Tolerances& tol) {
  const ComplexMatrix& mat = q.matrix();
  const double norm = op_norm(mat);
  const double gap = tol.identity_threshold(norm * norm);
  const HermitianEigen eig = hermitian_eigen(mat + mat.adjoint(), tol);
  double worst = 0.0;
  for (double lambda : eig.values)
    if (lambda > 0.0 && lambda < 2.0) worst = std::max(worst, std::min(lambda, 2.0 - lambda));
  std::ostringstream notes;
  if (eig.values.size() > 0)
    notes << "spectrum in [" << eig.values(0) << ", " << eig.values(eig.values.size() - 1) << "]";
  return single("spectral_gap", worst, gap, notes.str());
}

CheckResult check_order_relation_impl(const Idempotent& q, const ComplexMatrix& m,
                                 const Tolerances& tol) {
  Compound out;
  const double threshold = tol.identity_threshold(q.matrix().squaredNorm());
  const ComplexMatrix mqm = m * q.matrix() * m;
  out.add("||mQm - (mQm)*||", asymmetry(mqm), threshold);
  out.add("-min eig(mQm - m)", psd_violation(hermitian_part(mqm) - m, tol),
          tol.clip * (1.0 + fro_norm(mqm)));
  return out.finish("order_relation");
}

CheckResult check_tplus_identities_impl(const Idempotent& q, const ComplexMatrix& m,
                                   const Tolerances& tol) {
  Compound out;
  const ComplexMatrix& mat = q.matrix();
  const double threshold = tol.identity_threshold(mat.squaredNorm());
  const ComplexMatrix t = mat + mat.adjoint();
  const ComplexMatrix tp = positive_part(t, tol);
  const ComplexMatrix tp_pinv = pinv(tp, tol);
  out.add("-min eig(T+ - 2m)", psd_violation(tp - 2.0 * m, tol), tol.clip * (1.0 + fro_norm(tp)));
  out.add("m - T+ T+^+", fro_norm(m - tp * tp_pinv), threshold);
  out.add("m - T T+^+", fro_norm(m - t * tp_pinv), threshold);
  out.add("mT - T+", fro_norm(m * t - tp), threshold);
  out.add("Tm - T+", fro_norm(t * m - tp), threshold);
  return out.finish("tplus_identities");
}

CheckResult check_pinv_formula_impl(const Idempotent& q, const ComplexMatrix& m,
                               const Tolerances& tol) {
  const ComplexMatrix& mat = q.matrix();
  const ComplexMatrix rhs = 0.5 * (mat + mat.adjoint()) * pinv(m * mat * m, tol);
  return single("pinv_formula", fro_norm(m - rhs),
                tol.identity_threshold(mat.squaredNorm()));
}

CheckResult check_range_relations_impl(const Idempotent& q, const ComplexMatrix& m,
                                  const Tolerances& tol) {
  Compound out;
  const ComplexMatrix& mat = q.matrix();
  const double threshold = tol.identity_threshold(mat.squaredNorm());
  const ComplexMatrix t = mat + mat.adjoint();
  out.add("P_T m - m", fro_norm(range_projection(t, tol) * m - m), threshold);

  const Index rank_t = numerical_rank(t, tol);
  const Index rank_abs_sum = numerical_rank(abs_op(mat, tol) + abs_op(mat.adjoint(), tol), tol);
  const Index rank_m = numerical_rank(m, tol);
  const bool projection = q.is_projection(tol);

  std::ostringstream ranks;
  ranks << "rank(|Q|+|Q*|)=" << rank_abs_sum << ", rank(Q+Q*)=" << rank_t;
  out.flag("range equality", rank_abs_sum == rank_t, ranks.str());

  std::ostringstream iff;
  iff << "rank(m)=" << rank_m << ", rank(Q+Q*)=" << rank_t
      << ", Q " << (projection ? "is" : "is not") << " a projection";
  out.flag("iff criterion", (rank_m == rank_t) == projection, iff.str());
  return out.finish("range_relations");
}

}  // namespace

std::span<const CheckInfo> check_registry() { return kRegistry; }

CheckResult check_spectral_gap(const Idempotent& q, const Tolerances& tol) {
  return guarded("spectral_gap", [&] { return check_spectral_gap_impl(q, tol); });
}

CheckResult check_order_relation(const Idempotent& q, const ComplexMatrix& m,
                                 const Tolerances& tol) {
  return guarded("order_relation", [&] { return check_order_relation_impl(q, m, tol); });
}

CheckResult check_tplus_identities(const Idempotent& q, const ComplexMatrix& m,
                                   const Tolerances& tol) {
  return guarded("tplus_identities", [&] { return check_tplus_identities_impl(q, m, tol); });
}

CheckResult check_pinv_formula(const Idempotent& q, const ComplexMatrix& m,
                               const Tolerances& tol) {
  return guarded("pinv_formula", [&] { return check_pinv_formula_impl(q, m, tol); });
}

CheckResult check_range_relations(const Idempotent& q, const ComplexMatrix& m,
                                  const Tolerances& tol) {
  return guarded("range_relations", [&] { return check_range_relations_impl(q, m, tol); });
}

HomotopySweep homotopy_sweep(const Idempotent& q, int steps, const Tolerances& tol) {
  if (steps < 1) throw std::invalid_argument("homotopy_sweep: steps must be positive");
  const ComplexMatrix& mat = q.matrix();
  const ComplexMatrix p = range_projection(q);
  HomotopySweep out;
  ComplexMatrix previous;
  for (int i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    const Idempotent qt = validate_idempotent((1.0 - t) * p + t * mat, tol);
    const ComplexMatrix mt = matched_symmetric(qt, tol);
    out.max_idempotent_residual = std::max(out.max_idempotent_residual, qt.residual());
    out.max_projection_residual = std::max(out.max_projection_residual, projection_residual(mt));
    if (i == 0) out.start_deviation = fro_norm(mt - p);
    if (i == steps) out.end_deviation = fro_norm(mt - matched_symmetric(q, tol));
    if (i > 0) out.max_step = std::max(out.max_step, fro_norm(mt - previous));
    previous = mt;
  }
  return out;
}

VerificationReport verify_all(const Idempotent& q, const Tolerances& tol, InputDescriptor input,
                              const std::optional<BlockForm>& bf) {
  VerificationReport report;
  if (input.n == 0) {
    input.n = q.size();
    input.rank = q.rank();
  }
  report.input = std::move(input);
  report.tolerance = tol;
  report.checks.reserve(kChecks.size());

  std::optional<BlockForm> block = bf;
  std::optional<Context> context;
  try {
    if (!block) block = extract_block_form(q, tol);
    context.emplace(q, tol, *block);
  } catch (const std::exception& e) {
    for (const RegisteredCheck& check : kChecks) report.checks.push_back(exception_result(check.info.id, e));
    report.overall = false;
    return report;
  }

  for (const RegisteredCheck& check : kChecks) {
    try {
      CheckResult result = check.run(*context);
      result.id = std::string(check.info.id);
      report.checks.push_back(std::move(result));
    } catch (const std::exception& e) {
      report.checks.push_back(exception_result(check.info.id, e));
    }
  }
  report.overall = std::all_of(report.checks.begin(), report.checks.end(),
                               [](const CheckResult& r) { return r.passed; });
  return report;
}

}  // namespace mpkit
