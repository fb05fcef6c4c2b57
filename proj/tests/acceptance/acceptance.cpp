// Acceptance gate. Prints one PASS/FAIL line per criterion A1-A8 and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "mpkit/campaign.hpp"
#include "mpkit/idempotent.hpp"
#include "mpkit/matched.hpp"
#include "mpkit/spectral.hpp"
#include "mpkit/verifier.hpp"
#include "support/generators.hpp"
#include "support/oracle.hpp"

using namespace mpkit;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int failures = 0;
std::map<std::string, std::string> lines;

void report(const char* id, bool ok, const std::string& what) {
  lines[id] = std::string(id) + (ok ? " PASS  " : " FAIL  ") + what;
  if (!ok) ++failures;
}

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, pattern, args...);
  return buf;
}

// Number of eigenvalues above `rel` times the largest magnitude.
Index rank_from(const oracle::Eigh& e, double rel = 1e-10) {
  double top = 0.0;
  for (double x : e.values) top = std::max(top, std::abs(x));
  if (top == 0.0) return 0;
  return std::count_if(e.values.begin(), e.values.end(),
                       [&](double x) { return std::abs(x) > rel * top; });
}

// Orthogonal projection onto R(Q), from the top-r eigenvectors of QQ*.
ComplexMatrix range_projection_oracle(const ComplexMatrix& q, Index r) {
  const oracle::Eigh e = oracle::jacobi_eigh(q * q.adjoint());
  const ComplexMatrix basis = e.vectors.rightCols(r);
  return basis * basis.adjoint();
}

// ---- A1, A3, A4, A5, A7: the standard campaign ------------------------------

struct TrialRecord {
  TrialSpec spec;
  double dev = kNaN;            // max pairwise Frobenius distance over formulas
  double dev_threshold = kNaN;  // 1e-8 (1 + ||Q||_F^2)
  double formula_seconds = 0.0;
  double oracle_dev = kNaN;     // ||m_ref - m_oracle||_F
  bool overall = false;
  std::string first_failure;
  double fixed_point = kNaN;    // max_f ||m_f(Q) - Q||_F, skew 0 only
  double gap_violation = kNaN;  // eigenvalues of Q + Q* strictly inside the gap band
  double gap_tol = kNaN;
  double asym = kNaN;           // ||Q - Q*||_F
  Index rank_m = -1;
  Index rank_t = -1;
};

TrialRecord run_trial(const TrialSpec& spec, const Tolerances& tol) {
  TrialRecord rec;
  rec.spec = spec;
  const BlockIdempotent b = realize(spec, tol);
  const Idempotent& q = b.idempotent;
  const ComplexMatrix& qm = q.matrix();
  const Index n = q.size();

  const auto start = std::chrono::steady_clock::now();
  std::vector<ComplexMatrix> outs;
  for (Formula f : kAllFormulas) outs.push_back(matched_by(f, q, tol, &b.block));
  rec.dev = 0.0;
  for (std::size_t i = 0; i < outs.size(); ++i)
    for (std::size_t j = i + 1; j < outs.size(); ++j)
      rec.dev = std::max(rec.dev, fro_norm(outs[i] - outs[j]));
  rec.formula_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const double fro = fro_norm(qm);
  rec.dev_threshold = 1e-8 * (1.0 + fro * fro);
  rec.oracle_dev = fro_norm(outs[static_cast<std::size_t>(kReferenceFormula)] -
                            oracle::matched_projection(qm));

  const VerificationReport r = verify_all(q, tol, {"campaign", n, q.rank(), spec.skew, spec.seed}, b.block);
  rec.overall = r.overall;
  for (const CheckResult& c : r.checks)
    if (!c.passed) {
      rec.first_failure = c.id + " (" + c.notes + ")";
      break;
    }

  if (spec.skew == 0.0) {
    rec.fixed_point = 0.0;
    for (const ComplexMatrix& m : outs) rec.fixed_point = std::max(rec.fixed_point, fro_norm(m - qm));
  }

  const ComplexMatrix t = qm + qm.adjoint();
  const oracle::Eigh e = oracle::jacobi_eigh(t);
  const double op = op_norm(qm);
  rec.gap_tol = tol.id * (1.0 + op * op);
  rec.gap_violation = 0.0;
  for (double x : e.values)
    if (x > rec.gap_tol && x < 2.0 - rec.gap_tol)
      rec.gap_violation = std::max(rec.gap_violation, std::min(x, 2.0 - x));

  rec.asym = fro_norm(qm - qm.adjoint());
  // m is a projection, so its rank is its trace.
  rec.rank_m = std::llround(outs.front().trace().real());
  rec.rank_t = rank_from(e);
  return rec;
}

void campaign_criteria() {
  CampaignConfig config;
  config.sizes = {2, 3, 4, 8, 16, 32, 64};
  config.skews = {0.0, 0.1, 1.0, 10.0, 100.0};
  config.trials_per_cell = 29;
  config.seed = 20240611;
  const auto trials = enumerate_trials(config);

  std::vector<TrialRecord> recs(trials.size());
  parallel_for(trials.size(), 0, [&](std::size_t i) { recs[i] = run_trial(trials[i], config.tol); });
  double seconds = 0.0;
  for (const TrialRecord& r : recs) seconds += r.formula_seconds;

  bool saw_rank0 = false;
  bool saw_rankn = false;
  for (const TrialRecord& r : recs) {
    saw_rank0 = saw_rank0 || r.spec.rank == 0;
    saw_rankn = saw_rankn || r.spec.rank == r.spec.n;
  }

  // A1
  {
    double worst = 0.0;
    double worst_oracle = 0.0;
    std::size_t bad = 0;
    for (const TrialRecord& r : recs) {
      const double ratio = r.dev / r.dev_threshold;
      const double oracle_ratio = r.oracle_dev / r.dev_threshold;
      worst = std::max(worst, ratio);
      worst_oracle = std::max(worst_oracle, oracle_ratio);
      if (!(ratio <= 1.0) || !(oracle_ratio <= 1.0)) ++bad;
    }
    report("A1", bad == 0 && recs.size() >= 1000 && saw_rank0 && saw_rankn,
           fmt("five-formula agreement: %zu trials (ranks 0 and n %s), %zu over 1e-8(1+||Q||_F^2); "
               "worst dev/threshold %.3e, worst reference-vs-oracle/threshold %.3e; "
               "%.1f s of formula evaluation",
               recs.size(), saw_rank0 && saw_rankn ? "present" : "MISSING", bad, worst,
               worst_oracle, seconds));
  }

  // A3
  {
    std::size_t passed = 0;
    std::string first;
    for (const TrialRecord& r : recs) {
      if (r.overall) ++passed;
      else if (first.empty())
        first = fmt(" first failure: n=%td r=%td skew=%g seed=%llu %s", r.spec.n, r.spec.rank,
                    r.spec.skew, static_cast<unsigned long long>(r.spec.seed),
                    r.first_failure.c_str());
    }
    report("A3", passed == recs.size(),
           fmt("identity suite (%zu checks per trial): %zu / %zu trials pass%s",
               check_registry().size(), passed, recs.size(), first.c_str()));
  }

  // A4
  {
    double worst = 0.0;
    std::size_t count = 0;
    bool ok = true;
    for (const TrialRecord& r : recs) {
      if (r.spec.skew != 0.0) continue;
      ++count;
      worst = std::max(worst, r.fixed_point);
      ok = ok && r.fixed_point <= 1e-12;
    }
    report("A4", ok && count > 0,
           fmt("projection fixed point: %zu skew-0 trials, max_f ||m_f(Q) - Q||_F = %.3e (limit 1e-12)",
               count, worst));
  }

  // A5
  {
    std::size_t bad = 0;
    double worst = 0.0;
    for (const TrialRecord& r : recs) {
      if (r.gap_violation > 0.0) ++bad;
      worst = std::max(worst, r.gap_violation);
    }
    report("A5", bad == 0,
           fmt("spectral gap: %zu / %zu trials with an eigenvalue of Q+Q* in (tol_gap, 2-tol_gap), "
               "tol_gap = tol_id(1+||Q||^2); deepest intrusion %.3e",
               bad, recs.size(), worst));
  }

  // A7
  {
    std::size_t eq_count = 0;
    std::size_t eq_bad = 0;
    std::size_t lt_count = 0;
    std::size_t lt_bad = 0;
    for (const TrialRecord& r : recs) {
      if (r.spec.skew == 0.0) {
        ++eq_count;
        if (r.rank_m != r.rank_t) ++eq_bad;
      }
      if (r.asym > 1e-6) {
        ++lt_count;
        if (!(r.rank_m < r.rank_t)) ++lt_bad;
      }
    }
    report("A7", eq_bad == 0 && lt_bad == 0 && eq_count > 0 && lt_count > 0,
           fmt("range criterion: rank(m) = rank(Q+Q*) on %zu/%zu skew-0 trials; "
               "rank(m) < rank(Q+Q*) on %zu/%zu trials with ||Q-Q*|| > 1e-6",
               eq_count - eq_bad, eq_count, lt_count - lt_bad, lt_count));
  }
}

// ---- A2 --------------------------------------------------------------------

void golden_criterion() {
  ComplexMatrix qm(2, 2);
  qm << 1, 1, 0, 0;
  const Idempotent q = validate_idempotent(qm);
  const BlockForm bf = extract_block_form(q);

  // B = sqrt(1 + |A|^2) = sqrt 2 with A = 1; m = 1/2 [[(B+1)/B, 1/B], [1/B, 1/(B(B+1))]].
  const double b = std::sqrt(2.0);
  ComplexMatrix hand(2, 2);
  hand << 0.5 * (b + 1) / b, 0.5 / b, 0.5 / b, 0.5 / (b * (b + 1));
  const double oracle_gap = fro_norm(hand - oracle::matched_projection(qm));

  bool ok = oracle_gap <= 1e-12;
  std::string detail;
  for (Formula f : kAllFormulas) {
    const ComplexMatrix m = matched_by(f, q, {}, &bf);
    double entry = 0.0;
    for (Index i = 0; i < 4; ++i) entry = std::max(entry, std::abs(m(i) - hand(i)));
    const double tr = std::abs(m.trace() - Complex(1.0));
    const double det = std::abs(m.determinant());
    ok = ok && entry < 5e-7 && tr <= 1e-12 && det <= 1e-12;
    detail += fmt(" %s[%.6f %.6f; %.6f %.6f]", std::string(formula_name(f)).c_str(), m(0, 0).real(),
                  m(0, 1).real(), m(1, 0).real(), m(1, 1).real());
  }
  report("A2", ok,
         fmt("golden [[1,1],[0,0]]: hand value vs Jacobi oracle %.1e;", oracle_gap) + detail +
             " (trace 1, det 0 within 1e-12)");
}

// ---- A6 --------------------------------------------------------------------

void homotopy_criterion() {
  const Index sizes[] = {2, 3, 4, 8, 16};
  const double skews[] = {0.1, 1.0, 10.0};
  Rng rng(0x686f6d6f);
  double worst_start = 0.0;
  double worst_end = 0.0;
  double lo_ratio = std::numeric_limits<double>::infinity();
  double hi_ratio = 0.0;
  std::size_t stationary = 0;
  std::size_t bad = 0;
  std::string first;
  const int count = 100;
  for (int k = 0; k < count; ++k) {
    const Index n = sizes[k % 5];
    const double skew = skews[(k / 5) % 3];
    const Index r = testgen::uniform_index(1, n - 1, rng);
    const auto b = random_idempotent(n, r, skew, derive_seed(0x413655, static_cast<std::uint64_t>(k)));
    const Idempotent& q = b.idempotent;
    try {
      const HomotopySweep coarse = homotopy_sweep(q, 64);
      const HomotopySweep fine = homotopy_sweep(q, 128);
      const double start = fro_norm(matched(homotopy_point(q, 0.0)).m -
                                    range_projection_oracle(q.matrix(), q.rank()));
      const double end = fro_norm(matched(homotopy_point(q, 1.0)).m -
                                  oracle::matched_projection(q.matrix()));
      const double ratio = fine.max_step / coarse.max_step;
      const double start_dev = std::max(start, coarse.start_deviation);
      const double end_dev = std::max(end, coarse.end_deviation);
      worst_start = std::max(worst_start, start_dev);
      worst_end = std::max(worst_end, end_dev);
      bool good = start_dev <= 1e-9 && end_dev <= 1e-9;
      if (coarse.max_step <= 1e-12) {
        ++stationary;
      } else {
        lo_ratio = std::min(lo_ratio, ratio);
        hi_ratio = std::max(hi_ratio, ratio);
        good = good && ratio >= 0.45 && ratio <= 0.55;
      }
      if (!good) {
        ++bad;
        if (first.empty()) first = fmt(" first failure: n=%td r=%td skew=%g ratio=%.4f", n, r, skew, ratio);
      }
    } catch (const std::exception& e) {
      ++bad;
      if (first.empty()) first = fmt(" first failure: n=%td r=%td skew=%g: %s", n, r, skew, e.what());
    }
  }
  report("A6", bad == 0,
         fmt("homotopy: %d non-projection idempotents, 65-point grid, every Q_t validated; "
             "max |m(Q_0) - P_R(Q)| %.3e, max |m(Q_1) - m(Q)| %.3e (limit 1e-9); "
             "refined max-step ratio in [%.4f, %.4f]%s%s",
             count, worst_start, worst_end, lo_ratio, hi_ratio,
             stationary ? fmt(" (%zu stationary paths)", stationary).c_str() : "", first.c_str()));
}

// ---- A8 --------------------------------------------------------------------

void kernel_criterion() {
  const Index n = 64;
  const int trials = 8;
  Rng rng(0x41385f6b);
  double penrose = 0.0;
  double sqrt_rt = 0.0;
  double posp = 0.0;
  for (int k = 0; k < trials; ++k) {
    const Index rank = k % 2 == 0 ? n : n / 2;
    const ComplexMatrix a = testgen::random_low_rank(n, n, rank, rng);
    const ComplexMatrix ap = pinv(a);
    const ComplexMatrix aap = a * ap;
    const ComplexMatrix apa = ap * a;
    penrose = std::max({penrose, fro_norm(aap * a - a) / fro_norm(a),
                        fro_norm(apa * ap - ap) / fro_norm(ap),
                        fro_norm(aap.adjoint() - aap) / fro_norm(aap),
                        fro_norm(apa.adjoint() - apa) / fro_norm(apa)});

    const ComplexMatrix psd = testgen::random_psd(n, rank, rng);
    const ComplexMatrix s = sqrt_psd(psd);
    sqrt_rt = std::max({sqrt_rt, fro_norm(s * s - psd) / fro_norm(psd),
                        fro_norm(s - s.adjoint()) / fro_norm(s),
                        std::max(0.0, -min_eigenvalue(s)) / fro_norm(s)});

    const ComplexMatrix h = testgen::random_hermitian(n, rng);
    const ComplexMatrix hp = positive_part(h);
    const ComplexMatrix hm = positive_part(-h);
    const double scale = fro_norm(h);
    posp = std::max({posp, fro_norm(hp - hm - h) / scale, fro_norm(hp * hm) / (scale * scale),
                     std::max(0.0, -min_eigenvalue(hp)) / scale,
                     std::max(0.0, -min_eigenvalue(hm)) / scale});
  }
  report("A8", penrose <= 1e-11 && sqrt_rt <= 1e-11 && posp <= 1e-11,
         fmt("kernels on %d random %tdx%td inputs: Penrose %.3e, sqrt_psd round trip %.3e, "
             "positive-part decomposition %.3e (relative, limit 1e-11)",
             trials, n, n, penrose, sqrt_rt, posp));
}

}  // namespace

int main() {
  campaign_criteria();
  golden_criterion();
  homotopy_criterion();
  kernel_criterion();
  for (const auto& [id, line] : lines) std::printf("%s\n", line.c_str());
  std::printf("%s: %d criterion(s) failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
