// mpkit: generate idempotents, compute matched projections, run verification
// campaigns.
//
//   mpkit generate --sizes 4,8 --skews 1,10 --trials 5 --out corpus/
//   mpkit match corpus/q0000_n4_r0_skew1.json --formula all
//   mpkit verify corpus/*.json --out reports/
//   mpkit verify --sizes 2,3,4,8,16,32,64 --skews 0,0.1,1,10,100 --trials 29
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 bad input.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mpkit/campaign.hpp"
#include "mpkit/errors.hpp"
#include "mpkit/idempotent.hpp"
#include "mpkit/io.hpp"
#include "mpkit/matched.hpp"
#include "mpkit/verifier.hpp"

namespace fs = std::filesystem;
using namespace mpkit;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitInput = 2;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flags shared by generate and verify.
struct CampaignFlags {
  std::vector<Index> sizes;
  std::string ranks;
  std::vector<double> skews;
  int trials = 1;
  std::uint64_t seed = 0;
  std::string config;
  CLI::Option* sizes_opt = nullptr;
  CLI::Option* ranks_opt = nullptr;
  CLI::Option* skews_opt = nullptr;
  CLI::Option* trials_opt = nullptr;
  CLI::Option* seed_opt = nullptr;

  bool any_given() const {
    return sizes_opt->count() + ranks_opt->count() + skews_opt->count() + trials_opt->count() > 0 ||
           !config.empty();
  }
};

struct ToleranceFlags {
  double id = Tolerances{}.id;
  double pinv = Tolerances{}.pinv;
  CLI::Option* id_opt = nullptr;
  CLI::Option* pinv_opt = nullptr;

  Tolerances apply(Tolerances tol) const {
    if (id_opt->count()) tol.id = id;
    if (pinv_opt->count()) tol.pinv = pinv;
    tol.validate();
    return tol;
  }
};

struct Options {
  CampaignFlags campaign;
  ToleranceFlags tol;
  std::string out;
  bool json = false;
  unsigned threads = 0;
  std::vector<std::string> files;
  std::string formula = "all";
};

std::uint64_t default_seed() {
  const char* env = std::getenv("MPKIT_SEED");
  if (env == nullptr || *env == '\0') return 0;
  try {
    std::size_t used = 0;
    const std::string text(env);
    if (text.front() == '-') throw std::invalid_argument(text);
    const unsigned long long v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw InputError(std::string("MPKIT_SEED: expected a non-negative integer, got \"") + env + "\"");
  }
}

std::vector<Index> parse_ranks(const std::string& text) {
  std::vector<Index> out;
  if (text.empty() || text == "random") return out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(static_cast<Index>(v));
    } catch (const std::exception&) {
      throw InputError("ranks: expected \"random\" or a comma-separated list of integers, got \"" +
                       text + "\"");
    }
  }
  return out;
}

CampaignConfig build_config(const Options& o) {
  const CampaignFlags& f = o.campaign;
  CampaignConfig c;
  c.sizes = f.sizes;
  c.ranks = parse_ranks(f.ranks);
  c.skews = f.skews;
  c.trials_per_cell = f.trials;
  c.seed = f.seed;
  if (!f.config.empty()) {
    // File values override the flag defaults; explicit flags override both.
    try {
      c = campaign_from_json(read_json_file(f.config), c);
    } catch (const std::invalid_argument& e) {
      throw InputError(f.config + ": " + e.what());
    }
    if (f.sizes_opt->count()) c.sizes = f.sizes;
    if (f.ranks_opt->count()) c.ranks = parse_ranks(f.ranks);
    if (f.skews_opt->count()) c.skews = f.skews;
    if (f.trials_opt->count()) c.trials_per_cell = f.trials;
    if (f.seed_opt->count()) c.seed = f.seed;
  }
  c.tol = o.tol.apply(c.tol);
  c.validate();
  return c;
}

void add_campaign_flags(CLI::App* cmd, CampaignFlags& f) {
  f.sizes_opt = cmd->add_option("--sizes", f.sizes, "Matrix sizes, comma separated")
                    ->delimiter(',');
  f.ranks_opt = cmd->add_option("--ranks", f.ranks,
                                "\"random\" (default) or one rank per size, comma separated");
  f.skews_opt = cmd->add_option("--skews", f.skews, "Corner operator norms, comma separated")
                    ->delimiter(',');
  f.trials_opt = cmd->add_option("--trials", f.trials, "Trials per (size, skew) cell");
  f.seed_opt = cmd->add_option("--seed", f.seed, "Campaign seed (default: $MPKIT_SEED or 0)");
  cmd->add_option("--config", f.config, "Campaign config JSON")->check(CLI::ExistingFile);
}

void add_tolerance_flags(CLI::App* cmd, ToleranceFlags& t) {
  t.id_opt = cmd->add_option("--tol-id", t.id, "Identity-check residual bound");
  t.pinv_opt = cmd->add_option("--tol-pinv", t.pinv, "Relative pseudoinverse cutoff");
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%11.3e", x);
  return buf;
}

std::string shortest(double x) {
  std::ostringstream s;
  s << x;
  return s.str();
}

// ---- generate --------------------------------------------------------------

int cmd_generate(const Options& o) {
  const CampaignConfig config = build_config(o);
  if (o.out.empty()) throw InputError("generate: --out DIR is required");
  const fs::path dir(o.out);
  fs::create_directories(dir);

  const auto trials = enumerate_trials(config);
  Json manifest = Json::array();
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const TrialSpec& t = trials[i];
    const BlockIdempotent b = realize(t, config.tol);
    char name[128];
    std::snprintf(name, sizeof name, "q%04zu_n%td_r%td_skew%s.json", i, t.n, t.rank,
                  shortest(t.skew).c_str());
    Json prov;
    prov["n"] = t.n;
    prov["r"] = t.rank;
    prov["skew"] = t.skew;
    prov["seed"] = t.seed;
    prov["campaign_seed"] = config.seed;
    prov["trial"] = t.trial;
    const fs::path path = dir / name;
    write_matrix_file(path, b.idempotent.matrix(), prov);

    Json entry;
    entry["file"] = path.string();
    entry["provenance"] = prov;
    manifest.push_back(entry);
    if (!o.json)
      std::cout << path.string() << "  n=" << t.n << " r=" << t.rank << " skew=" << shortest(t.skew)
                << " seed=" << t.seed << '\n';
  }
  if (o.json) std::cout << manifest.dump(2) << '\n';
  else std::cout << trials.size() << " file(s) written to " << dir.string() << '\n';
  return kExitPass;
}

// ---- match -----------------------------------------------------------------

struct LoadedInput {
  Idempotent q;
  InputDescriptor descriptor;
};

LoadedInput load_idempotent(const std::string& file, const Tolerances& tol) {
  const Json j = read_json_file(file);
  ComplexMatrix m;
  try {
    m = matrix_from_json(j);
  } catch (const ParseError& e) {
    throw ParseError(file + ": " + e.what(), e.line(), e.column());
  }
  Idempotent q = [&] {
    try {
      return validate_idempotent(std::move(m), tol);
    } catch (const Error& e) {
      throw InputError(file + ": " + e.what());
    }
  }();
  InputDescriptor d;
  d.source = file;
  d.n = q.size();
  d.rank = q.rank();
  if (j.contains("provenance") && j["provenance"].is_object()) {
    const Json& p = j["provenance"];
    if (p.contains("skew") && p["skew"].is_number()) d.skew = p["skew"].get<double>();
    if (p.contains("seed") && p["seed"].is_number_unsigned())
      d.seed = p["seed"].get<std::uint64_t>();
  }
  return {std::move(q), d};
}

void print_matrix(std::ostream& os, const ComplexMatrix& m) {
  for (Index i = 0; i < m.rows(); ++i) {
    os << "  [";
    for (Index j = 0; j < m.cols(); ++j) {
      char buf[64];
      std::snprintf(buf, sizeof buf, " %10.6f%+10.6fi", m(i, j).real(), m(i, j).imag());
      os << buf;
    }
    os << " ]\n";
  }
}

int cmd_match(const Options& o) {
  const Tolerances tol = o.tol.apply({});
  std::optional<Formula> only;
  if (o.formula != "all") {
    only = parse_formula(o.formula);
    if (!only) throw InputError("formula: unknown name \"" + o.formula + "\"");
  }
  const std::string& file = o.files.front();
  const LoadedInput in = load_idempotent(file, tol);
  const double scale = in.q.scale();
  const double threshold = tol.identity_threshold(scale);

  MatchedResult r;
  int code = kExitPass;
  std::string failure;
  try {
    r = matched(in.q, tol);
  } catch (const FormulaDisagreement& e) {
    failure = e.what();
    code = kExitFail;
  }

  Json out;
  out["input"] = file;
  out["n"] = in.q.size();
  out["rank"] = in.q.rank();
  out["formula"] = o.formula;
  if (code == kExitPass) {
    const ComplexMatrix& m = only ? r.per_formula.at(*only) : r.m;
    out["m"] = matrix_to_json(m);
    if (!only) {
      Json per = Json::object();
      for (Formula f : kAllFormulas) per[std::string(formula_name(f))] = matrix_to_json(r.per_formula.at(f));
      out["per_formula"] = per;
    }
    out["max_pairwise_dev"] = r.max_pairwise_dev;
    out["threshold"] = threshold;
    out["projection_residual"] = r.proj_residual;
  } else {
    out["error"] = failure;
  }

  if (!o.out.empty()) {
    fs::create_directories(o.out);
    const fs::path path = fs::path(o.out) / (fs::path(file).stem().string() + ".matched.json");
    write_json_file(path, out);
    if (!o.json) std::cout << "wrote " << path.string() << '\n';
  }
  if (o.json) {
    std::cout << out.dump(2) << '\n';
  } else if (code == kExitPass) {
    std::cout << "input               " << file << "  (n=" << in.q.size() << ", rank=" << in.q.rank()
              << ")\n";
    std::cout << "formula             " << o.formula << '\n';
    std::cout << "max_pairwise_dev    " << sci(r.max_pairwise_dev) << "   threshold " << sci(threshold)
              << '\n';
    std::cout << "projection residual " << sci(r.proj_residual) << '\n';
    if (in.q.size() <= 8) {
      std::cout << "m(Q) =\n";
      print_matrix(std::cout, only ? r.per_formula.at(*only) : r.m);
    }
  }
  if (code != kExitPass) std::cerr << "mpkit: " << file << ": " << failure << '\n';
  return code;
}

// ---- verify ----------------------------------------------------------------

double worst_ratio(const VerificationReport& r) {
  double worst = 0.0;
  for (const CheckResult& c : r.checks) worst = std::max(worst, c.residual / c.threshold);
  return worst;
}

void print_report_line(std::ostream& os, const VerificationReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-4s n=%3td r=%3td skew=%-7s worst=%s  %s\n",
                r.overall ? "ok" : "FAIL", r.input.n, r.input.rank,
                r.input.skew ? shortest(*r.input.skew).c_str() : "-", sci(worst_ratio(r)).c_str(),
                r.input.source.c_str());
  os << buf;
  for (const CheckResult& c : r.checks) {
    if (c.passed) continue;
    std::snprintf(buf, sizeof buf, "       %-22s residual=%s threshold=%s  ", c.id.c_str(),
                  sci(c.residual).c_str(), sci(c.threshold).c_str());
    os << buf << c.notes << '\n';
  }
}

void print_summary(std::ostream& os, const std::vector<VerificationReport>& reports,
                   const CampaignSummary& s) {
  os << "\ncheck                   passed / total   max residual/threshold\n";
  for (std::size_t k = 0; k < s.passes_per_check.size(); ++k) {
    double worst = 0.0;
    for (const VerificationReport& r : reports)
      worst = std::max(worst, r.checks[k].residual / r.checks[k].threshold);
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-22s %7zu / %-7zu %s\n", s.passes_per_check[k].first.c_str(),
                  s.passes_per_check[k].second, s.trials, sci(worst).c_str());
    os << buf;
  }
  os << "overall: " << s.passed << " / " << s.trials << " inputs pass\n";
}

int cmd_verify(const Options& o) {
  std::vector<VerificationReport> reports;
  Tolerances tol;
  Json config_json;
  if (!o.files.empty()) {
    if (o.campaign.any_given())
      throw InputError("verify: give either matrix files or campaign flags, not both");
    tol = o.tol.apply({});
    // Load everything first so a bad file stops the run before any work.
    std::vector<LoadedInput> inputs;
    inputs.reserve(o.files.size());
    for (const std::string& f : o.files) inputs.push_back(load_idempotent(f, tol));
    reports.resize(inputs.size());
    parallel_for(inputs.size(), o.threads, [&](std::size_t i) {
      reports[i] = verify_all(inputs[i].q, tol, inputs[i].descriptor);
    });
  } else {
    if (!o.campaign.any_given())
      throw InputError("verify: give matrix files, --config FILE, or --sizes/--skews");
    const CampaignConfig config = build_config(o);
    tol = config.tol;
    reports = run_campaign(config, o.threads);
    config_json["sizes"] = config.sizes;
    if (config.ranks.empty()) config_json["ranks"] = "random";
    else config_json["ranks"] = config.ranks;
    config_json["skews"] = config.skews;
    config_json["trials"] = config.trials_per_cell;
    config_json["seed"] = config.seed;
    config_json["tolerance"] = tolerances_to_json(config.tol);
  }

  const CampaignSummary summary = summarize(reports);
  Json out;
  if (!config_json.is_null()) out["campaign"] = config_json;
  out["reports"] = Json::array();
  for (const VerificationReport& r : reports) out["reports"].push_back(report_to_json(r));
  out["summary"] = summary_to_json(summary);

  if (!o.out.empty()) {
    fs::create_directories(o.out);
    const fs::path path = fs::path(o.out) / "report.json";
    write_json_file(path, out);
    if (!o.json) std::cout << "wrote " << path.string() << '\n';
  }
  if (o.json) {
    std::cout << out.dump(2) << '\n';
  } else {
    for (const VerificationReport& r : reports) print_report_line(std::cout, r);
    print_summary(std::cout, reports, summary);
  }
  return summary.passed == summary.trials ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mpkit: matched projections of idempotent matrices"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "mpkit 0.1.0");

  Options o;
  try {
    o.campaign.seed = default_seed();
  } catch (const InputError& e) {
    std::cerr << "mpkit: " << e.what() << '\n';
    return kExitInput;
  }

  CLI::App* gen = app.add_subcommand("generate", "Write random idempotents with provenance");
  add_campaign_flags(gen, o.campaign);
  add_tolerance_flags(gen, o.tol);
  gen->add_option("--out", o.out, "Output directory")->required();
  gen->add_flag("--json", o.json, "Print a JSON manifest instead of a listing");

  CLI::App* match = app.add_subcommand("match", "Compute m(Q) for one matrix file");
  match->add_option("file", o.files, "Matrix file")->required()->expected(1)->check(CLI::ExistingFile);
  match->add_option("--formula", o.formula, "original|qstar|q|symmetric|block|all")
      ->capture_default_str();
  add_tolerance_flags(match, o.tol);
  match->add_option("--out", o.out, "Directory for the result file");
  match->add_flag("--json", o.json, "Print the result as JSON");

  CLI::App* verify = app.add_subcommand("verify", "Check every identity on files or a campaign");
  verify->add_option("files", o.files, "Matrix files");
  add_campaign_flags(verify, o.campaign);
  add_tolerance_flags(verify, o.tol);
  verify->add_option("--out", o.out, "Directory for report.json");
  verify->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  verify->add_flag("--json", o.json, "Print the report as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*gen) return cmd_generate(o);
    if (*match) return cmd_match(o);
    return cmd_verify(o);
  } catch (const std::exception& e) {
    std::cerr << "mpkit: " << e.what() << '\n';
  }
  return kExitInput;
}
