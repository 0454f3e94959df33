#include <cmath>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lonely/chain.hpp"
#include "lonely/checks.hpp"
#include "lonely/coupling.hpp"
#include "lonely/dominance.hpp"
#include "lonely/mc.hpp"
#include "lonely/oracle.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

// Exit conventions: 0 success, 1 a verification or statistical gate failed,
// 2 usage error, 3 enumeration limit exceeded.
constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;
constexpr int kLimit = 3;

using lonely::Rational;

std::string decimal(double v) {
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

std::string rat(const Rational& r) { return lonely::fraction_string(r); }

std::string rat_decimal(const Rational& r) { return decimal(r.convert_to<double>()); }

std::string path_string(const lonely::Path& path) {
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i > 0) out += ' ';
    out += std::to_string(path[i]);
  }
  return out;
}

// Every command renders through one table-shaped report so the csv and json
// writers stay trivial and information-equivalent.
struct Report {
  std::string command;
  std::vector<std::pair<std::string, std::string>> params;
  std::vector<std::pair<std::string, std::string>> summary;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

std::string csv_field(const std::string& value) {
  if (value.find_first_of(",\"\n") == std::string::npos) return value;
  std::string quoted = "\"";
  for (char c : value) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

void print_csv(const Report& report) {
  std::cout << "# command: " << report.command << "\n";
  std::cout << "# version: " << kVersion << "\n";
  for (const auto& [key, value] : report.params) std::cout << "# " << key << ": " << value << "\n";
  for (const auto& [key, value] : report.summary) std::cout << "# " << key << ": " << value << "\n";
  for (std::size_t c = 0; c < report.columns.size(); ++c)
    std::cout << (c ? "," : "") << csv_field(report.columns[c]);
  std::cout << "\n";
  for (const auto& row : report.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) std::cout << (c ? "," : "") << csv_field(row[c]);
    std::cout << "\n";
  }
}

void print_json(const Report& report) {
  nlohmann::ordered_json out;
  out["command"] = report.command;
  out["version"] = kVersion;
  auto& params = out["parameters"] = nlohmann::ordered_json::object();
  for (const auto& [key, value] : report.params) params[key] = value;
  auto& summary = out["summary"] = nlohmann::ordered_json::object();
  for (const auto& [key, value] : report.summary) summary[key] = value;
  auto& rows = out["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : report.rows) {
    nlohmann::ordered_json obj;
    for (std::size_t c = 0; c < report.columns.size() && c < row.size(); ++c)
      obj[report.columns[c]] = row[c];
    rows.push_back(std::move(obj));
  }
  std::cout << out.dump(2) << "\n";
}

void emit(const Report& report, const std::string& format) {
  if (format == "json")
    print_json(report);
  else
    print_csv(report);
}

int run_exact_p(int n, int k, const std::string& format) {
  const Rational p = lonely::p_lonely(n, k);
  Report report;
  report.command = "exact p";
  report.params = {{"n", std::to_string(n)}, {"k", std::to_string(k)}};
  report.columns = {"n", "k", "p_lonely", "p_lonely_decimal"};
  report.rows.push_back({std::to_string(n), std::to_string(k), rat(p), rat_decimal(p)});
  emit(report, format);
  return kOk;
}

int run_exact_dist(int n, int k, const std::string& format) {
  const auto marginal = lonely::lonely_marginal(lonely::exact_joint_dist(n, k));
  Report report;
  report.command = "exact dist";
  report.params = {{"n", std::to_string(n)}, {"k", std::to_string(k)}};
  report.summary = {{"p_lonely", rat(1 - marginal.mass(0))}};
  report.columns = {"lonely", "probability", "probability_decimal"};
  for (const auto& [value, prob] : marginal.masses())
    report.rows.push_back({std::to_string(value), rat(prob), rat_decimal(prob)});
  emit(report, format);
  return kOk;
}

int run_exact_ne(int n, int l, int m, const std::string& format) {
  Report report;
  report.command = "exact ne";
  report.params = {{"n", std::to_string(n)}, {"l", std::to_string(l)}};
  report.columns = {"m", "occupied", "probability", "probability_decimal"};
  const int m_lo = m >= 0 ? m : 0;
  const int m_hi = m >= 0 ? m : n;
  if (m >= 0) report.params.emplace_back("m", std::to_string(m));
  for (int t = m_lo; t <= m_hi; ++t) {
    const auto dist = lonely::ne_nonempty_dist(l, n, t);
    for (const auto& [value, prob] : dist.masses())
      report.rows.push_back({std::to_string(t), std::to_string(value), rat(prob), rat_decimal(prob)});
  }
  emit(report, format);
  return kOk;
}

void append_suite(Report& report, const lonely::checks::SuiteResult& suite) {
  for (const auto& item : suite.items)
    report.rows.push_back({suite.suite, item.name, item.passed ? "pass" : "fail", item.detail});
}

int finish_suite(Report&& report, const lonely::checks::SuiteResult& suite,
                 const std::string& format) {
  report.columns = {"suite", "check", "status", "detail"};
  append_suite(report, suite);
  report.summary.emplace_back("all_passed", suite.all_passed() ? "true" : "false");
  emit(report, format);
  return suite.all_passed() ? kOk : kCheckFailed;
}

int run_check_theorem(int n_max, int k_max, const std::string& format) {
  const auto theorem = lonely::verify_theorem(n_max, k_max);
  Report report;
  report.command = "check theorem";
  report.params = {{"n-max", std::to_string(n_max)}, {"k-max", std::to_string(k_max)}};
  report.summary = {{"all_strict", theorem.all_strict ? "true" : "false"},
                    {"p_monotone", theorem.p_monotone ? "true" : "false"}};
  report.columns = {"n", "k", "relation", "p_k", "p_k_plus_1", "witness_u"};
  for (const auto& cell : theorem.cells)
    report.rows.push_back({std::to_string(cell.n), std::to_string(cell.k),
                           lonely::relation_name(cell.relation), rat(cell.p_lo), rat(cell.p_hi),
                           cell.witness_u ? std::to_string(*cell.witness_u) : ""});
  emit(report, format);
  return theorem.all_strict && theorem.p_monotone ? kOk : kCheckFailed;
}

int run_check_stirling(int n_max, const std::string& format) {
  Report report;
  report.command = "check stirling";
  report.params = {{"n-max", std::to_string(n_max)}};
  return finish_suite(std::move(report), lonely::checks::check_stirling(n_max), format);
}

int run_check_lemmas(int n_max, int k_max, std::uint64_t limit, const std::string& format) {
  Report report;
  report.command = "check lemmas";
  report.params = {{"n-max", std::to_string(n_max)},
                   {"k-max", std::to_string(k_max)},
                   {"limit", std::to_string(limit)}};
  return finish_suite(std::move(report), lonely::checks::check_lemmas(n_max, k_max, limit), format);
}

int run_check_oracle(int n_max, int k_max, std::uint64_t limit, const std::string& format) {
  Report report;
  report.command = "check oracle";
  report.params = {{"n-max", std::to_string(n_max)},
                   {"k-max", std::to_string(k_max)},
                   {"limit", std::to_string(limit)}};
  return finish_suite(std::move(report), lonely::checks::check_oracle(n_max, k_max, limit), format);
}

void append_violation_rows(Report& report, const lonely::ViolationReport& vr) {
  std::string first_at, first_detail;
  if (vr.first) {
    first_at = "pair " + std::to_string(vr.first->pair_index) + " time " +
               std::to_string(vr.first->time);
    first_detail = vr.first->detail;
  }
  report.rows.push_back({vr.predicate, std::to_string(vr.pairs_checked),
                         std::to_string(vr.violations), first_at, first_detail});
}

int run_couple(lonely::CouplingKind kind, int n, int param, std::uint64_t paths,
               std::uint64_t seed, bool negative_control, const std::string& format) {
  const auto run = lonely::run_coupling(kind, n, param, paths, seed, negative_control);
  Report report;
  report.command = std::string("couple ") + lonely::coupling_kind_name(kind);
  report.params = {{"n", std::to_string(n)},
                   {kind == lonely::CouplingKind::forward_nonempty ? "k" : "l",
                    std::to_string(param)},
                   {"paths", std::to_string(paths)},
                   {"seed", std::to_string(seed)},
                   {"negative-control", negative_control ? "true" : "false"}};
  report.columns = {"check", "pairs", "violations", "first_at", "detail"};
  append_violation_rows(report, run.dominance);
  if (kind == lonely::CouplingKind::monotone) append_violation_rows(report, run.shape);
  append_violation_rows(report, run.validity);

  bool gof_ok = true;
  // Goodness of fit of the sampled components against the exact path laws;
  // skipped for swapped negative-control runs and for horizons where the
  // exact law itself would be large.
  if (!negative_control && n <= 12) {
    const auto law_of = [&](int p) -> lonely::ExactDist<lonely::Path> {
      switch (kind) {
        case lonely::CouplingKind::forward_nonempty:
          return lonely::birth_path_law(n, p);
        case lonely::CouplingKind::conditioned_nonempty:
        case lonely::CouplingKind::monotone:
          return lonely::ConditionedChain(p, n).path_law();
        case lonely::CouplingKind::lonely: {
          const auto pairs = lonely::ConditionedChain(p, n).pair_path_law();
          return pairs.map([](const lonely::PathPair& q) { return q.lonely; });
        }
      }
      throw std::invalid_argument("couple: bad kind");
    };
    const auto add_gof = [&](const char* who, const lonely::GofResult& fit) {
      report.rows.push_back({who, std::to_string(paths), fit.impossible_outcome ? "impossible" : "",
                             "p-value " + decimal(fit.p_value),
                             "chi2 " + decimal(fit.statistic) + " over " +
                                 std::to_string(fit.bins) + " bins"});
      gof_ok = gof_ok && fit.passed(lonely::checks::kGofAlpha);
    };
    add_gof("gof-hi", lonely::chi_square_gof(run.hi_tally, law_of(run.param_hi), paths));
    add_gof("gof-lo", lonely::chi_square_gof(run.lo_tally, law_of(run.param_lo), paths));
  }

  const bool ok = run.clean() && gof_ok;
  report.summary = {{"clean", run.clean() ? "true" : "false"},
                    {"gof_passed", gof_ok ? "true" : "false"}};
  emit(report, format);
  return ok ? kOk : kCheckFailed;
}

int run_check_couplings(int n_max, std::uint64_t paths, std::uint64_t seed,
                        const std::string& format) {
  Report report;
  report.command = "check couplings";
  report.params = {{"n-max", std::to_string(n_max)},
                   {"paths", std::to_string(paths)},
                   {"seed", std::to_string(seed)}};
  return finish_suite(std::move(report), lonely::checks::check_couplings(n_max, paths, seed),
                      format);
}

int run_mc_p(int n, int k, std::uint64_t samples, std::uint64_t seed, const std::string& format) {
  const auto est = lonely::estimate_p(n, k, samples, seed);
  Report report;
  report.command = "mc p";
  report.params = {{"n", std::to_string(n)},
                   {"k", std::to_string(k)},
                   {"samples", std::to_string(samples)},
                   {"seed", std::to_string(seed)}};
  report.columns = {"estimate", "std_err", "exact", "z"};
  bool ok = true;
  std::string exact_str, z_str;
  if (est.exact_ref) {
    exact_str = rat(*est.exact_ref);
    const double z = est.z_score();
    z_str = decimal(z);
    ok = std::abs(z) <= lonely::checks::kSigmaBudget;
  }
  report.rows.push_back({decimal(est.value), decimal(est.std_err), exact_str, z_str});
  report.summary = {{"within_budget", ok ? "true" : "false"}};
  emit(report, format);
  return ok ? kOk : kCheckFailed;
}

int run_mc_shadow(int n, int k_max, std::uint64_t samples, std::uint64_t seed,
                  const std::string& format) {
  const auto shadow = lonely::monotonicity_shadow(n, k_max, samples, seed);
  Report report;
  report.command = "mc shadow";
  report.params = {{"n", std::to_string(n)},
                   {"k-max", std::to_string(k_max)},
                   {"samples", std::to_string(samples)},
                   {"seed", std::to_string(seed)}};
  report.columns = {"k", "estimate", "std_err", "exact", "z"};
  for (const auto& cell : shadow.cells) {
    const auto& est = cell.estimate;
    report.rows.push_back({std::to_string(cell.k), decimal(est.value), decimal(est.std_err),
                           est.exact_ref ? rat(*est.exact_ref) : "",
                           est.exact_ref ? decimal(est.z_score()) : ""});
  }
  report.summary = {{"nondecreasing_within_5sigma",
                     shadow.nondecreasing_within_5sigma ? "true" : "false"}};
  emit(report, format);
  return shadow.nondecreasing_within_5sigma ? kOk : kCheckFailed;
}

int run_oracle_joint(int n, int k, std::uint64_t limit, const std::string& format) {
  const auto slices = lonely::enumerate_joint(n, k, limit);
  const bool matches = slices == lonely::joint_dist_slices(n, k);
  Report report;
  report.command = "oracle joint";
  report.params = {{"n", std::to_string(n)},
                   {"k", std::to_string(k)},
                   {"limit", std::to_string(limit)}};
  report.summary = {{"matches_recursion", matches ? "true" : "false"}};
  report.columns = {"occupied", "lonely", "probability", "probability_decimal"};
  for (const auto& [state, prob] : slices.back().masses())
    report.rows.push_back({std::to_string(state.n_buses), std::to_string(state.lonely), rat(prob),
                           rat_decimal(prob)});
  emit(report, format);
  return matches ? kOk : kCheckFailed;
}

int run_oracle_ne(int n, int l, std::uint64_t limit, const std::string& format) {
  const auto ne = lonely::ne_enumerate(l, n, limit);
  const lonely::ConditionedChain chain(l, n);
  bool matches = ne.nonempty_path_law == chain.path_law() &&
                 ne.pair_path_law == chain.pair_path_law();
  for (int m = 0; m <= n && matches; ++m)
    matches = ne.nonempty_slices[static_cast<std::size_t>(m)] == chain.nonempty_dist(m) &&
              ne.nonempty_slices[static_cast<std::size_t>(m)] == lonely::ne_nonempty_dist(l, n, m);
  Report report;
  report.command = "oracle ne";
  report.params = {{"n", std::to_string(n)},
                   {"l", std::to_string(l)},
                   {"limit", std::to_string(limit)}};
  report.summary = {{"surjective_configs", ne.total.str()},
                    {"matches_chain", matches ? "true" : "false"}};
  report.columns = {"nonempty_path", "lonely_path", "probability"};
  for (const auto& [pair, prob] : ne.pair_path_law.masses())
    report.rows.push_back({path_string(pair.nonempty), path_string(pair.lonely), rat(prob)});
  emit(report, format);
  return matches ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact and sampled checks for the lonely passenger problem"};
  app.require_subcommand(1);
  // Lets --format (and any global flag) appear after the subcommand words;
  // subcommands inherit this at creation time.
  app.fallthrough();

  std::string format = "csv";
  app.add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  int n = 3, k = 2, l = 2, m = -1;
  int k_max = 8;
  std::uint64_t paths = 100000, samples = 100000;
  std::uint64_t seed = lonely::checks::kDefaultSeed;
  std::uint64_t limit = lonely::default_enum_limit();
  bool negative_control = false;

  int rc = kOk;

  auto* exact = app.add_subcommand("exact", "Exact rational quantities");
  exact->require_subcommand(1);
  auto* exact_p = exact->add_subcommand("p", "Probability that some passenger rides alone");
  exact_p->add_option("--n", n, "Passengers")->required();
  exact_p->add_option("--k", k, "Buses")->required();
  exact_p->callback([&] { rc = run_exact_p(n, k, format); });
  auto* exact_dist = exact->add_subcommand("dist", "Law of the lonely passenger count");
  exact_dist->add_option("--n", n, "Passengers")->required();
  exact_dist->add_option("--k", k, "Buses")->required();
  exact_dist->callback([&] { rc = run_exact_dist(n, k, format); });
  auto* exact_ne = exact->add_subcommand("ne", "Occupied-bus law conditioned on full occupancy");
  exact_ne->add_option("--n", n, "Passengers")->required();
  exact_ne->add_option("--l", l, "Buses, all eventually occupied")->required();
  exact_ne->add_option("--m", m, "Single time slice (default: all)");
  exact_ne->callback([&] { rc = run_exact_ne(n, l, m, format); });

  // Each suite keeps its own bounds so the defaults cannot bleed into one
  // another through the shared flag names.
  int thm_n_max = 12, thm_k_max = 8;
  int stir_n_max = 200;
  int lem_n_max = 10, lem_k_max = 6;
  int orc_n_max = 20, orc_k_max = 12;
  int coup_n_max = 10;

  auto* check = app.add_subcommand("check", "Exhaustive exact verification suites");
  check->require_subcommand(1);
  auto* check_theorem = check->add_subcommand("theorem", "Strict dominance across fleet sizes");
  check_theorem->add_option("--n-max", thm_n_max, "Largest passenger count")->capture_default_str();
  check_theorem->add_option("--k-max", thm_k_max, "Largest fleet size")->capture_default_str();
  check_theorem->callback([&] { rc = run_check_theorem(thm_n_max, thm_k_max, format); });
  auto* check_stirling = check->add_subcommand("stirling", "Stirling ratio and Newton inequalities");
  check_stirling->add_option("--n-max", stir_n_max, "Largest row")->capture_default_str();
  check_stirling->callback([&] { rc = run_check_stirling(stir_n_max, format); });
  auto* check_lemmas = check->add_subcommand("lemmas", "Supporting identities behind the chain");
  check_lemmas->add_option("--n-max", lem_n_max, "Largest passenger count")->capture_default_str();
  check_lemmas->add_option("--k-max", lem_k_max, "Largest fleet size")->capture_default_str();
  check_lemmas->add_option("--limit", limit, "Enumeration budget")->capture_default_str();
  check_lemmas->callback([&] { rc = run_check_lemmas(lem_n_max, lem_k_max, limit, format); });
  auto* check_oracle = check->add_subcommand("oracle", "Recursion versus brute enumeration");
  check_oracle->add_option("--n-max", orc_n_max, "Largest passenger count")->capture_default_str();
  check_oracle->add_option("--k-max", orc_k_max, "Largest fleet size")->capture_default_str();
  check_oracle->add_option("--limit", limit, "Enumeration budget")->capture_default_str();
  check_oracle->callback([&] { rc = run_check_oracle(orc_n_max, orc_k_max, limit, format); });
  auto* check_couplings = check->add_subcommand("couplings", "Sampled coupling guarantees");
  check_couplings->add_option("--n-max", coup_n_max, "Largest horizon")->capture_default_str();
  check_couplings->add_option("--paths", paths, "Paths per cell")->capture_default_str();
  check_couplings->add_option("--seed", seed, "Base seed")->capture_default_str();
  check_couplings->callback([&] { rc = run_check_couplings(coup_n_max, paths, seed, format); });

  auto* couple = app.add_subcommand("couple", "Sample coupled path pairs and verify guarantees");
  couple->require_subcommand(1);
  const auto add_couple = [&](const char* name, const char* help, lonely::CouplingKind kind,
                              const char* param_flag, int* param) {
    auto* sub = couple->add_subcommand(name, help);
    sub->add_option("--n", n, "Horizon (passengers)")->required();
    sub->add_option(param_flag, *param, "Chain parameter")->required();
    sub->add_option("--paths", paths, "Sampled pairs")->capture_default_str();
    sub->add_option("--seed", seed, "Base seed")->capture_default_str();
    sub->add_flag("--negative-control", negative_control,
                  "Swap the coupled pair before checking; must fail");
    sub->callback([&, kind, param] {
      rc = run_couple(kind, n, *param, paths, seed, negative_control, format);
    });
    return sub;
  };
  add_couple("forward", "Fleets of k and k+1 buses driven by shared uniforms",
             lonely::CouplingKind::forward_nonempty, "--k", &k);
  add_couple("conditioned", "Occupied-bus chains conditioned to end at l and l-1",
             lonely::CouplingKind::conditioned_nonempty, "--l", &l);
  add_couple("monotone", "Single-stream reverse coupling of conditioned chains",
             lonely::CouplingKind::monotone, "--l", &l);
  add_couple("lonely", "Lonely-count processes above conditioned occupancy chains",
             lonely::CouplingKind::lonely, "--l", &l);

  auto* mc = app.add_subcommand("mc", "Monte Carlo estimates against exact references");
  mc->require_subcommand(1);
  auto* mc_p = mc->add_subcommand("p", "Estimate the lonely probability");
  mc_p->add_option("--n", n, "Passengers")->required();
  mc_p->add_option("--k", k, "Buses")->required();
  mc_p->add_option("--samples", samples, "Sample size")->capture_default_str();
  mc_p->add_option("--seed", seed, "Seed")->capture_default_str();
  mc_p->callback([&] { rc = run_mc_p(n, k, samples, seed, format); });
  auto* mc_shadow = mc->add_subcommand("shadow", "Sampled monotonicity sweep over fleet sizes");
  mc_shadow->add_option("--n", n, "Passengers")->required();
  mc_shadow->add_option("--k-max", k_max, "Largest fleet size")->required();
  mc_shadow->add_option("--samples", samples, "Sample size per fleet")->capture_default_str();
  mc_shadow->add_option("--seed", seed, "Seed")->capture_default_str();
  mc_shadow->callback([&] { rc = run_mc_shadow(n, k_max, samples, seed, format); });

  auto* oracle = app.add_subcommand("oracle", "Brute-force enumeration cross-checks");
  oracle->require_subcommand(1);
  auto* oracle_joint = oracle->add_subcommand("joint", "Joint occupied and lonely counts");
  oracle_joint->add_option("--n", n, "Passengers")->required();
  oracle_joint->add_option("--k", k, "Buses")->required();
  oracle_joint->add_option("--limit", limit, "Enumeration budget")->capture_default_str();
  oracle_joint->callback([&] { rc = run_oracle_joint(n, k, limit, format); });
  auto* oracle_ne = oracle->add_subcommand("ne", "Conditioned path laws by enumeration");
  oracle_ne->add_option("--n", n, "Passengers")->required();
  oracle_ne->add_option("--l", l, "Buses, all eventually occupied")->required();
  oracle_ne->add_option("--limit", limit, "Enumeration budget")->capture_default_str();
  oracle_ne->callback([&] { rc = run_oracle_ne(n, l, limit, format); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  } catch (const lonely::EnumerationLimitError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kLimit;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kCheckFailed;
  }
  return rc;
}
