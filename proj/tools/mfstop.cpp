// mfstop: command-line front end.
//
// Exit codes: 0 success, 1 failed checks, 2 bad configuration or usage.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mfstop/mfstop.hpp"

namespace fs = std::filesystem;
using namespace mfstop;

namespace {

struct ModelOptions {
  std::string preset_id;
  std::string config_path;
  std::optional<double> r;
  std::optional<double> c;
  std::optional<Count> n;
  std::optional<double> t;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string stem;
  unsigned threads = 0;
};

void add_model_options(CLI::App* app, ModelOptions& o, bool with_threads) {
  app->add_option("--model", o.preset_id, "preset id (" + [] {
    std::string s;
    for (const auto& id : preset_ids()) s += (s.empty() ? "" : ", ") + id;
    return s;
  }() + ")");
  app->add_option("--config", o.config_path, "key-value model configuration file");
  app->add_option("--r", o.r, "threshold r");
  app->add_option("--c", o.c, "interaction constant c");
  app->add_option("--n", o.n, "number of players");
  app->add_option("--t", o.t, "time");
  app->add_option("--seed", o.seed, "64-bit seed");
  app->add_option("--out", o.out, "output directory (default $MFSTOP_OUT_DIR or ./mfstop-out)");
  app->add_option("--stem", o.stem, "output file name stem");
  if (with_threads) app->add_option("--threads", o.threads, "worker threads (0 = all cores)");
}

fs::path output_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("MFSTOP_OUT_DIR"); env && *env) return env;
  return "mfstop-out";
}

struct Loaded {
  ModelSpec spec;
  ConfigMap extra;
};

Loaded load_model(const ModelOptions& o) {
  if (o.preset_id.empty() == o.config_path.empty()) throw ConfigError("give exactly one of --model and --config");
  Loaded l{o.preset_id.empty() ? model_from_config(load_config_file(o.config_path)) : preset(o.preset_id), {}};
  if (!o.config_path.empty()) l.extra = load_config_file(o.config_path);
  if (o.r || o.c) {
    // the default post-horizon level depends on r, so rebuild the model
    if (o.r) l.spec.params.r = *o.r;
    if (o.c) l.spec.params.c = *o.c;
    if (!l.extra.count("post_value") && l.spec.model.horizon())
      l.spec.model = SignalModel::with_default_post(l.spec.model.law(), l.spec.model.horizon(), l.spec.params.r,
                                                    l.spec.model.shift());
  }
  if (o.n) l.spec.params.n = *o.n;
  if (o.seed) l.spec.seed = *o.seed;
  l.spec.params.validate();
  return l;
}

std::vector<double> parse_grid(const std::string& text) {
  if (text.find(':') != std::string::npos) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(parse_double("grid", item));
    if (parts.size() != 3 || !(parts[2] > 0.0) || parts[1] < parts[0])
      throw ConfigError("range must read lo:hi:step with step > 0");
    std::vector<double> out;
    const auto count = static_cast<long>(std::floor((parts[1] - parts[0]) / parts[2] + 1e-9));
    for (long i = 0; i <= count; ++i) out.push_back(parts[0] + static_cast<double>(i) * parts[2]);
    return out;
  }
  return parse_list("grid", text);
}

std::vector<double> default_grid(const SignalModel& m) {
  if (!m.horizon()) return {0.0};
  const double T = *m.horizon();
  return {0.0, 0.5 * T, T};
}

void print_report_summary(const ExperimentReport& rep, const std::vector<fs::path>& files) {
  for (const auto& [k, e] : rep.estimates)
    std::cout << k << " = " << format_number(e.value) << "  (se " << format_number(e.std_error) << ", 95% ["
              << format_number(e.ci_low) << ", " << format_number(e.ci_high) << "])\n";
  for (const auto& [k, v] : rep.references) std::cout << "reference " << k << " = " << format_number(v) << "\n";
  for (const auto& c : rep.checks) std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "  " << c.detail << "\n";
  for (const auto& f : files) std::cout << "wrote " << f.string() << "\n";
}

MfFlow flow_from_notes(const nlohmann::json& notes) {
  MfFlow f;
  f.grid = notes.at("flow_grid").get<std::vector<double>>();
  f.values = notes.at("flow_values").get<std::vector<double>>();
  const auto kind = notes.value("flow_kind", std::string("custom"));
  f.kind = kind == "minimal" ? FlowKind::minimal : kind == "maximal" ? FlowKind::maximal : FlowKind::custom;
  return f;
}

ExperimentReport run_kind(const std::string& kind, const ExperimentConfig& cfg, const MfFlow* target) {
  if (kind == "histogram") return run_histogram(cfg);
  if (kind == "near") return estimate_near(cfg);
  if (kind == "extremal") return extremal_law(cfg);
  if (kind == "scaling") return scaling_experiment(cfg, cfg.betas);
  if (!target) throw ConfigError("experiment '" + kind + "' needs a target flow");
  if (kind == "fatou") return fatou_diagnostic(cfg, *target);
  if (kind == "track") return track_experiment(cfg, *target);
  throw ConfigError("unknown experiment kind '" + kind + "'");
}

std::string get_or(const ConfigMap& m, const std::string& key, const std::string& fallback) {
  auto it = m.find(key);
  return it == m.end() ? fallback : it->second;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilibria of a mean field stopping game and its n-player versions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  // solve
  ModelOptions solve_o;
  std::string solve_grid;
  SolverConfig solver;
  auto* solve = app.add_subcommand("solve", "roots, classes, quartet and extremal flows of the mean field equation");
  add_model_options(solve, solve_o, false);
  solve->add_option("--grid", solve_grid, "flow grid: comma list or lo:hi:step");
  solve->add_option("--scan-points", solver.scan_points, "uniform scan points");
  solve->add_option("--tol", solver.tol, "root tolerance");

  // nplayer
  ModelOptions np_o;
  std::string np_emit = "json";
  Count np_samples = 1;
  auto* nplayer = app.add_subcommand("nplayer", "equilibrium counts of sampled n-player games");
  add_model_options(nplayer, np_o, false);
  nplayer->add_option("--emit", np_emit, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  nplayer->add_option("--samples", np_samples, "number of samples");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "seeded Monte Carlo experiments");
  simulate->require_subcommand(1);
  ModelOptions sim_o;
  std::optional<Count> sim_samples;
  std::optional<double> sim_eps, sim_x, sim_delta, sim_tol;
  std::string sim_set, sim_mode, sim_ladder, sim_betas, sim_grid, sim_target;
  bool sim_svg = false;
  std::vector<CLI::App*> sim_subs;
  const std::pair<const char*, const char*> sim_kinds[] = {
      {"histogram", "histogram of equilibrium counts k/n"},
      {"near", "probability and mean number of equilibria within eps of x"},
      {"extremal", "law of the smallest and largest equilibrium"},
      {"fatou", "exceedance of extremal paths over a target flow, across --n-ladder"},
      {"scaling", "expected counts in windows of half-width beta/sqrt(n)"},
      {"track", "success rate of tracking a target flow within delta"}};
  for (const auto& [name, about] : sim_kinds) {
    auto* sub = simulate->add_subcommand(name, about);
    add_model_options(sub, sim_o, true);
    sub->add_option("--samples", sim_samples, "number of samples");
    sub->add_option("--eps", sim_eps, "window half-width");
    sub->add_option("--x", sim_x, "target location");
    sub->add_option("--set", sim_set, "K or K_star");
    sub->add_option("--mode", sim_mode, "all, minimal or maximal");
    sub->add_option("--delta", sim_delta, "tracking tolerance");
    sub->add_option("--tol", sim_tol, "exceedance tolerance");
    sub->add_option("--n-ladder", sim_ladder, "comma list of n values");
    sub->add_option("--betas", sim_betas, "comma list of window scales");
    sub->add_option("--grid", sim_grid, "time grid: comma list or lo:hi:step");
    sub->add_option("--flow", sim_target, "target flow: minimal, maximal or a constant");
    sub->add_flag("--svg", sim_svg, "also write an SVG histogram");
    sim_subs.push_back(sub);
  }

  // asymptotics
  std::optional<double> as_alpha, as_x, as_beta;
  std::string as_out, curve_grid, curve_out;
  auto* asym = app.add_subcommand("asymptotics", "closed-form limit statistics");
  asym->add_option("--alpha", as_alpha, "slope parameter alpha");
  asym->add_option("--x", as_x, "root location (for the scaling window)");
  asym->add_option("--beta", as_beta, "window scale");
  auto* curve = asym->add_subcommand("curve", "limit statistics over a grid of alpha values (CSV)");
  curve->add_option("--alpha-grid", curve_grid, "lo:hi:step")->required();
  curve->add_option("--out", curve_out, "output directory");

  // reproduce
  std::string rep_id;
  std::string rep_out;
  unsigned rep_threads = 0;
  auto* reproduce_cmd = app.add_subcommand("reproduce", "canonical experiment of a preset with its checks");
  reproduce_cmd->add_option("id", rep_id, "preset id")->required();
  reproduce_cmd->add_option("--out", rep_out, "output directory");
  reproduce_cmd->add_option("--threads", rep_threads, "worker threads (0 = all cores)");

  // rerun
  std::string rerun_path, rerun_out, rerun_stem = "rerun";
  unsigned rerun_threads = 0;
  bool rerun_check = false;
  auto* rerun = app.add_subcommand("rerun", "re-run the configuration embedded in a report");
  rerun->add_option("report", rerun_path, "report JSON")->required();
  rerun->add_option("--out", rerun_out, "output directory");
  rerun->add_option("--stem", rerun_stem, "output file name stem");
  rerun->add_option("--threads", rerun_threads, "worker threads (0 = all cores)");
  rerun->add_flag("--check", rerun_check, "exit 1 unless the new report equals the original");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*solve) {
      const auto l = load_model(solve_o);
      const double t = solve_o.t.value_or(0.0);
      const auto grid = solve_grid.empty() ? default_grid(l.spec.model) : parse_grid(solve_grid);
      const auto summary = solve_summary(l.spec.model, l.spec.params, t, grid, solver);
      const auto j = to_json(summary, l.spec, t, solver);
      const fs::path dir = output_dir(solve_o.out);
      const std::string stem = solve_o.stem.empty() ? "solve" : solve_o.stem;
      write_text(dir / (stem + ".json"), j.dump(2) + "\n");
      write_text(dir / (stem + "_flow.csv"), flow_csv(summary.minimal, summary.maximal));
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (*nplayer) {
      const auto l = load_model(np_o);
      if (!l.spec.seed) throw ConfigError("--seed is required for models from --config");
      if (np_samples < 1) throw ConfigError("samples must be >= 1");
      const Count n = l.spec.params.players();
      const double t = np_o.t.value_or(0.0);
      nlohmann::json arr = nlohmann::json::array();
      std::ostringstream csv;
      csv << "sample,min,max,K,K_star\n";
      auto join = [](const std::vector<Count>& v) {
        std::string s;
        for (Count k : v) s += (s.empty() ? "" : " ") + std::to_string(k);
        return s;
      };
      for (Count s = 0; s < np_samples; ++s) {
        const auto sample = draw_sample(l.spec.model, l.spec.params, t, *l.spec.seed, static_cast<std::uint64_t>(s), n);
        const auto eq = enumerate(sample);
        arr.push_back({{"sample", s}, {"min", eq.K.front()}, {"max", eq.K.back()}, {"K", eq.K}, {"K_star", eq.K_star}});
        csv << s << ',' << eq.K.front() << ',' << eq.K.back() << ',' << join(eq.K) << ',' << join(eq.K_star) << '\n';
      }
      nlohmann::json j{{"version", kVersion},
                       {"kind", "nplayer"},
                       {"config",
                        {{"model_id", l.spec.id},
                         {"model", model_to_json(l.spec.model)},
                         {"r", l.spec.params.r},
                         {"c", l.spec.params.c},
                         {"n", n},
                         {"t", t},
                         {"seed", *l.spec.seed},
                         {"samples", np_samples}}},
                       {"samples", arr}};
      const fs::path dir = output_dir(np_o.out);
      const std::string stem = np_o.stem.empty() ? "nplayer" : np_o.stem;
      if (np_emit == "json") {
        write_text(dir / (stem + ".json"), j.dump(2) + "\n");
        std::cout << j.dump(2) << "\n";
      } else {
        write_text(dir / (stem + ".csv"), csv.str());
        std::cout << csv.str();
      }
      return 0;
    }

    if (*simulate) {
      CLI::App* sub = nullptr;
      for (auto* s : sim_subs)
        if (*s) sub = s;
      const std::string kind = sub->get_name();
      const auto l = load_model(sim_o);
      if (!l.spec.seed) throw ConfigError("--seed is required for models from --config");
      const auto& x = l.extra;
      ExperimentConfig cfg(l.spec);
      cfg.threads = sim_o.threads;
      cfg.t = sim_o.t ? *sim_o.t : x.count("t") ? parse_double("t", x.at("t")) : 0.0;
      cfg.samples = sim_samples ? *sim_samples
                                : x.count("samples") ? parse_int("samples", x.at("samples"))
                                                     : (kind == "scaling" ? 0 : 1000);
      cfg.eps = sim_eps ? *sim_eps : x.count("eps") ? parse_double("eps", x.at("eps")) : cfg.eps;
      cfg.x = sim_x ? *sim_x : x.count("x") ? parse_double("x", x.at("x")) : cfg.x;
      cfg.delta = sim_delta ? *sim_delta : x.count("delta") ? parse_double("delta", x.at("delta")) : cfg.delta;
      cfg.tol = sim_tol ? *sim_tol : x.count("tol") ? parse_double("tol", x.at("tol")) : cfg.tol;
      cfg.set = set_selector_from(sim_set.empty() ? get_or(x, "set", "K") : sim_set);
      cfg.mode = histogram_mode_from(sim_mode.empty() ? get_or(x, "mode", "all") : sim_mode);
      const std::string ladder = sim_ladder.empty() ? get_or(x, "n_ladder", "") : sim_ladder;
      for (double v : parse_list("n_ladder", ladder)) cfg.n_ladder.push_back(static_cast<Count>(v));
      const std::string betas = sim_betas.empty() ? get_or(x, "betas", "0.5, 1, 2") : sim_betas;
      cfg.betas = kind == "scaling" ? parse_list("betas", betas) : std::vector<double>{};
      const std::string grid = sim_grid.empty() ? get_or(x, "grid", "") : sim_grid;

      std::optional<MfFlow> target;
      if (kind == "fatou" || kind == "track") {
        cfg.grid = grid.empty() ? std::vector<double>{0.0, 0.5} : parse_grid(grid);
        if (kind == "fatou" && cfg.n_ladder.empty()) cfg.n_ladder = {100, 1000, 10000};
        const std::string which = sim_target.empty() ? get_or(x, "flow", kind == "fatou" ? "minimal" : "") : sim_target;
        if (which == "minimal" || which == "maximal") {
          target = flow(cfg.model, cfg.params, which == "minimal" ? FlowKind::minimal : FlowKind::maximal, cfg.grid);
        } else {
          const double u = which.empty() ? cfg.x : parse_double("flow", which);
          target = MfFlow{cfg.grid, std::vector<double>(cfg.grid.size(), u), FlowKind::custom};
        }
      }
      const auto rep = run_kind(kind, cfg, target ? &*target : nullptr);
      const fs::path dir = output_dir(sim_o.out);
      const auto files = emit_report(rep, dir, sim_o.stem.empty() ? kind : sim_o.stem, EmitFormats{true, true, sim_svg});
      print_report_summary(rep, files);
      return 0;
    }

    if (*asym) {
      if (*curve) {
        const auto parts = parse_grid(curve_grid);
        if (parts.empty()) throw ConfigError("empty alpha grid");
        const double step = parts.size() > 1 ? parts[1] - parts[0] : 1.0;
        const auto table = asymptotics_curve(parts.front(), parts.back(), step);
        const std::string text = csv_table(table.columns, table.rows);
        const fs::path dir = output_dir(curve_out);
        write_text(dir / "curve.csv", text);
        std::vector<double> xs;
        std::vector<std::pair<std::string, std::vector<double>>> series{
            {"kstar_limit", {}}, {"expected_count", {}}, {"lower_L", {}}};
        for (const auto& row : table.rows) {
          xs.push_back(row[0]);
          series[0].second.push_back(row[2]);
          series[1].second.push_back(row[3]);
          series[2].second.push_back(row[4]);
        }
        write_text(dir / "curve.svg", curve_svg(xs, series, "alpha", "limit statistics"));
        std::cout << text;
        return 0;
      }
      if (!as_alpha) throw ConfigError("--alpha is required");
      if (*as_alpha == 1.0) throw DomainError("expected number of equilibria diverges at alpha = 1");
      auto j = to_json(alpha_stats(*as_alpha));
      if (as_x && as_beta) {
        j["x"] = *as_x;
        j["beta"] = *as_beta;
        j["window_expected_count"] = window_expected_count(*as_alpha, *as_x, *as_beta);
      }
      std::cout << j.dump(2) << "\n";
      return 0;
    }

    if (*reproduce_cmd) {
      const fs::path dir = output_dir(rep_out);
      const auto res = reproduce(rep_id, dir, rep_threads);
      for (const auto& c : res.checks) std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "  " << c.detail << "\n";
      for (const auto& f : res.files) std::cout << "wrote " << f.string() << "\n";
      return res.passed() ? 0 : 1;
    }

    if (*rerun) {
      std::ifstream in(rerun_path);
      if (!in) throw ConfigError("cannot open report '" + rerun_path + "'");
      nlohmann::json original;
      try {
        in >> original;
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("report is not valid JSON: ") + e.what());
      }
      const std::string kind = original.value("kind", std::string());
      auto cfg = config_from_json(original.at("config"));
      cfg.threads = rerun_threads;
      std::optional<MfFlow> target;
      if (original.contains("notes") && original["notes"].contains("flow_grid")) target = flow_from_notes(original["notes"]);
      const auto rep = run_kind(kind, cfg, target ? &*target : nullptr);
      const fs::path dir = output_dir(rerun_out);
      const auto files = emit_report(rep, dir, rerun_stem, EmitFormats{true, true, false});
      print_report_summary(rep, files);
      if (rerun_check) {
        const bool same = to_json(rep).dump() == original.dump();
        std::cout << (same ? "identical to the original report\n" : "DIFFERS from the original report\n");
        return same ? 0 : 1;
      }
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
