#include "parlab/cli.hpp"

#include "parlab/io.hpp"
#include "parlab/maxreg.hpp"
#include "parlab/verify.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace parlab {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

json load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config '" + path.string() + "'");
  json cfg;
  in >> cfg;
  return cfg;
}

struct CheckRequest {
  std::string id;
  json overrides;
};

std::vector<CheckRequest> parse_checks(const json& cfg) {
  std::vector<CheckRequest> out;
  if (!cfg.contains("checks") || !cfg["checks"].is_array())
    throw std::runtime_error("config: 'checks' must be an array");
  for (const auto& item : cfg["checks"]) {
    CheckRequest req;
    if (item.is_string()) {
      req.id = item.get<std::string>();
      req.overrides = json::object();
    } else if (item.is_object()) {
      req.id = item.value("id", "");
      req.overrides = item;
    } else {
      throw std::runtime_error("config: each check must be a string or object");
    }
    req.id = canonical_check_id(req.id);
    if (!is_known_check(req.id))
      throw std::runtime_error("config: unknown check id '" + req.id + "'");
    out.push_back(std::move(req));
  }
  return out;
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

ordered_json report_to_json(const CheckReport& r) {
  ordered_json j;
  j["check_id"] = r.check_id;
  j["scenario"] = r.scenario;
  j["pass"] = r.pass;
  j["tolerance_policy"] = r.tolerance_policy;
  ordered_json rows = ordered_json::array();
  for (const auto& m : r.rows) {
    ordered_json row;
    row["name"] = m.name;
    row["measured"] = m.measured;
    row["bound"] = m.bound;
    row["slack"] = m.slack;
    row["pass"] = m.pass;
    row["formula"] = m.formula;
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j;
}

ordered_json norm_section(const CoefficientField& A, double horizon,
                          const std::vector<double>& p_list, int delta_levels,
                          std::uint64_t seed) {
  Rng rng(mix_seed(seed, "norms_section"));
  SpaceField u0 = random_mean_zero_field(A.grid, rng);
  NormConfig cfg = make_norm_config(horizon, delta_levels,
                                    horizon * std::pow(2.0, -delta_levels - 1));
  auto times = geometric_times(horizon, cfg.t_min * 1.01);
  ExactFlow flow(std::make_shared<CoefficientField>(A));
  SpaceTimeField u = flow.sample(u0, times, true);
  SpaceTimeField grads = make_space_time_field(A.grid, u.times, u.gradient_slices);

  NormReport rep = bochner_norms(u, p_list);
  rep.provenance = "seeded mean-zero datum evolved by the scenario flow";
  for (double p : p_list) {
    rep.set("tent_p" + std::to_string(p), tent_norm(u, p, cfg));
    rep.set("tent_grad_p" + std::to_string(p), tent_norm(grads, p, cfg));
    rep.set("xp_p" + std::to_string(p), xp_norm(u, p, cfg));
  }
  rep.set("hneg1_dtu_at_T",
          hneg1_seminorm(make_field(
              A.grid, Vector(-assemble_operator(A, A.piece_at(horizon)).apply(
                          u.slices.back().values)))));
  ordered_json out;
  for (const auto& kv : rep.values) out[kv.first] = kv.second;
  out["provenance"] = rep.provenance;
  return out;
}

ordered_json maxreg_section(const CoefficientField& A, double horizon, int probes,
                            std::uint64_t seed) {
  AutonomousKit kit(A, 0);
  const int slices = 64;
  std::vector<double> times(slices);
  for (int i = 0; i < slices; ++i) times[i] = horizon * (i + 1) / slices;

  auto make_probes = [&](int arity) {
    std::vector<SpaceTimeField> out;
    Rng rng(mix_seed(seed, "maxreg_probes"));
    for (int p = 0; p < probes; ++p) {
      std::vector<SpaceField> sl;
      for (int i = 0; i < slices; ++i) sl.push_back(random_field(A.grid, rng, arity));
      out.push_back(make_space_time_field(A.grid, times, std::move(sl)));
    }
    return out;
  };

  auto l2l2 = [&](const SpaceTimeField& f) {
    double acc = 0.0;
    const double dt = times[0];
    for (const auto& s : f.slices) acc += dt * std::pow(l2_norm(s), 2);
    return std::sqrt(acc);
  };

  ordered_json out;
  out["ml_l2l2_lower_bound"] = estimate_operator_norm(
      [&](const SpaceTimeField& f) { return apply_ML(kit, f); }, l2l2, l2l2,
      make_probes(1));
  NormConfig cfg = make_norm_config(horizon, 6);
  for (double p : {1.0, 4.0 / 3.0, 2.0, 4.0}) {
    auto tentp = [&, p](const SpaceTimeField& f) { return tent_norm(f, p, cfg); };
    out["mltilde_tent_p" + std::to_string(p)] = estimate_operator_norm(
        [&](const SpaceTimeField& f) { return apply_ML_tilde(kit, f); }, tentp,
        tentp, make_probes(A.grid->dim));
  }
  out["probes"] = probes;
  return out;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    out += c;
  }
  out += "\"";
  return out;
}

}  // namespace

int run_suite(const RunOptions& opts) {
  json cfg;
  std::vector<CheckRequest> requests;
  GridPtr grid;
  std::shared_ptr<CoefficientField> coeffs;
  std::shared_ptr<Propagator> prop;
  Scheme scheme;
  double horizon = 1.0;
  std::uint64_t seed = 1;

  try {
    cfg = load_config(opts.config_path);
    if (!cfg.contains("grid") || !cfg.contains("coefficients"))
      throw std::runtime_error("config: 'grid' and 'coefficients' are required");
    horizon = cfg.value("horizon", 1.0);
    if (!(horizon > 0.0)) throw std::runtime_error("config: horizon must be positive");

    const auto& gj = cfg["grid"];
    grid = build_grid(gj.value("dim", 1), gj.value("n", 64), gj.value("period", 16.0));

    seed = cfg["coefficients"].value("seed", 1);
    if (opts.seed_override) seed = *opts.seed_override;

    requests = parse_checks(cfg);

    // locality constraint for the Gaffney and reverse-Hoelder checks
    for (const auto& r : requests)
      if (r.id == "check_offdiagonal" || r.id == "check_reverse_holder")
        if (grid->period < 8.0 * std::sqrt(horizon))
          throw std::runtime_error(
              "config: period >= 8 sqrt(horizon) required by " + r.id);

    const std::string scenario = cfg["coefficients"].value("scenario", "");
    const json params = cfg["coefficients"].value("params", json::object());
    coeffs = std::make_shared<CoefficientField>(
        make_scenario(scenario, grid, params, horizon, seed));

    const auto& sj = cfg.contains("scheme") ? cfg["scheme"] : json::object();
    scheme = parse_scheme(sj.value("kind", "exact_expm"), sj.value("substeps", 1));
    prop = std::make_shared<Propagator>(coeffs, scheme);

    std::filesystem::create_directories(opts.out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  const json norms_cfg = cfg.contains("norms") ? cfg["norms"] : json::object();
  const int delta_levels = norms_cfg.value("delta_levels", 8);
  const std::vector<double> p_list =
      norms_cfg.value("p", std::vector<double>{1.0, 2.0, 4.0});
  const std::string scenario_name = cfg["coefficients"].value("scenario", "");

  ScenarioSpec spec;
  spec.name = scenario_name;
  spec.params = cfg["coefficients"].value("params", json::object());
  spec.dim = grid->dim;
  spec.points_per_axis = grid->points_per_axis;
  spec.period = grid->period;
  spec.horizon = horizon;
  spec.seed = seed;

  struct Slot {
    CheckReport report;
    double wall_ms = 0.0;
    std::string error;
  };
  std::vector<Slot> slots(requests.size());

  auto run_one = [&](std::size_t i) {
    RunContext ctx;
    ctx.grid = grid;
    ctx.coeffs = coeffs;
    ctx.prop = prop;
    ctx.scheme = scheme;
    ctx.horizon = horizon;
    ctx.delta_levels = delta_levels;
    ctx.p_list = p_list;
    ctx.seed = mix_seed(seed, requests[i].id);
    ctx.scenario = spec;
    ctx.overrides = requests[i].overrides;
    auto t0 = std::chrono::steady_clock::now();
    try {
      slots[i].report = run_check(requests[i].id, ctx);
      slots[i].report.scenario = scenario_name;
    } catch (const std::exception& e) {
      slots[i].error = e.what();
    }
    slots[i].wall_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
  };

  int workers = cfg.value("workers", 0);
  if (workers <= 0)
    workers = static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(requests.size())));

  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= requests.size()) return;
        run_one(i);
      }
    });
  for (auto& th : pool) th.join();

  bool runtime_error = false;
  bool all_pass = true;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    if (!slots[i].error.empty()) {
      std::cerr << "error in " << requests[i].id << ": " << slots[i].error << "\n";
      runtime_error = true;
    } else if (!slots[i].report.pass) {
      all_pass = false;
    }
  }

  // assemble the report single-threaded
  ordered_json report;
  report["tool"] = {{"name", "parlab"}, {"version", kVersion}};
  {
    ordered_json resolved = ordered_json::parse(cfg.dump());
    resolved["coefficients"]["seed"] = seed;
    report["config"] = std::move(resolved);
  }
  report["ellipticity"] = {{"lambda", coeffs->ellipticity.lambda},
                           {"Lambda", coeffs->ellipticity.Lambda},
                           {"alpha", coeffs->ellipticity.alpha},
                           {"rh_exponent", coeffs->ellipticity.rh_exponent},
                           {"bv", coeffs->bv}};
  try {
    report["norms"] = norm_section(*coeffs, horizon, p_list, delta_levels, seed);
    if (cfg.contains("maxreg") && cfg["maxreg"].value("enabled", false))
      report["maxreg"] = maxreg_section(*coeffs, horizon,
                                        cfg["maxreg"].value("probes", 16), seed);
  } catch (const std::exception& e) {
    std::cerr << "error in norm/maxreg section: " << e.what() << "\n";
    runtime_error = true;
  }
  ordered_json checks = ordered_json::array();
  for (std::size_t i = 0; i < requests.size(); ++i) {
    if (!slots[i].error.empty()) {
      ordered_json failed;
      failed["check_id"] = requests[i].id;
      failed["scenario"] = scenario_name;
      failed["pass"] = false;
      failed["error"] = slots[i].error;
      checks.push_back(std::move(failed));
    } else {
      checks.push_back(report_to_json(slots[i].report));
    }
  }
  report["checks"] = std::move(checks);
  report["pass"] = all_pass && !runtime_error;

  try {
    write_text_file(opts.out_dir / "report.json", report.dump(2) + "\n");

    std::ostringstream csv;
    csv << "check_id,scenario,measured,bound,slack,pass,wall_ms\n";
    for (std::size_t i = 0; i < requests.size(); ++i) {
      if (!slots[i].error.empty()) {
        csv << requests[i].id << "," << csv_escape(scenario_name)
            << ",nan,nan,nan,false," << fmt_double(slots[i].wall_ms) << "\n";
        continue;
      }
      for (const auto& m : slots[i].report.rows)
        csv << requests[i].id << "." << m.name << "," << csv_escape(scenario_name)
            << "," << fmt_double(m.measured) << "," << fmt_double(m.bound) << ","
            << fmt_double(m.slack) << "," << (m.pass ? "true" : "false") << ","
            << fmt_double(slots[i].wall_ms) << "\n";
    }
    write_text_file(opts.out_dir / "checks.csv", csv.str());

    if (opts.dump_kernels) {
      dump_coefficients(*coeffs, opts.out_dir / "coefficients");
      // a few kernel columns at representative times
      const double T = horizon;
      int src = grid->cells() / 2;
      int idx = 0;
      for (double t : {T / 4.0, T / 2.0, T}) {
        nlohmann::json extra = {{"kind", "kernel_column"},
                                {"t", t},
                                {"s", 0.0},
                                {"source_cell", src}};
        dump_field(prop->kernel_column(t, 0.0, src),
                   opts.out_dir / ("kernel_" + std::to_string(idx++)), extra);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error writing outputs: " << e.what() << "\n";
    return 1;
  }

  for (std::size_t i = 0; i < requests.size(); ++i) {
    if (!slots[i].error.empty()) continue;
    std::cout << (slots[i].report.pass ? "[PASS] " : "[FAIL] ") << requests[i].id
              << "\n";
  }
  if (runtime_error) return 1;
  return all_pass ? 0 : 2;
}

std::string list_checks_text() {
  std::ostringstream out;
  out << "check id                        default tolerance            anchor\n";
  for (const auto& d : check_descriptors()) {
    out << d.id;
    for (std::size_t k = d.id.size(); k < 32; ++k) out << ' ';
    out << d.tolerance;
    for (std::size_t k = d.tolerance.size(); k < 30; ++k) out << ' ';
    out << d.anchor << "\n";
  }
  return out.str();
}

}  // namespace parlab
