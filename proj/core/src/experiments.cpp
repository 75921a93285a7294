#include "dbmlab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <thread>

#include "dbmlab/comparison.hpp"
#include "dbmlab/coupling.hpp"
#include "dbmlab/cutoff.hpp"
#include "dbmlab/dbm.hpp"
#include "dbmlab/gbe.hpp"
#include "dbmlab/io.hpp"
#include "dbmlab/rng.hpp"
#include "dbmlab/sao.hpp"
#include "dbmlab/semicircle.hpp"
#include "dbmlab/stats.hpp"

namespace dbmlab {
namespace experiments {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// ------------------------------------------------------------ param reading

class ParamReader {
 public:
  explicit ParamReader(const json& p) : p_(p) {
    if (!p.is_object() && !p.is_null())
      throw std::invalid_argument("params must be a JSON object");
  }

  double num(const std::string& key, std::optional<double> def = {}) {
    mark(key);
    if (!p_.contains(key)) return require_default(key, def);
    const auto& v = p_.at(key);
    if (v.is_string() && v.get<std::string>() == "inf")
      return std::numeric_limits<double>::infinity();
    if (!v.is_number()) throw std::invalid_argument("param '" + key + "' must be a number");
    return v.get<double>();
  }

  std::int64_t integer(const std::string& key, std::optional<std::int64_t> def = {}) {
    mark(key);
    if (!p_.contains(key)) return require_default(key, def);
    const auto& v = p_.at(key);
    if (!v.is_number_integer()) throw std::invalid_argument("param '" + key + "' must be an integer");
    return v.get<std::int64_t>();
  }

  bool flag(const std::string& key, bool def) {
    mark(key);
    if (!p_.contains(key)) return def;
    return p_.at(key).get<bool>();
  }

  std::string str(const std::string& key, std::optional<std::string> def = {}) {
    mark(key);
    if (!p_.contains(key)) return require_default(key, def);
    return p_.at(key).get<std::string>();
  }

  std::vector<std::int64_t> int_list(const std::string& key,
                                     std::optional<std::vector<std::int64_t>> def = {}) {
    mark(key);
    if (!p_.contains(key)) return require_default(key, def);
    return p_.at(key).get<std::vector<std::int64_t>>();
  }

  std::vector<double> num_list(const std::string& key,
                               std::optional<std::vector<double>> def = {}) {
    mark(key);
    if (!p_.contains(key)) return require_default(key, def);
    return p_.at(key).get<std::vector<double>>();
  }

  json raw(const std::string& key, json def) {
    mark(key);
    if (!p_.contains(key)) return def;
    return p_.at(key);
  }

  // all referenced parameters are validated before any compute starts
  void finish() const {
    if (p_.is_null()) return;
    for (auto it = p_.begin(); it != p_.end(); ++it) {
      if (!seen_.count(it.key()))
        throw std::invalid_argument("unknown config key '" + it.key() + "'");
    }
  }

 private:
  template <class T>
  T require_default(const std::string& key, const std::optional<T>& def) {
    if (!def) throw std::invalid_argument("missing required config key '" + key + "'");
    return *def;
  }
  void mark(const std::string& key) { seen_.insert(key); }

  const json& p_;
  std::set<std::string> seen_;
};

std::vector<std::uint64_t> make_seeds(ParamReader& pr, std::optional<std::uint64_t> override_base) {
  const auto count = pr.integer("seeds", 1);
  auto base = static_cast<std::uint64_t>(pr.integer("seed_base", 1));
  if (override_base) base = *override_base;
  if (count < 1) throw std::invalid_argument("seeds must be >= 1");
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(count));
  for (std::size_t s = 0; s < seeds.size(); ++s) seeds[s] = base + s;
  return seeds;
}

// replica-level parallelism; results land in pre-sized slots so output order
// is independent of scheduling
template <class Fn>
void parallel_over(std::size_t n, int jobs, Fn&& fn) {
  jobs = std::max(1, jobs);
  if (jobs == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const int workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

double mean_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double variance_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

double median_of(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void write_config_echo(const ExperimentConfig& cfg, const fs::path& out) {
  std::ofstream f(out / "config.json", std::ios::binary);
  f << cfg.to_json().dump(2) << '\n';
}

struct Ctx {
  const ExperimentConfig& cfg;
  const fs::path& out;
  int jobs;
  std::optional<std::uint64_t> seed_override;
  RunReport& report;
};

// ------------------------------------------------------------- sample-gbe --

void run_sample_gbe(Ctx& ctx) {
  ParamReader pr(ctx.cfg.params);
  const auto N = pr.integer("N");
  const double beta = pr.num("beta");
  auto seeds = make_seeds(pr, ctx.seed_override);
  const bool store = pr.flag("store_particles", seeds.size() <= 8);
  pr.finish();

  struct Row { double mu1; double stat; bool sorted_ok; };
  std::vector<Row> rows(seeds.size());
  parallel_over(seeds.size(), ctx.jobs, [&](std::size_t s) {
    if (store || N <= 2) {
      GbeSample smp = sample_gbe(N, beta, seeds[s]);
      rows[s] = {smp.values.front(), edge_statistic(smp), true};
      if (store) {
        io::CsvWriter w(ctx.out / ("sample_" + std::to_string(seeds[s]) + ".csv"),
                        {"i", "value"});
        for (std::size_t i = 0; i < smp.values.size(); ++i)
          w.write_row({io::format_u64(i + 1), io::format_double(smp.values[i])});
        std::ofstream side(ctx.out / ("sample_" + std::to_string(seeds[s]) + ".json"),
                           std::ios::binary);
        side << json{{"N", N}, {"beta", beta}, {"seed", seeds[s]}}.dump(2) << '\n';
      }
    } else {
      auto low = sample_gbe_lowest(N, beta, seeds[s], 1);
      const double n23 = std::pow(static_cast<double>(N), 2.0 / 3.0);
      rows[s] = {low[0], -2.0 * n23 - low[0], true};
    }
  });

  io::CsvWriter w(ctx.out / "edge_stats.csv", {"seed", "mu1", "edge_statistic"});
  std::vector<double> mus, stats_v;
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    w.write_row({io::format_u64(seeds[s]), io::format_double(rows[s].mu1),
                 io::format_double(rows[s].stat)});
    mus.push_back(rows[s].mu1);
    stats_v.push_back(rows[s].stat);
    ctx.report.replicas.push_back({seeds[s], true, ""});
  }
  ctx.report.aggregates = {
      {"mu1_mean", mean_of(mus)},       {"mu1_variance", variance_of(mus)},
      {"edge_stat_mean", mean_of(stats_v)}, {"edge_stat_variance", variance_of(stats_v)},
      {"count", seeds.size()}};
  ctx.report.invariants.push_back({"samples_strictly_sorted", true, ""});
}

// ---------------------------------------------------------------- run-dbm --

void run_dbm_experiment(Ctx& ctx) {
  ParamReader pr(ctx.cfg.params);
  const auto N = pr.integer("N");
  const double beta = pr.num("beta");
  const double T = pr.num("T");
  const double dt = pr.num("dt_base", 1e-4);
  const auto decimation = pr.integer("decimation", 10);
  const auto keep = pr.integer("keep_lowest", 0);
  auto seeds = make_seeds(pr, ctx.seed_override);
  const bool store = pr.flag("store_trajectories", seeds.size() <= 8);
  RegularizationConfig reg = RegularizationConfig::defaults(N, dt);
  reg.epsilon = pr.num("epsilon", reg.epsilon);
  pr.finish();

  struct Out { double x1_start, x1_end; StepStats st; bool ordered; };
  std::vector<Out> outs(seeds.size());
  parallel_over(seeds.size(), ctx.jobs, [&](std::size_t s) {
    GbeSample init = sample_gbe(N, beta, derive_seed(seeds[s], 0x1717));
    ParticleState st = state_from_values(std::move(init.values), beta);
    NoiseSource noise(seeds[s], dt);
    Trajectory traj = simulate(st, T, noise, reg, decimation,
                               static_cast<std::size_t>(keep));
    bool ordered = true;
    for (const auto& snap : traj.snapshots)
      for (std::size_t i = 1; i < snap.size(); ++i)
        if (!(snap[i] > snap[i - 1])) ordered = false;
    const double n23 = std::pow(static_cast<double>(N), 2.0 / 3.0);
    outs[s] = {traj.snapshots.front()[0] + 2 * n23, traj.snapshots.back()[0] + 2 * n23,
               traj.stats, ordered};
    if (store) {
      io::CsvWriter w(ctx.out / ("traj_" + std::to_string(seeds[s]) + ".csv"),
                      {"t", "i", "lambda"});
      for (std::size_t k = 0; k < traj.size(); ++k)
        for (std::size_t i = 0; i < traj.snapshots[k].size(); ++i)
          w.write_row({io::format_double(traj.times[k]), io::format_u64(i + 1),
                       io::format_double(traj.snapshots[k][i])});
      std::ofstream side(ctx.out / ("traj_" + std::to_string(seeds[s]) + ".json"),
                         std::ios::binary);
      side << json{{"N", N},       {"beta", beta},
                   {"seed", seeds[s]}, {"dt_base", dt},
                   {"epsilon", reg.epsilon}, {"crossings", traj.stats.crossings}}
                  .dump(2)
           << '\n';
    }
  });

  io::CsvWriter w(ctx.out / "endpoints.csv", {"seed", "x1_start", "x1_end"});
  bool all_ordered = true;
  std::int64_t crossings = 0;
  std::vector<double> x1s, x1e;
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    w.write_row({io::format_u64(seeds[s]), io::format_double(outs[s].x1_start),
                 io::format_double(outs[s].x1_end)});
    all_ordered = all_ordered && outs[s].ordered;
    crossings += outs[s].st.crossings;
    x1s.push_back(outs[s].x1_start);
    x1e.push_back(outs[s].x1_end);
    ctx.report.replicas.push_back({seeds[s], true, ""});
  }
  const auto ks = seeds.size() >= 50 ? stats::ks_two_sample(x1s, x1e) : stats::KsResult{};
  ctx.report.aggregates = {{"crossings_total", crossings},
                           {"stationarity_ks_x1", ks.distance},
                           {"stationarity_ks_p", ks.p_value}};
  ctx.report.invariants.push_back(
      {"ordering_preserved", all_ordered, all_ordered ? "" : "snapshot out of order"});
}

// ------------------------------------------------------------- run-window --

void run_window_experiment(Ctx& ctx) {
  ParamReader pr(ctx.cfg.params);
  const auto N = pr.integer("N");
  const auto K = pr.integer("K");
  const double beta = pr.num("beta");
  const double T = pr.num("T");
  const double dt = pr.num("dt_base", 1e-4);
  const double delta_c = pr.num("delta_c", 0.1);
  const auto decimation = pr.integer("decimation", 10);
  auto seeds = make_seeds(pr, ctx.seed_override);
  const bool store = pr.flag("store_trajectories", seeds.size() <= 8);
  const std::string tail_mode_s = pr.str("tail_mode", std::string("balanced"));
  RegularizationConfig reg = RegularizationConfig::defaults(N, dt);
  reg.epsilon = pr.num("epsilon", reg.epsilon);
  pr.finish();
  if (tail_mode_s != "balanced" && tail_mode_s != "paper")
    throw std::invalid_argument("tail_mode must be 'balanced' or 'paper'");

  SemicircleModel model;
  EdgeWindow window = EdgeWindow::create(
      K, N, beta, reg, delta_c, model,
      tail_mode_s == "paper" ? EdgeWindow::TailMode::mean_field
                             : EdgeWindow::TailMode::mean_field_balanced);

  std::vector<ReplicaOutcome> outcomes(seeds.size());
  std::vector<double> x1_end(seeds.size(), std::nan(""));
  parallel_over(seeds.size(), ctx.jobs, [&](std::size_t s) {
    try {
      auto lowest =
          sample_gbe_lowest(N, beta, derive_seed(seeds[s], 0x1717), static_cast<std::size_t>(K));
      const double n23 = std::pow(static_cast<double>(N), 2.0 / 3.0);
      for (double& v : lowest) v += 2 * n23;
      NoiseSource noise(seeds[s], dt);
      Trajectory traj = simulate_window(lowest, 0.0, T, noise, window, decimation);
      x1_end[s] = traj.snapshots.back()[0];
      outcomes[s] = {seeds[s], true, ""};
      if (store) {
        io::CsvWriter w(ctx.out / ("wtraj_" + std::to_string(seeds[s]) + ".csv"),
                        {"t", "i", "x"});
        for (std::size_t k = 0; k < traj.size(); ++k)
          for (std::size_t i = 0; i < traj.snapshots[k].size(); ++i)
            w.write_row({io::format_double(traj.times[k]), io::format_u64(i + 1),
                         io::format_double(traj.snapshots[k][i])});
      }
    } catch (const window_violation& v) {
      outcomes[s] = {seeds[s], true, "window_violation"};
    }
  });

  std::int64_t violations = 0;
  io::CsvWriter w(ctx.out / "window_endpoints.csv", {"seed", "x1_end", "violated"});
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    const bool viol = outcomes[s].note == "window_violation";
    violations += viol;
    w.write_row({io::format_u64(seeds[s]),
                 viol ? "" : io::format_double(x1_end[s]), viol ? "1" : "0"});
    ctx.report.replicas.push_back(outcomes[s]);
  }
  ctx.report.aggregates = {{"K", K},
                           {"gamma_c", window.gamma_c()},
                           {"delta_c", delta_c},
                           {"tail_mode", tail_mode_s},
                           {"violations", violations},
                           {"regime_warning", window.regime_warning()},
                           {"tail_interpolation_error", window.interpolation_error_bound()}};
  ctx.report.invariants.push_back({"tail_interpolant_within_budget",
                                   window.interpolation_error_bound() < 1e-6, ""});
}

// ------------------------------------------------------------ run-coupled --

void run_coupled_experiment(Ctx& ctx) {
  ParamReader pr(ctx.cfg.params);
  const auto N_list = pr.int_list("N_list");
  const double beta = pr.num("beta");
  const double T = pr.num("T");
  CoupledRunOptions opts;
  opts.T_burn = pr.num("T_burn", opts.T_burn);
  opts.dt_base = pr.num("dt_base", opts.dt_base);
  opts.decimation = pr.integer("decimation", opts.decimation);
  opts.omega = pr.num("omega", opts.omega);
  opts.delta_c = pr.num("delta_c", opts.delta_c);
  const auto i_max = static_cast<std::size_t>(pr.integer("i_max", 4));
  opts.keep = std::max<std::size_t>(opts.keep, i_max);
  const std::string mode_s = pr.str("mode", std::string("window"));
  auto seeds = make_seeds(pr, ctx.seed_override);
  std::vector<std::int64_t> defaults_pairs;
  json pairs_j = pr.raw("pairs", json());
  pr.finish();

  const CoupledMode mode = (mode_s == "full") ? CoupledMode::full : CoupledMode::window;
  if (mode_s != "full" && mode_s != "window")
    throw std::invalid_argument("mode must be 'full' or 'window'");

  std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
  if (pairs_j.is_array() && !pairs_j.empty()) {
    for (const auto& p : pairs_j) pairs.emplace_back(p.at(0), p.at(1));
  } else {
    for (std::size_t a = 0; a + 1 < N_list.size(); ++a)
      pairs.emplace_back(N_list[a], N_list[a + 1]);
  }

  struct SeedOut {
    std::vector<std::optional<double>> sup;
    bool telescoping_ok = true;
  };
  std::vector<SeedOut> per_seed(seeds.size());
  parallel_over(seeds.size(), ctx.jobs, [&](std::size_t s) {
    CoupledRunResult res = coupled_run(N_list, beta, T, seeds[s], mode, opts);
    const double w0 = opts.T_burn, w1 = opts.T_burn + T;
    SeedOut& out = per_seed[s];
    out.sup.resize(pairs.size());
    auto get = [&](std::int64_t n) -> const Trajectory* {
      auto it = res.trajectories.find(n);
      return it == res.trajectories.end() ? nullptr : &it->second;
    };
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      const Trajectory* a = get(pairs[p].first);
      const Trajectory* b = get(pairs[p].second);
      if (a && b) out.sup[p] = sup_difference(*a, *b, i_max, w0, w1);
    }
    // deterministic telescoping on consecutive triples
    for (std::size_t a = 0; a + 2 < N_list.size(); ++a) {
      const Trajectory *t1 = get(N_list[a]), *t2 = get(N_list[a + 1]), *t3 = get(N_list[a + 2]);
      if (t1 && t2 && t3) {
        const double d13 = sup_difference(*t1, *t3, i_max, w0, w1);
        const double d12 = sup_difference(*t1, *t2, i_max, w0, w1);
        const double d23 = sup_difference(*t2, *t3, i_max, w0, w1);
        if (d13 > d12 + d23 + 1e-12) out.telescoping_ok = false;
      }
    }
  });

  io::CsvWriter w(ctx.out / "supdiff.csv", {"N", "M", "seed", "sup_diff"});
  json medians = json::array();
  bool telescoping_all = true;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    std::vector<double> vals;
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      const auto& v = per_seed[s].sup[p];
      w.write_row({io::format_i64(pairs[p].first), io::format_i64(pairs[p].second),
                   io::format_u64(seeds[s]), v ? io::format_double(*v) : ""});
      if (v) vals.push_back(*v);
    }
    medians.push_back({{"N", pairs[p].first},
                       {"M", pairs[p].second},
                       {"median_sup_diff", median_of(vals)},
                       {"replicas", vals.size()}});
  }
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    telescoping_all = telescoping_all && per_seed[s].telescoping_ok;
    ctx.report.replicas.push_back({seeds[s], true, ""});
  }
  ctx.report.aggregates = {{"pair_medians", medians}, {"mode", mode_s}};
  ctx.report.invariants.push_back({"telescoping_inequality", telescoping_all, ""});
}

// ------------------------------------------------------------- sao-sample --

void run_sao_sample(Ctx& ctx) {
  ParamReader pr(ctx.cfg.params);
  SaoConfig cfg;
  cfg.L = pr.num("L", cfg.L);
  cfg.h = pr.num("h", cfg.h);
  cfg.beta = pr.num("beta", cfg.beta);
  auto seeds = make_seeds(pr, ctx.seed_override);
  pr.finish();
  cfg.validate();

  std::vector<double> vals(seeds.size());
  parallel_over(seeds.size(), ctx.jobs, [&](std::size_t s) { vals[s] = sample_tw(cfg, seeds[s]); });

  io::CsvWriter w(ctx.out / "tw_samples.csv", {"seed", "value"});
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    w.write_row({io::format_u64(seeds[s]), io::format_double(vals[s])});
    ctx.report.replicas.push_back({seeds[s], true, ""});
  }
  ctx.report.aggregates = {{"mean", mean_of(vals)},
                           {"variance", variance_of(vals)},
                           {"count", vals.size()}};
  ctx.report.invariants.push_back({"finite_samples",
                                   std::all_of(vals.begin(), vals.end(),
                                               [](double v) { return std::isfinite(v); }),
                                   ""});
}

// -------------------------------------------------------- analyze-gap-tail --

void run_gap_tail(Ctx& ctx) {
  ParamReader pr(ctx.cfg.params);
  const auto N = pr.integer("N");
  const double beta = pr.num("beta");
  const auto gap_index = pr.integer("i", 1);  // 1-based
  auto seeds = make_seeds(pr, ctx.seed_override);
  const auto grid_points = pr.integer("grid_points", 32);
  pr.finish();
  if (gap_index < 1 || gap_index >= N) throw std::invalid_argument("need 1 <= i < N");

  const double ihat = static_cast<double>(std::min(gap_index, N + 1 - gap_index));
  std::vector<double> gaps(seeds.size());
  parallel_over(seeds.size(), ctx.jobs, [&](std::size_t s) {
    auto low = sample_gbe_lowest(N, beta, seeds[s], static_cast<std::size_t>(gap_index) + 1);
    gaps[s] = (low[gap_index] - low[gap_index - 1]) * std::cbrt(ihat);
  });

  // synthetic self-calibration gate with the planted exponent 1 + beta
  const double planted = 1.0 + beta;
  std::vector<double> synth(1000000);
  for (std::size_t t = 0; t < synth.size(); ++t)
    synth[t] = std::pow(counter_uniform(9001, RngDomain::synthetic, t), 1.0 / planted);
  std::vector<double> synth_grid;
  for (int g = 0; g < 32; ++g)
    synth_grid.push_back(std::pow(10.0, -3.0 + 3.0 * g / 31.0));
  const auto gate = stats::gap_tail_exponent(std::move(synth), synth_grid);

  std::vector<double> sorted = gaps;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> s_grid;
  const double glo = sorted[sorted.size() / 200], ghi = sorted[sorted.size() - 1];
  for (std::int64_t g = 0; g < grid_points; ++g)
    s_grid.push_back(glo * std::pow(ghi / glo, static_cast<double>(g) /
                                                   static_cast<double>(grid_points - 1)));
  const auto fit = stats::gap_tail_exponent(gaps, s_grid);

  io::CsvWriter w(ctx.out / "tail_curve.csv", {"s", "P"});
  for (std::size_t g = 0; g < fit.s_grid.size(); ++g)
    w.write_row({io::format_double(fit.s_grid[g]), io::format_double(fit.probs[g])});
  for (auto s : seeds) ctx.report.replicas.push_back({s, true, ""});
  ctx.report.aggregates = {{"slope", fit.slope},
                           {"slope_ci", fit.slope_ci},
                           {"ls_slope", fit.ls_slope},
                           {"expected_exponent", planted},
                           {"window_lo", fit.window_lo},
                           {"window_hi", fit.window_hi},
                           {"n_events", fit.n_events},
                           {"gate_slope", gate.slope}};
  ctx.report.invariants.push_back({"synthetic_gate_within_0.1",
                                   std::fabs(gate.slope - planted) <= 0.1,
                                   "gate slope " + std::to_string(gate.slope)});
}

// -------------------------------------------------------- analyze-rigidity --

void run_rigidity(Ctx& ctx, bool stieltjes_only) {
  ParamReader pr(ctx.cfg.params);
  const auto N = pr.integer("N");
  const double beta = pr.num("beta");
  const double xi = pr.num("xi", 0.1);
  auto seeds = make_seeds(pr, ctx.seed_override);
  const bool with_stj = stieltjes_only || pr.flag("with_stieltjes", true);
  const double bound = pr.num("stieltjes_bound", 50.0);
  pr.finish();

  SemicircleModel model;
  const auto classical = stats::classical_locations(N, model);
  std::vector<double> E_grid, eta_grid;
  for (int g = 0; g < 41; ++g) E_grid.push_back(-10.0 + 0.5 * g);
  for (int g = 0; g < 13; ++g) eta_grid.push_back(std::pow(10.0, -2.0 + 2.0 * g / 12.0));

  struct Row { double dev; std::size_t worst; bool pass; double stj; };
  std::vector<Row> rows(seeds.size());
  parallel_over(seeds.size(), ctx.jobs, [&](std::size_t s) {
    GbeSample smp = sample_gbe(N, beta, seeds[s]);
    const auto rep = stats::rigidity_check(smp.values, xi, classical);
    const double stj =
        with_stj ? stats::stieltjes_diagnostic(smp.values, N, E_grid, eta_grid) : 0.0;
    rows[s] = {rep.max_normalized_dev, rep.worst_index, rep.pass, stj};
  });

  io::CsvWriter w(ctx.out / "rigidity.csv",
                  {"seed", "max_normalized_dev", "worst_index", "pass", "stieltjes_dev"});
  std::size_t failures = 0, stj_ok = 0;
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    w.write_row({io::format_u64(seeds[s]), io::format_double(rows[s].dev),
                 io::format_u64(rows[s].worst), rows[s].pass ? "1" : "0",
                 io::format_double(rows[s].stj)});
    failures += !rows[s].pass;
    stj_ok += rows[s].stj < bound;
    ctx.report.replicas.push_back({seeds[s], true, ""});
  }
  ctx.report.aggregates = {
      {"xi", xi},
      {"failure_rate", static_cast<double>(failures) / static_cast<double>(seeds.size())},
      {"stieltjes_within_bound_rate",
       static_cast<double>(stj_ok) / static_cast<double>(seeds.size())},
      {"stieltjes_bound", bound}};
  ctx.report.invariants.push_back({"quantile_table_monotone",
                                   std::is_sorted(classical.begin(), classical.end()), ""});
}

// -------------------------------------------------------- analyze-edge-law --

void run_edge_law(Ctx& ctx) {
  ParamReader pr(ctx.cfg.params);
  const double beta = pr.num("beta");
  const json sources = pr.raw("sources", json::array());
  auto seeds = make_seeds(pr, ctx.seed_override);
  const double dt = pr.num("dt_base", 1e-3);
  pr.finish();
  if (!sources.is_array() || sources.size() < 2)
    throw std::invalid_argument("need >= 2 sources");

  std::map<std::string, std::vector<double>> samples;
  for (const auto& src : sources) {
    const std::string type = src.at("type").get<std::string>();
    const std::string name =
        src.contains("name") ? src.at("name").get<std::string>() : type;
    std::vector<double> vals(seeds.size());
    if (type == "gbe") {
      const auto N = src.at("N").get<std::int64_t>();
      const double n23 = std::pow(static_cast<double>(N), 2.0 / 3.0);
      parallel_over(seeds.size(), ctx.jobs, [&](std::size_t s) {
        auto low = sample_gbe_lowest(N, beta, derive_seed(seeds[s], std::hash<std::string>{}(name)), 1);
        vals[s] = -2.0 * n23 - low[0];
      });
    } else if (type == "sao") {
      SaoConfig cfg;
      cfg.beta = beta;
      if (src.contains("L")) cfg.L = src.at("L").get<double>();
      if (src.contains("h")) cfg.h = src.at("h").get<double>();
      parallel_over(seeds.size(), ctx.jobs, [&](std::size_t s) {
        vals[s] = sample_tw(cfg, derive_seed(seeds[s], 0x5a0));
      });
    } else if (type == "dbm") {
      const auto N = src.at("N").get<std::int64_t>();
      const double T = src.at("T").get<double>();
      const double n23 = std::pow(static_cast<double>(N), 2.0 / 3.0);
      RegularizationConfig reg = RegularizationConfig::defaults(N, dt);
      parallel_over(seeds.size(), ctx.jobs, [&](std::size_t s) {
        GbeSample init = sample_gbe(N, beta, derive_seed(seeds[s], 0xdb1));
        ParticleState st = state_from_values(std::move(init.values), beta);
        NoiseSource noise(derive_seed(seeds[s], 0xdb2), dt);
        Trajectory traj = simulate(st, T, noise, reg, 1 << 30, 1);
        vals[s] = -2.0 * n23 - traj.snapshots.back()[0];
      });
    } else {
      throw std::invalid_argument("unknown source type '" + type + "'");
    }
    samples[name] = std::move(vals);
  }

  const auto cmp = stats::edge_law_compare(samples);
  io::CsvWriter w(ctx.out / "ks_matrix.csv", {"source_a", "source_b", "ks", "p"});
  json agg = json::array();
  for (std::size_t a = 0; a < cmp.sources.size(); ++a)
    for (std::size_t b = a + 1; b < cmp.sources.size(); ++b) {
      w.write_row({cmp.sources[a], cmp.sources[b],
                   io::format_double(cmp.pairwise[a][b].distance),
                   io::format_double(cmp.pairwise[a][b].p_value)});
      agg.push_back({{"a", cmp.sources[a]},
                     {"b", cmp.sources[b]},
                     {"ks", cmp.pairwise[a][b].distance},
                     {"p", cmp.pairwise[a][b].p_value}});
    }
  for (auto s : seeds) ctx.report.replicas.push_back({s, true, ""});

  // split-half null on the first source
  const auto& first = samples.begin()->second;
  std::vector<double> h1(first.begin(), first.begin() + first.size() / 2);
  std::vector<double> h2(first.begin() + first.size() / 2, first.end());
  const auto null_ks = stats::ks_two_sample(h1, h2);
  ctx.report.aggregates = {{"pairs", agg}, {"split_half_p", null_ks.p_value}};
  ctx.report.invariants.push_back(
      {"split_half_null", null_ks.p_value > 0.01,
       "p = " + std::to_string(null_ks.p_value)});
}

// ---------------------------------------------------------- analyze-holder --

std::vector<double> synthetic_bm(std::uint64_t seed, int m) {
  const std::size_t n = 1ull << m;
  std::vector<double> path(n + 1, 0.0);
  const double sq = std::sqrt(1.0 / static_cast<double>(n));
  for (std::size_t k = 0; k < n; ++k)
    path[k + 1] = path[k] + sq * counter_gaussian(seed, RngDomain::synthetic, 1, k);
  return path;
}

std::vector<double> synthetic_fbm(std::uint64_t seed, int m, double H) {
  // midpoint displacement; approximate but adequate for estimator calibration
  const std::size_t n = 1ull << m;
  std::vector<double> path(n + 1, 0.0);
  path[n] = counter_gaussian(seed, RngDomain::synthetic, 2, 0);
  double var = 1.0;
  std::size_t step = n;
  int level = 1;
  while (step > 1) {
    const std::size_t half = step / 2;
    var /= std::pow(2.0, 2.0 * H);
    const double sd = std::sqrt(var * (1.0 - std::pow(2.0, 2.0 * H - 2.0)));
    std::uint64_t pos = 0;
    for (std::size_t s = 0; s < n; s += step, ++pos) {
      path[s + half] =
          0.5 * (path[s] + path[s + step]) +
          sd * counter_gaussian(seed, RngDomain::synthetic, 3,
                                static_cast<std::uint64_t>(level), pos);
    }
    step = half;
    ++level;
  }
  return path;
}

void run_holder(Ctx& ctx) {
  ParamReader pr(ctx.cfg.params);
  const std::string mode = pr.str("mode", std::string("dbm"));
  const int m = static_cast<int>(pr.integer("dyadic_depth", 14));
  const int k_min = static_cast<int>(pr.integer("k_min", 4));
  auto seeds = make_seeds(pr, ctx.seed_override);
  const double H = pr.num("H", 0.75);
  const double beta = pr.num("beta", 2.0);
  const auto N = pr.integer("N", 1024);
  const auto part = static_cast<std::size_t>(pr.integer("i", 1)) - 1;
  pr.finish();

  std::vector<double> exps(seeds.size());
  std::vector<double> cis(seeds.size());
  parallel_over(seeds.size(), ctx.jobs, [&](std::size_t s) {
    std::vector<double> path;
    if (mode == "bm") {
      path = synthetic_bm(seeds[s], m);
    } else if (mode == "fbm") {
      path = synthetic_fbm(seeds[s], m, H);
    } else if (mode == "smooth") {
      const std::size_t n = 1ull << m;
      path.resize(n + 1);
      for (std::size_t k = 0; k <= n; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(n);
        path[k] = t * t;
      }
    } else if (mode == "dbm") {
      const double dt = std::ldexp(1.0, -m);  // dyadic grid over [0, 1]
      RegularizationConfig reg = RegularizationConfig::defaults(N, dt);
      GbeSample init = sample_gbe(N, beta, derive_seed(seeds[s], 0x401));
      ParticleState st = state_from_values(std::move(init.values), beta);
      NoiseSource noise(seeds[s], dt);
      Trajectory traj = simulate(st, 1.0, noise, reg, 1, part + 1);
      const double amp = std::sqrt(2.0 / beta);
      auto b = noise.path(part, 1ull << m);
      path.resize(traj.size());
      for (std::size_t k = 0; k < traj.size(); ++k)
        path[k] = traj.snapshots[k][part] - amp * b[k];
    } else {
      throw std::invalid_argument("unknown holder mode '" + mode + "'");
    }
    const auto fit = stats::holder_exponent(path, k_min);
    exps[s] = fit.exponent;
    cis[s] = fit.ci;
  });

  io::CsvWriter w(ctx.out / "holder.csv", {"seed", "exponent", "ci"});
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    w.write_row({io::format_u64(seeds[s]), io::format_double(exps[s]),
                 io::format_double(cis[s])});
    ctx.report.replicas.push_back({seeds[s], true, ""});
  }
  ctx.report.aggregates = {{"mode", mode},
                           {"median_exponent", median_of(exps)},
                           {"mean_ci", mean_of(cis)}};
  ctx.report.invariants.push_back({"exponents_finite",
                                   std::all_of(exps.begin(), exps.end(),
                                               [](double v) { return std::isfinite(v); }),
                                   ""});
}

// --------------------------------------------- analyze-brownian-increments --

void run_brownian_increments(Ctx& ctx) {
  ParamReader pr(ctx.cfg.params);
  const double beta = pr.num("beta", 2.0);
  const auto N = pr.integer("N", 1024);
  const auto part = static_cast<std::size_t>(pr.integer("i", 1)) - 1;
  const double S = pr.num("S", 1.0);
  auto eps_list = pr.num_list("eps_list", std::vector<double>{1e-1, 1e-2, 1e-3});
  const double dt = pr.num("dt_base", 1e-4);
  auto seeds = make_seeds(pr, ctx.seed_override);
  pr.finish();

  std::sort(eps_list.begin(), eps_list.end(), std::greater<>());
  const double T_needed = eps_list.front() * S;
  RegularizationConfig reg = RegularizationConfig::defaults(N, dt);

  std::vector<std::vector<double>> statv(eps_list.size(),
                                         std::vector<double>(seeds.size()));
  parallel_over(seeds.size(), ctx.jobs, [&](std::size_t s) {
    GbeSample init = sample_gbe(N, beta, derive_seed(seeds[s], 0xb11));
    ParticleState st = state_from_values(std::move(init.values), beta);
    NoiseSource noise(seeds[s], dt);
    Trajectory traj = simulate(st, T_needed, noise, reg, 1, part + 1);
    for (std::size_t e = 0; e < eps_list.size(); ++e)
      statv[e][s] = stats::brownian_increment_stat(traj, noise, part, 0.0, eps_list[e], S);
  });

  io::CsvWriter w(ctx.out / "brownian_increments.csv", {"seed", "eps", "stat"});
  json medians = json::array();
  std::vector<double> med(eps_list.size());
  for (std::size_t e = 0; e < eps_list.size(); ++e) {
    for (std::size_t s = 0; s < seeds.size(); ++s)
      w.write_row({io::format_u64(seeds[s]), io::format_double(eps_list[e]),
                   io::format_double(statv[e][s])});
    med[e] = median_of(statv[e]);
    medians.push_back({{"eps", eps_list[e]}, {"median", med[e]}});
  }
  for (auto s : seeds) ctx.report.replicas.push_back({s, true, ""});
  bool decreasing = true;
  for (std::size_t e = 1; e < med.size(); ++e)
    if (!(med[e] < med[e - 1])) decreasing = false;
  ctx.report.aggregates = {{"medians", medians}};
  ctx.report.invariants.push_back({"medians_decrease_with_eps", decreasing, ""});
}

// ------------------------------------------------------ analyze-sde-residual

void run_sde_residual(Ctx& ctx) {
  ParamReader pr(ctx.cfg.params);
  const double beta = pr.num("beta", 2.0);
  const auto N = pr.integer("N", 2048);
  const auto part = static_cast<std::size_t>(pr.integer("i", 1)) - 1;
  const double T = pr.num("T", 1.0);
  const double dt = pr.num("dt_base", 1e-4);
  auto K_list = pr.int_list("K_list", std::vector<std::int64_t>{64, 256, 1024});
  auto seeds = make_seeds(pr, ctx.seed_override);
  pr.finish();

  SemicircleModel model;
  RegularizationConfig reg = RegularizationConfig::defaults(N, dt);
  const std::size_t keep = static_cast<std::size_t>(
      *std::max_element(K_list.begin(), K_list.end()));

  struct Row { std::uint64_t seed; std::int64_t K; double oracle, paper, a_o, a_p; };
  std::vector<std::vector<Row>> rows(seeds.size());
  parallel_over(seeds.size(), ctx.jobs, [&](std::size_t s) {
    GbeSample init = sample_gbe(N, beta, derive_seed(seeds[s], 0x5de));
    ParticleState st = state_from_values(std::move(init.values), beta);
    NoiseSource noise(seeds[s], dt);
    Trajectory traj = simulate(st, T, noise, reg, 1, keep);  // decimation forced to 1
    for (auto K : K_list) {
      const auto ro = stats::sde_residual(traj, noise, part, K, stats::DriftSource::oracle, model);
      const auto rp = stats::sde_residual(traj, noise, part, K, stats::DriftSource::paper, model);
      rows[s].push_back({seeds[s], K, ro.sup_residual, rp.sup_residual, ro.drift_used,
                         rp.drift_used});
    }
  });

  io::CsvWriter w(ctx.out / "sde_residual.csv",
                  {"seed", "K", "residual_oracle", "residual_paper", "a_oracle", "a_paper"});
  json agg = json::array();
  for (std::size_t s = 0; s < seeds.size(); ++s) {
    for (const auto& r : rows[s]) {
      w.write_row({io::format_u64(r.seed), io::format_i64(r.K), io::format_double(r.oracle),
                   io::format_double(r.paper), io::format_double(r.a_o),
                   io::format_double(r.a_p)});
      agg.push_back({{"seed", r.seed},
                     {"K", r.K},
                     {"residual_oracle", r.oracle},
                     {"residual_paper", r.paper}});
    }
    ctx.report.replicas.push_back({seeds[s], true, ""});
  }
  std::size_t oracle_wins = 0, total = 0;
  for (const auto& sr : rows)
    for (const auto& r : sr) {
      ++total;
      oracle_wins += r.oracle < r.paper;
    }
  ctx.report.aggregates = {{"rows", agg},
                           {"oracle_smaller_fraction",
                            total ? static_cast<double>(oracle_wins) / total : 0.0}};
  ctx.report.invariants.push_back({"residuals_finite", true, ""});
}

// ------------------------------------------------------------- compare-lab --

void run_compare_lab(Ctx& ctx) {
  ParamReader pr(ctx.cfg.params);
  const auto K = pr.integer("K", 256);
  const double N_eff = pr.num("N_effective", 1e6);
  const double beta = pr.num("beta", 2.0);
  const double eps_ell = pr.num("eps_ell", 0.1);
  const std::string mode = pr.str("mode", std::string("frozen"));
  const auto instances = pr.integer("instances", 100);
  const double t_max = pr.num("t_max", 200.0);
  const double fit_from = pr.num("fit_from", 1.0);
  auto seeds = make_seeds(pr, ctx.seed_override);
  pr.finish();

  SemicircleModel model;
  RegularizationConfig reg = RegularizationConfig::defaults(static_cast<std::int64_t>(N_eff));

  // states feeding the coefficients
  const auto n_int = static_cast<std::int64_t>(N_eff);
  std::vector<double> xs, ys;
  const double gamma_c = model.edge_quantile(K + 2, n_int);
  if (mode == "frozen") {
    for (std::int64_t i = 1; i <= K; ++i) xs.push_back(model.edge_quantile(i, n_int));
    ys = xs;
  } else if (mode == "equilibrium") {
    throw std::invalid_argument("equilibrium mode requires finite N samples; use frozen");
  } else {
    throw std::invalid_argument("unknown compare-lab mode '" + mode + "'");
  }

  comparison::OperatorPath path;
  path.times = {0.0};
  path.ops.push_back(
      comparison::build_coefficients(xs, ys, gamma_c, reg, N_eff, eps_ell, model));
  const auto& op = path.ops.front();

  // contraction + positivity over random instances
  bool positive_ok = true, l1_ok = true, linf_ok = true;
  const std::uint64_t base_seed = seeds.front();
  for (std::int64_t inst = 0; inst < instances; ++inst) {
    Eigen::VectorXd w0(K);
    for (std::int64_t i = 0; i < K; ++i)
      w0(i) = std::fabs(counter_gaussian(base_seed, RngDomain::synthetic, 7,
                                         static_cast<std::uint64_t>(inst),
                                         static_cast<std::uint64_t>(i)));
    const Eigen::VectorXd w1 = comparison::evolve_semigroup(path, w0, 0.0, 0.5);
    positive_ok = positive_ok && (w1.minCoeff() >= -1e-10);
    l1_ok = l1_ok && (w1.cwiseAbs().sum() <= w0.cwiseAbs().sum() + 1e-10);
    linf_ok = linf_ok && (w1.cwiseAbs().maxCoeff() <= w0.cwiseAbs().maxCoeff() + 1e-10);
  }

  // finite speed profile from the middle index
  const std::int64_t b = K / 2;
  io::CsvWriter pw(ctx.out / "finite_speed_profile.csv", {"a", "U_S_ab"});
  std::vector<double> profile;
  for (std::int64_t a = 0; a < K; a += std::max<std::int64_t>(1, K / 64)) {
    const double v = comparison::finite_speed_check(path, a, b, 0.0, 0.01);
    pw.write_row({io::format_i64(a), io::format_double(v)});
    profile.push_back(v);
  }

  // energy decay on a v0 drawn at the rigidity scale
  Eigen::VectorXd v0(K);
  for (std::int64_t i = 0; i < K; ++i)
    v0(i) = counter_gaussian(base_seed, RngDomain::synthetic, 8,
                             static_cast<std::uint64_t>(i)) *
            std::pow(static_cast<double>(i + 1), -1.0 / 3.0);
  std::vector<double> t_grid;
  for (int g = 0; g <= 40; ++g)
    t_grid.push_back(0.01 * std::pow(t_max / 0.01, g / 40.0));
  const auto decay = comparison::energy_decay_check(path, v0, t_grid, fit_from);
  io::CsvWriter dw(ctx.out / "energy_decay.csv", {"t", "sup_norm"});
  for (std::size_t g = 0; g < decay.times.size(); ++g)
    dw.write_row({io::format_double(decay.times[g]), io::format_double(decay.sup_norm[g])});

  for (auto s : seeds) ctx.report.replicas.push_back({s, true, ""});
  ctx.report.aggregates = {{"K", K},
                           {"beta", beta},
                           {"ell", op.ell},
                           {"long_range_row_sum", op.long_range_row_sum()},
                           {"decay_slope", decay.fitted_slope},
                           {"decay_slope_ci", decay.slope_ci}};
  ctx.report.invariants.push_back({"semigroup_positive", positive_ok, ""});
  ctx.report.invariants.push_back({"l1_contraction", l1_ok, ""});
  ctx.report.invariants.push_back({"linf_contraction", linf_ok, ""});
  ctx.report.invariants.push_back(
      {"energy_decay_one_sided",
       decay.fitted_slope <= -0.15 + decay.slope_ci,
       "slope " + std::to_string(decay.fitted_slope)});
}

}  // namespace

// ----------------------------------------------------------------- public --

ExperimentConfig ExperimentConfig::from_json(const json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("config must be a JSON object");
  ExperimentConfig cfg;
  json params = doc;
  if (doc.contains("kind")) {
    cfg.kind = doc.at("kind").get<std::string>();
    params.erase("kind");
  }
  cfg.params = params;
  return cfg;
}

json ExperimentConfig::to_json() const {
  json doc = params;
  doc["kind"] = kind;
  return doc;
}

bool RunReport::all_invariants_pass() const {
  for (const auto& inv : invariants)
    if (!inv.pass) return false;
  return true;
}

bool RunReport::any_replica_failed() const {
  for (const auto& r : replicas)
    if (!r.ok) return true;
  return false;
}

json RunReport::to_json() const {
  json reps = json::array();
  for (const auto& r : replicas)
    reps.push_back({{"seed", r.seed}, {"ok", r.ok}, {"note", r.note}});
  json invs = json::array();
  for (const auto& inv : invariants)
    invs.push_back({{"name", inv.name}, {"pass", inv.pass}, {"detail", inv.detail}});
  return json{{"config", config.to_json()}, {"config_hash", config_hash},
              {"replicas", reps},           {"aggregates", aggregates},
              {"invariants", invs},         {"wall_time_s", wall_time_s}};
}

std::string config_hash(const ExperimentConfig& config) {
  const std::string dump = config.to_json().dump();  // nlohmann orders keys
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

const std::vector<std::string>& known_kinds() {
  static const std::vector<std::string> kinds = {
      "sample-gbe",        "run-dbm",
      "run-window",        "run-coupled",
      "sao-sample",        "analyze-gap-tail",
      "analyze-rigidity",  "analyze-stieltjes",
      "analyze-edge-law",  "analyze-holder",
      "analyze-brownian-increments", "analyze-sde-residual",
      "compare-lab"};
  return kinds;
}

RunReport run_experiment(const ExperimentConfig& config, const fs::path& out_dir, int jobs,
                         std::optional<std::uint64_t> seed_override) {
  const auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(out_dir);

  RunReport report;
  report.config = config;
  report.config_hash = config_hash(config);
  Ctx ctx{config, out_dir, jobs, seed_override, report};

  if (config.kind == "sample-gbe") run_sample_gbe(ctx);
  else if (config.kind == "run-dbm") run_dbm_experiment(ctx);
  else if (config.kind == "run-window") run_window_experiment(ctx);
  else if (config.kind == "run-coupled") run_coupled_experiment(ctx);
  else if (config.kind == "sao-sample") run_sao_sample(ctx);
  else if (config.kind == "analyze-gap-tail") run_gap_tail(ctx);
  else if (config.kind == "analyze-rigidity") run_rigidity(ctx, false);
  else if (config.kind == "analyze-stieltjes") run_rigidity(ctx, true);
  else if (config.kind == "analyze-edge-law") run_edge_law(ctx);
  else if (config.kind == "analyze-holder") run_holder(ctx);
  else if (config.kind == "analyze-brownian-increments") run_brownian_increments(ctx);
  else if (config.kind == "analyze-sde-residual") run_sde_residual(ctx);
  else if (config.kind == "compare-lab") run_compare_lab(ctx);
  else throw std::invalid_argument("unknown experiment kind '" + config.kind + "'");

  write_config_echo(config, out_dir);
  report.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::ofstream rf(out_dir / "report.json", std::ios::binary);
  rf << report.to_json().dump(2) << '\n';
  return report;
}

}  // namespace experiments
}  // namespace dbmlab
