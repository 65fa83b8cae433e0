// Command-line front end: config-driven runs, exit-time campaigns and
// diagnostic scans, all emitting CSV.
#include <atomic>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "shus/config.hpp"
#include "shus/csv.hpp"
#include "shus/estimators.hpp"
#include "shus/experiments.hpp"
#include "shus/sampler.hpp"

namespace fs = std::filesystem;
using namespace shus;

namespace {

struct CliOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  int jobs = 0;
  std::optional<std::string> out_dir;
  bool dry_run = false;
};

void apply_overrides(AppConfig& cfg, const CliOptions& opt) {
  if (opt.seed) cfg.run.seed = *opt.seed;
  if (opt.out_dir) cfg.output.dir = *opt.out_dir;
}

void write_effective_config(const AppConfig& cfg) {
  write_file_atomic(fs::path(cfg.output.dir) / "effective_config.cfg",
                    echo_config(cfg));
}

std::vector<double> model_theta_star(const ModelSpec& model) {
  if (model.kind == ModelSpec::Kind::toy) {
    const auto w = ToyTarget(model.epsilon).reference_weights();
    return {w.begin(), w.end()};
  }
  const ContinuousTarget target(model.beta, model.R);
  const auto part = Partition::uniform(model.R, model.d);
  return reference_weights(target, part);
}

double rho_exponent(const BiasSpec& bias) {
  return bias.rho.family == RhoFamily::constant ? 0.0 : bias.rho.a;
}

template <class Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  unsigned workers = jobs > 0 ? static_cast<unsigned>(jobs)
                              : std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  if (workers == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
  };
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

int cmd_run(const CliOptions& opt) {
  auto cfg = load_config(opt.config_path, SectionNeeds{.run = true});
  apply_overrides(cfg, opt);
  const auto rec = run(make_sampler_config(cfg));

  const fs::path dir(cfg.output.dir);
  {
    std::ostringstream csv;
    rec.write_scalars_csv(csv);
    write_file_atomic(dir / "run_record.csv", csv.str());
  }
  {
    std::ostringstream bin(std::ios::binary);
    rec.write_theta_binary(bin);
    write_file_atomic(dir / "theta_snapshots.bin", bin.str());
  }
  if (cfg.run.record_is_weight) {
    std::ostringstream csv;
    csv << "n,weight\n";
    for (std::size_t k = 0; k < rec.step.size(); ++k)
      csv << rec.step[k] << ',' << format_double(rec.is_weight[k]) << '\n';
    write_file_atomic(dir / "is_weights.csv", csv.str());
  }
  if (cfg.run.exit_x1 || cfg.run.exit_state) {
    std::ostringstream csv;
    csv << "event,step\n";
    if (rec.first_exit_step) csv << "first_exit," << *rec.first_exit_step << '\n';
    write_file_atomic(dir / "events.csv", csv.str());
  }
  write_effective_config(cfg);
  std::cout << "run: " << rec.step.size() << " recorded rows -> "
            << (dir / "run_record.csv").string() << "\n";
  return 0;
}

int cmd_exit_times(const CliOptions& opt) {
  auto cfg = load_config(opt.config_path, SectionNeeds{.experiment = true});
  apply_overrides(cfg, opt);
  if (cfg.experiment.grid.empty())
    throw ConfigError("[experiment] grid must be a non-empty list");

  std::vector<double> a_values = cfg.experiment.a_list;
  if (a_values.empty()) a_values.push_back(rho_exponent(cfg.bias));

  const std::size_t trials =
      cfg.experiment.grid.size() * a_values.size() *
      static_cast<std::size_t>(cfg.experiment.replicas);
  if (opt.dry_run) {
    std::cout << "exit-times dry run\n";
    std::cout << "  model: "
              << (cfg.model.kind == ModelSpec::Kind::toy ? "toy" : "two_well")
              << "\n  grid:";
    for (double g : cfg.experiment.grid) std::cout << ' ' << format_double(g);
    std::cout << "\n  parameter sets (a):";
    for (double a : a_values) std::cout << ' ' << format_double(a);
    std::cout << "\n  replicas per point: " << cfg.experiment.replicas
              << "\n  total trials: " << trials << "\n";
    return 0;
  }

  std::ostringstream campaign_csv, slopes_csv;
  campaign_csv << "grid_value,K,mean_steps,stderr,capped,slope_fit_id\n";
  slopes_csv << "id,slope,intercept,residual\n";
  for (std::size_t k = 0; k < a_values.size(); ++k) {
    ExitCampaignSpec spec;
    spec.model = cfg.model;
    spec.grid = cfg.experiment.grid;
    spec.bias = cfg.bias;
    if (cfg.bias.rho.family != RhoFamily::constant)
      spec.bias.rho.a = a_values[k];
    spec.proposal = cfg.proposal;
    spec.replicas = cfg.experiment.replicas;
    spec.cap = cfg.experiment.cap;
    spec.master_seed = cfg.run.seed + k;
    const auto rows = campaign(spec, opt.jobs);

    const bool fitted = cfg.experiment.fit != "none";
    const int fit_id = fitted ? static_cast<int>(k) : -1;
    std::vector<double> xs, means;
    for (const auto& row : rows) {
      campaign_csv << format_double(row.grid_value) << ',' << row.replicas
                   << ',' << format_double(row.mean) << ','
                   << format_double(row.stderr_) << ',' << row.capped << ','
                   << fit_id << '\n';
      if (row.capped < static_cast<std::uint64_t>(row.replicas)) {
        xs.push_back(row.grid_value);
        means.push_back(row.mean);
      }
    }
    if (fitted) {
      // Abscissa transform: the toy scaling laws are written in 1/eps or
      // ln(1/eps) rather than in the grid value itself.
      if (cfg.experiment.fit_x == "inverse")
        for (double& x : xs) x = 1.0 / x;
      else if (cfg.experiment.fit_x == "log_inverse")
        for (double& x : xs) x = std::log(1.0 / x);
      const SlopeFit fit = cfg.experiment.fit == "exp"
                               ? fit_exp_slope(xs, means)
                               : fit_loglog_slope(xs, means);
      slopes_csv << fit_id << ',' << format_double(fit.slope) << ','
                 << format_double(fit.intercept) << ','
                 << format_double(fit.residual_norm) << '\n';
    }
  }

  const fs::path dir(cfg.output.dir);
  write_file_atomic(dir / "campaign.csv", campaign_csv.str());
  write_file_atomic(dir / "slopes.csv", slopes_csv.str());
  write_effective_config(cfg);
  std::cout << "exit-times: " << trials << " trials -> "
            << (dir / "campaign.csv").string() << "\n";
  return 0;
}

int cmd_stepsize_scan(const CliOptions& opt) {
  auto cfg = load_config(opt.config_path,
                         SectionNeeds{.run = true, .experiment = true});
  apply_overrides(cfg, opt);
  const int replicas = cfg.experiment.replicas;

  std::vector<RunRecord> records(replicas);
  parallel_for(static_cast<std::size_t>(replicas), opt.jobs, [&](std::size_t r) {
    auto sc = make_sampler_config(cfg);
    sc.seed = derive_seed(cfg.run.seed, 0, r);
    sc.record.theta_stride = sc.n_steps + 1;  // no snapshots needed
    records[r] = run(sc);
  });

  const auto diag =
      stepsize_diagnostic(records, cfg.bias.alpha, cfg.bias.mu);
  const auto est = plateau(diag, 0.1);
  const double a = rho_exponent(cfg.bias);
  const double gfrak = g_frak(model_theta_star(cfg.model), a);
  const double norm_scale = (cfg.bias.alpha == 1.0 ? cfg.bias.mu : 1.0) / gfrak;

  std::ostringstream csv;
  csv << "n,mean,stderr\n";
  for (std::size_t k = 0; k < diag.step.size(); ++k)
    csv << diag.step[k] << ',' << format_double(diag.mean[k]) << ','
        << format_double(diag.stderr_[k]) << '\n';
  std::ostringstream pl;
  pl << "alpha,mu,a,tail_start,plateau_mean,plateau_stderr,g_frak,"
        "normalized_plateau\n";
  pl << format_double(cfg.bias.alpha) << ',' << format_double(cfg.bias.mu)
     << ',' << format_double(a) << ',' << est.tail_start << ','
     << format_double(est.mean) << ',' << format_double(est.stderr_) << ','
     << format_double(gfrak) << ',' << format_double(est.mean * norm_scale)
     << '\n';

  const fs::path dir(cfg.output.dir);
  write_file_atomic(dir / "stepsize.csv", csv.str());
  write_file_atomic(dir / "plateau.csv", pl.str());
  write_effective_config(cfg);
  std::cout << "stepsize-scan: " << replicas << " replicas -> "
            << (dir / "stepsize.csv").string() << "\n";
  return 0;
}

int cmd_ef(const CliOptions& opt) {
  auto cfg = load_config(opt.config_path, SectionNeeds{});
  apply_overrides(cfg, opt);
  std::vector<double> a_grid = cfg.experiment.a_grid;
  if (a_grid.empty())
    for (int k = 0; k <= 10; ++k) a_grid.push_back(k / 10.0);

  const auto theta_star = model_theta_star(cfg.model);
  std::ostringstream csv;
  csv << "a,EF\n";
  for (double a : a_grid)
    csv << format_double(a) << ',' << format_double(ef_limit(theta_star, a))
        << '\n';
  const fs::path dir(cfg.output.dir);
  write_file_atomic(dir / "ef.csv", csv.str());
  write_effective_config(cfg);
  std::cout << "ef: " << a_grid.size() << " grid points -> "
            << (dir / "ef.csv").string() << "\n";
  return 0;
}

int cmd_ref_weights(const CliOptions& opt) {
  auto cfg = load_config(opt.config_path, SectionNeeds{});
  apply_overrides(cfg, opt);
  const auto theta_star = model_theta_star(cfg.model);

  std::ostringstream csv;
  csv << "index,a_left,a_right,theta_star\n";
  if (cfg.model.kind == ModelSpec::Kind::toy) {
    for (std::size_t i = 0; i < theta_star.size(); ++i)
      csv << (i + 1) << ',' << (i + 1) << ',' << (i + 1) << ','
          << format_double(theta_star[i]) << '\n';
  } else {
    const auto part = Partition::uniform(cfg.model.R, cfg.model.d);
    for (std::size_t i = 0; i < theta_star.size(); ++i)
      csv << (i + 1) << ',' << format_double(part.left_edge(static_cast<int>(i)))
          << ',' << format_double(part.right_edge(static_cast<int>(i))) << ','
          << format_double(theta_star[i]) << '\n';
  }
  const fs::path dir(cfg.output.dir);
  write_file_atomic(dir / "ref_weights.csv", csv.str());
  write_effective_config(cfg);
  std::cout << "ref-weights: " << theta_star.size() << " strata -> "
            << (dir / "ref_weights.csv").string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive stratified importance sampling toolkit"};
  app.require_subcommand(1);

  CliOptions opt;
  auto add_common = [&](CLI::App* sub, bool with_dry_run = false) {
    sub->add_option("--config", opt.config_path, "Config file path")
        ->required();
    sub->add_option("--seed", opt.seed, "Override [run] seed");
    sub->add_option("--jobs", opt.jobs, "Worker thread cap (0 = all cores)");
    sub->add_option("--out", opt.out_dir, "Override [output] dir");
    if (with_dry_run)
      sub->add_flag("--dry-run", opt.dry_run,
                    "Print the resolved grid and trial count, then stop");
  };

  auto* sub_run = app.add_subcommand("run", "One adaptive run, recorded to CSV");
  add_common(sub_run);
  auto* sub_exit =
      app.add_subcommand("exit-times", "Exit-time campaign with slope fits");
  add_common(sub_exit, true);
  auto* sub_scan = app.add_subcommand(
      "stepsize-scan", "Replica-averaged effective-stepsize diagnostic");
  add_common(sub_scan);
  auto* sub_ef =
      app.add_subcommand("ef", "Efficiency-factor limit over a grid of a");
  add_common(sub_ef);
  auto* sub_ref =
      app.add_subcommand("ref-weights", "Reference stratum weights as CSV");
  add_common(sub_ref);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage problems are exit 2
  }

  try {
    if (sub_run->parsed()) return cmd_run(opt);
    if (sub_exit->parsed()) return cmd_exit_times(opt);
    if (sub_scan->parsed()) return cmd_stepsize_scan(opt);
    if (sub_ef->parsed()) return cmd_ef(opt);
    if (sub_ref->parsed()) return cmd_ref_weights(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
