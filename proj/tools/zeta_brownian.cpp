// zeta-brownian: sampling, verification and plotting for the horizontal
// log-zeta process and its Brownian reference statistics.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "zbm/config.hpp"
#include "zbm/csv.hpp"
#include "zbm/experiments.hpp"
#include "zbm/svg.hpp"

namespace {

struct Flags {
  std::string config_file;
  double T = -1.0;
  long long n = -1;
  std::string model, tau_range, out;
  double x_exp = -1.0, alpha_max = -1.0;
  long long grid = -1;
  long long seed = -1;
  long long workers = -1;
};

zbm::RunConfig merge(const Flags& f) {
  zbm::RunConfig cfg;
  if (!f.config_file.empty()) cfg = zbm::load_config_file(f.config_file);
  if (f.T >= 0) cfg.T = f.T;
  if (f.n >= 0) cfg.n_samples = static_cast<std::size_t>(f.n);
  if (!f.model.empty()) cfg.model = zbm::parse_model(f.model);
  if (f.x_exp >= 0) cfg.x_exponent = f.x_exp;
  if (f.alpha_max >= 0) cfg.alpha_max = f.alpha_max;
  if (f.grid >= 0) cfg.grid_points = static_cast<std::size_t>(f.grid);
  if (!f.tau_range.empty()) cfg.tau_range = zbm::parse_tau_range(f.tau_range);
  if (f.seed >= 0) cfg.seed = static_cast<std::uint64_t>(f.seed);
  if (f.workers >= 0) cfg.workers = static_cast<unsigned>(f.workers);
  if (!f.out.empty()) cfg.output_dir = f.out;
  cfg.validate();
  return cfg;
}

void add_config_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config_file, "flat key=value config file");
  cmd->add_option("--T", f.T, "height scale T");
  cmd->add_option("--n", f.n, "number of samples");
  cmd->add_option("--model", f.model, "direct | prime_sum | selberg_mollified");
  cmd->add_option("--x-exp", f.x_exp, "mollifier exponent, x = T^exp");
  cmd->add_option("--grid", f.grid, "alpha grid points");
  cmd->add_option("--alpha-max", f.alpha_max, "alpha grid upper end");
  cmd->add_option("--tau-range", f.tau_range, "zero_to_T | T_to_2T");
  cmd->add_option("--seed", f.seed, "RNG seed");
  cmd->add_option("--workers", f.workers, "worker threads");
  cmd->add_option("--out", f.out, "output directory");
}

int run_plot(const std::string& csv_path, const std::string& kind,
             const std::string& out_path) {
  std::ifstream in(csv_path);
  if (!in) {
    std::cerr << "cannot open " << csv_path << "\n";
    return 1;
  }
  zbm::SvgCanvas svg;
  if (kind == "paths") {
    auto rows = zbm::read_paths_csv(in);
    if (rows.empty()) {
      svg.axes();
    } else {
      double lo = rows.front().re_z, hi = lo, amax = 0.0;
      for (const auto& r : rows) {
        lo = std::min(lo, r.re_z);
        hi = std::max(hi, r.re_z);
        amax = std::max(amax, r.alpha);
      }
      svg.set_view(0.0, amax > 0 ? amax : 1.0, lo, hi);
      svg.axes();
      const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                              "#9467bd", "#8c564b"};
      std::vector<double> xs, ys;
      std::size_t path_index = 0;
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (i > 0 && rows[i].tau != rows[i - 1].tau) {
          svg.polyline(xs, ys, colors[path_index++ % 6]);
          xs.clear();
          ys.clear();
        }
        xs.push_back(rows[i].alpha);
        ys.push_back(rows[i].re_z);
      }
      svg.polyline(xs, ys, colors[path_index % 6]);
    }
  } else if (kind == "ecdf") {
    auto rows = zbm::read_statistics_csv(in);
    if (rows.empty()) {
      svg.axes();
    } else {
      std::map<std::string, std::vector<double>> groups;
      double lo = rows.front().value, hi = lo;
      for (const auto& r : rows) {
        groups[r.statistic].push_back(r.value);
        lo = std::min(lo, r.value);
        hi = std::max(hi, r.value);
      }
      svg.set_view(lo, hi, 0.0, 1.0);
      svg.axes();
      const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728"};
      std::size_t i = 0;
      for (auto& [name, values] : groups) {
        std::sort(values.begin(), values.end());
        svg.ecdf_steps(values, colors[i++ % 4]);
      }
    }
  } else {
    std::cerr << "unknown plot kind: " << kind << " (expected paths|ecdf)\n";
    return 1;
  }
  std::ofstream out(out_path, std::ios::binary);
  out << svg.finish();
  std::cout << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"horizontal log-zeta process laboratory"};
  app.require_subcommand(1);

  Flags flags;
  bool plot = false;
  bool self_test = false;
  std::string experiment;
  std::string plot_csv, plot_kind = "paths", plot_out = "plot.svg";

  CLI::App* sample = app.add_subcommand("sample", "emit raw trajectories as CSV");
  add_config_flags(sample, flags);

  CLI::App* verify =
      app.add_subcommand("verify", "run a verification experiment, write a JSON report");
  add_config_flags(verify, flags);
  verify->add_option("--experiment", experiment,
                     "clt | covariance | reflection | arcsine | localtime | "
                     "signchanges | rmt_compare | lemma33 | mv | fourth_moment | "
                     "lemma22 | ex_decay")
      ->required();
  verify->add_flag("--plot", plot, "also write SVG plots");
  verify->add_flag("--self-test", self_test,
                   "substitute Brownian input for the zeta input (arcsine only)");

  CLI::App* plot_cmd = app.add_subcommand("plot", "render a CSV file to SVG");
  plot_cmd->add_option("csv", plot_csv, "input CSV")->required();
  plot_cmd->add_option("--kind", plot_kind, "paths | ecdf");
  plot_cmd->add_option("--out", plot_out, "output SVG path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sample->parsed()) {
      zbm::RunConfig cfg = merge(flags);
      zbm::SampleOutput out = zbm::cmd_sample_paths(cfg);
      std::cout << out.csv_path << "\n" << out.manifest_path << "\n";
      std::cout << "rejections: " << out.rejections << "\n";
      return 0;
    }
    if (verify->parsed()) {
      zbm::RunConfig cfg = merge(flags);
      zbm::ExperimentReport rep;
      if (experiment == "clt") rep = zbm::verify_clt(cfg);
      else if (experiment == "covariance") rep = zbm::verify_covariance(cfg, plot);
      else if (experiment == "reflection") rep = zbm::verify_reflection(cfg, plot);
      else if (experiment == "arcsine") rep = zbm::verify_arcsine(cfg, plot, self_test);
      else if (experiment == "localtime") rep = zbm::verify_localtime(cfg, plot);
      else if (experiment == "signchanges") rep = zbm::verify_signchanges(cfg);
      else if (experiment == "rmt_compare") rep = zbm::verify_rmt_compare(cfg, true);
      else if (experiment == "lemma33") rep = zbm::verify_lemma33(cfg);
      else if (experiment == "mv") rep = zbm::verify_mv(cfg);
      else if (experiment == "fourth_moment") rep = zbm::verify_fourth_moment(cfg);
      else if (experiment == "lemma22") rep = zbm::verify_lemma22(cfg);
      else if (experiment == "ex_decay") rep = zbm::verify_ex_decay(cfg);
      else {
        std::cerr << "unknown experiment: " << experiment << "\n";
        return 1;
      }
      std::string path = cfg.output_dir + "/report_" + experiment + ".json";
      zbm::detail::write_text_file(path, rep.to_json().dump(2) + "\n");
      std::cout << rep.to_json().dump(2) << "\n";
      std::cout << (rep.pass ? "PASS" : "FAIL") << " " << experiment << "\n";
      return rep.pass ? 0 : 1;
    }
    if (plot_cmd->parsed()) return run_plot(plot_csv, plot_kind, plot_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
