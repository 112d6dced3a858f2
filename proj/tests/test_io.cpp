#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "zbm/config.hpp"
#include "zbm/csv.hpp"
#include "zbm/experiments.hpp"
#include "zbm/svg.hpp"

using namespace zbm;

namespace {

RunConfig small_config(const std::string& out) {
  RunConfig cfg;
  cfg.T = 1e4;
  cfg.n_samples = 12;
  cfg.model = PathModel::prime_sum;
  cfg.grid_points = 32;
  cfg.tau_range = TauRange::T_to_2T;
  cfg.seed = 4242;
  cfg.output_dir = out;
  return cfg;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("paths csv round trip", "[csv]") {
  RunConfig cfg = small_config("unused");
  PathEnsemble ens = sample_path_ensemble(cfg);
  std::ostringstream os;
  write_paths_csv(os, ens.paths);
  std::istringstream is(os.str());
  auto rows = read_paths_csv(is);
  REQUIRE(rows.size() == cfg.n_samples * cfg.grid_points);
  std::size_t r = 0;
  for (const ProcessPath& p : ens.paths)
    for (std::size_t k = 0; k < p.values.size(); ++k, ++r) {
      CHECK(rows[r].tau == p.tau);  // %.17g round-trips doubles exactly
      CHECK(rows[r].alpha == p.alphas()[k]);
      CHECK(rows[r].re_z == p.values[k].real());
      CHECK(rows[r].im_z == p.values[k].imag());
      CHECK(rows[r].model == "prime_sum");
    }
}

TEST_CASE("statistics csv round trip", "[csv]") {
  std::vector<double> values{0.25, -1.5, 3.75};
  std::ostringstream os;
  write_statistics_csv(os, "max", values);
  std::istringstream is(os.str());
  auto rows = read_statistics_csv(is);
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].sample_id == i);
    CHECK(rows[i].statistic == "max");
    CHECK(rows[i].value == values[i]);
  }
}

TEST_CASE("empty sample emits a header-only csv and a valid manifest", "[sample]") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "zbm_empty_sample";
  fs::remove_all(dir);
  RunConfig cfg = small_config(dir.string());
  cfg.n_samples = 0;
  SampleOutput out = cmd_sample_paths(cfg);
  std::string csv = slurp(out.csv_path);
  CHECK(csv == std::string(kPathsCsvHeader) + "\ntau,alpha,re_z,im_z,model\n");
  json manifest = json::parse(slurp(out.manifest_path));
  CHECK(manifest["config"]["n_samples"] == 0);
  CHECK(manifest["rejections"] == 0);
  CHECK(manifest["version"] == kVersion);
  fs::remove_all(dir);
}

TEST_CASE("sample output is byte-identical for any worker count", "[sample]") {
  namespace fs = std::filesystem;
  fs::path d1 = fs::temp_directory_path() / "zbm_det_w1";
  fs::path d8 = fs::temp_directory_path() / "zbm_det_w8";
  fs::remove_all(d1);
  fs::remove_all(d8);
  RunConfig c1 = small_config(d1.string());
  c1.n_samples = 50;
  RunConfig c8 = c1;
  c8.workers = 8;
  c8.output_dir = d8.string();
  SampleOutput o1 = cmd_sample_paths(c1);
  SampleOutput o8 = cmd_sample_paths(c8);
  CHECK(slurp(o1.csv_path) == slurp(o8.csv_path));
  fs::remove_all(d1);
  fs::remove_all(d8);
}

TEST_CASE("csv rows are reproducible by independent re-evaluation", "[sample]") {
  RunConfig cfg = small_config("unused");
  cfg.T = 1e5;
  cfg.n_samples = 4;
  PathEnsemble ens = sample_path_ensemble(cfg);
  PrimeTable primes = sieve(static_cast<std::uint64_t>(cfg.T));
  std::ostringstream os;
  write_paths_csv(os, ens.paths);
  std::istringstream is(os.str());
  auto rows = read_paths_csv(is);
  double norm = std::sqrt(std::log(std::log(cfg.T)));
  for (std::size_t r = 0; r < rows.size(); r += 7) {
    double sigma = sigma_of_alpha(cfg.T, rows[r].alpha);
    Complex expect = dirichlet_prime_sum(sigma, rows[r].tau, cfg.T, primes) / norm;
    CHECK(std::abs(Complex{rows[r].re_z, rows[r].im_z} - expect) <= 1e-6);
  }
}

TEST_CASE("svg output is deterministic and structured", "[svg]") {
  auto render = [] {
    SvgCanvas svg;
    svg.set_view(0, 1, -1, 1);
    svg.axes();
    svg.polyline({0.0, 0.5, 1.0}, {-0.5, 0.25, 0.75}, "#1f77b4");
    svg.label(0.1, 0.9, "demo");
    return svg.finish();
  };
  std::string a = render();
  std::string b = render();
  CHECK(a == b);
  CHECK(a.find("<svg") == 0);
  CHECK(a.find("<polyline") != std::string::npos);
  CHECK(a.rfind("</svg>\n") == a.size() - 7);
  // exactly one polyline
  std::size_t count = 0;
  for (std::size_t pos = a.find("<polyline"); pos != std::string::npos;
       pos = a.find("<polyline", pos + 1))
    ++count;
  CHECK(count == 1);
}

TEST_CASE("config file parsing and flag precedence", "[config]") {
  namespace fs = std::filesystem;
  fs::path file = fs::temp_directory_path() / "zbm_config_test.cfg";
  {
    std::ofstream out(file);
    out << "# comment line\n";
    out << "T = 1e5\n";
    out << "n_samples = 77\n";
    out << "model = selberg_mollified\n";
    out << "tau_range = zero_to_T\n";
    out << "seed = 99  # trailing comment\n";
  }
  RunConfig cfg = load_config_file(file.string());
  CHECK(cfg.T == 1e5);
  CHECK(cfg.n_samples == 77);
  CHECK(cfg.model == PathModel::selberg_mollified);
  CHECK(cfg.tau_range == TauRange::zero_to_T);
  CHECK(cfg.seed == 99);
  // flag-style override wins
  apply_config_entry(cfg, "seed", "123");
  CHECK(cfg.seed == 123);
  CHECK_THROWS_AS(apply_config_entry(cfg, "bogus", "1"), domain_error);
  fs::remove(file.string());
}

TEST_CASE("config validation", "[config]") {
  RunConfig cfg;
  cfg.T = 5.0;
  CHECK_THROWS_AS(cfg.validate(), domain_error);
  cfg = RunConfig{};
  cfg.x_exponent = 0.3;
  CHECK_THROWS_AS(cfg.validate(), domain_error);
  cfg = RunConfig{};
  cfg.grid_points = 1;
  CHECK_THROWS_AS(cfg.validate(), domain_error);
  cfg = RunConfig{};
  cfg.validate();
}

TEST_CASE("arcsine verify passes with the oracle substituted for zeta", "[verify]") {
  RunConfig cfg = small_config("unused");
  // two-sample KS noise is ~1.36 sqrt(2/n); n = 2000 matches the
  // verification-suite budget the 0.10 threshold was set for
  cfg.n_samples = 2000;
  cfg.grid_points = 128;
  ExperimentReport rep = verify_arcsine(cfg, false, /*bm_subject=*/true);
  CHECK(rep.pass);
  CHECK(rep.results["subject"] == "bm");
  json j = rep.to_json();
  CHECK(j.contains("config"));
  CHECK(j.contains("results"));
  CHECK(j.contains("thresholds"));
  CHECK(j.contains("pass"));
}

TEST_CASE("mv verify reports the exact single-frequency branch", "[verify]") {
  RunConfig cfg = small_config("unused");
  ExperimentReport rep = verify_mv(cfg);
  CHECK(rep.pass);
  CHECK(rep.results["single_frequency_relative_error"].get<double>() <= 1e-12);
  CHECK(rep.results["worst_ratio"].get<double>() <= 10.0);
}

TEST_CASE("clt verify on a desk-scale prime sum ensemble", "[verify]") {
  RunConfig cfg = small_config("unused");
  cfg.T = 1e6;
  cfg.n_samples = 300;
  cfg.grid_points = 8;  // clt only uses the alpha = 1 node
  ExperimentReport rep = verify_clt(cfg);
  CHECK(rep.results["ks_re"].get<double>() <= 0.15);
  CHECK(rep.results["ks_im"].get<double>() <= 0.15);
  CHECK(rep.pass);
}
