// detthin: command-line front end.
//
// Exit codes: 0 success, 1 usage or parse error, 2 infeasible pair,
// 3 verification suite failed.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "detthin/errors.hpp"
#include "detthin/point_file.hpp"
#include "detthin/poisson_math.hpp"
#include "detthin/region_io.hpp"
#include "detthin/thinning.hpp"
#include "detthin/verify.hpp"

namespace {

using namespace detthin;
using ordered_json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInfeasible = 2;
constexpr int kExitVerifyFailed = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path);
  return out;
}

int cmd_check(double lambda, double mu, double volume) {
  const FeasibilityWitness w = feasible_ii({lambda, mu, volume});
  ordered_json j;
  j["lambda"] = lambda;
  j["mu"] = mu;
  j["volume"] = volume;
  j["feasible"] = w.feasible;
  if (w.feasible) {
    j["k"] = *w.k;
  } else {
    j["blocking_k"] = *w.blocking_k;
  }
  std::cout << j.dump() << '\n';
  return w.feasible ? kExitOk : kExitInfeasible;
}

int cmd_lambda_c(double mu, double volume, double tol) {
  const double v = lambda_c(mu, volume, tol);
  std::printf("%.12g\n", v);
  return kExitOk;
}

int cmd_region(const RegionRequest& req, const std::string& csv, const std::string& svg) {
  const RegionGrid grid = region_raster(req);
  std::size_t rows = 0;
  if (csv.empty() || csv == "-") {
    rows = write_region_csv(std::cout, grid);
  } else {
    auto out = open_output(csv);
    rows = write_region_csv(out, grid);
  }
  if (!svg.empty()) {
    auto out = open_output(svg);
    write_region_svg(out, grid);
  }
  if (!csv.empty() && csv != "-") {
    ordered_json j;
    j["cells"] = rows;
    j["csv"] = csv;
    if (!svg.empty()) j["svg"] = svg;
    std::cout << j.dump() << '\n';
  }
  return kExitOk;
}

int cmd_thin(const std::string& in_path, double lambda, double mu, const std::string& out_path,
             std::string variant) {
  IntensityPair{lambda, mu, 1.0}.validate_for_thinning();
  const PointFile in = read_point_file(in_path);
  if (variant == "auto") variant = in.circle ? "circle" : "box";
  if ((variant == "circle") != in.circle) {
    throw UsageError("variant '" + variant + "' does not match the point file domain");
  }
  if (variant == "unit" && in.dimension() != 1) throw UsageError("unit variant needs dim=1");

  PointFile out = in;
  out.points.clear();
  unsigned k = 0;
  std::vector<std::size_t> unthinned;
  if (variant == "circle") {
    std::vector<CirclePoint> pts;
    for (const BoxPoint& p : in.points) pts.push_back(CirclePoint{p[0].bits});
    const PoissonThinning thinning(lambda, mu);
    k = thinning.k();
    const auto res = thinning.apply(CirclePointSet(std::move(pts)));
    for (const CirclePoint& p : res.points) out.points.push_back({UnitPoint{p.turns}});
    if (res.degenerate) std::cerr << "note: degenerate configuration, points kept\n";
  } else if (variant == "box" || variant == "unit") {
    const double vol = in.box.volume();
    k = PoissonThinning(lambda * vol, mu * vol).k();
    out.points = thin_box(EuclideanPointSet{in.points}, in.box, lambda, mu).points;
  } else if (variant == "tiled") {
    const TileResult res = tile_thin(EuclideanPointSet{in.points}, in.box, lambda, mu);
    const double cube = std::pow(res.tile_side, static_cast<double>(in.dimension()));
    k = PoissonThinning(lambda * cube, mu * cube).k();
    out.points = res.points.points;
    unthinned = res.unthinned_cells;
  } else {
    throw UsageError("unknown variant: " + variant);
  }

  if (out_path.empty() || out_path == "-") {
    write_point_file(std::cout, out);
  } else {
    auto f = open_output(out_path);
    write_point_file(f, out);
  }
  ordered_json j;
  j["variant"] = variant;
  j["n_in"] = in.points.size();
  j["n_out"] = out.points.size();
  j["k"] = k;
  if (variant == "tiled") j["unthinned_cells"] = unthinned;
  (out_path.empty() || out_path == "-" ? std::cerr : std::cout) << j.dump() << '\n';
  return kExitOk;
}

int cmd_verify(const std::string& config_path, std::optional<std::size_t> trials,
               std::optional<std::uint64_t> seed, unsigned threads, const std::string& out_path) {
  std::ifstream in(config_path);
  if (!in) throw UsageError("cannot open config " + config_path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  TrialConfig config = config_from_json(j);
  if (trials) config.trials = *trials;
  if (seed) config.seed = *seed;
  if (threads) config.threads = threads;
  config.validate();
  const TestReport report = run_suite(config);
  const std::string text = report.to_json().dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    open_output(out_path) << text;
  }
  return report.passed ? kExitOk : kExitVerifyFailed;
}

int cmd_sample(double lambda, const std::string& box_text, bool circle, std::uint64_t seed,
               const std::string& out_path) {
  PointFile f;
  const CounterStream rng = trial_stream(seed, 0);
  if (circle) {
    f.circle = true;
    for (const CirclePoint& p : sample_circle_process(lambda, rng)) f.points.push_back({UnitPoint{p.turns}});
  } else {
    std::istringstream header("dim=" + std::to_string(std::count(box_text.begin(), box_text.end(), ',') + 1) +
                              " box=" + box_text);
    f.box = parse_point_file(header).box;
    f.points = sample_box_process(lambda, f.box, rng).points;
  }
  if (out_path.empty() || out_path == "-") {
    write_point_file(std::cout, f);
  } else {
    auto out = open_output(out_path);
    write_point_file(out, f);
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic thinning of Poisson point processes"};
  app.require_subcommand(1);

  double lambda = 0.0, mu = 0.0, volume = 1.0, tol = 1e-9;

  auto* check = app.add_subcommand("check", "Decide whether a thinning from lambda to mu exists");
  check->add_option("lambda", lambda, "Input intensity")->required();
  check->add_option("mu", mu, "Target intensity")->required();
  check->add_option("--volume", volume, "Volume of the space");

  double lc_mu = 0.0, lc_volume = 1.0;
  auto* lc = app.add_subcommand("lambda-c", "Critical input intensity for a target mu");
  lc->add_option("mu", lc_mu, "Target intensity")->required();
  lc->add_option("--volume", lc_volume, "Volume of the space");
  lc->add_option("--tol", tol, "Bisection tolerance");

  RegionRequest req;
  std::string csv, svg;
  auto* region = app.add_subcommand("region", "Rasterize the feasible (lambda, mu) region");
  region->add_option("--lambda-max", req.lambda_max, "Largest lambda");
  region->add_option("--mu-max", req.mu_max, "Largest mu");
  region->add_option("--step", req.step, "Grid step");
  region->add_option("--volume", req.volume, "Volume of the space");
  region->add_option("--csv", csv, "CSV output path (default stdout)");
  region->add_option("--svg", svg, "SVG output path");

  std::string in_path, out_path, variant = "auto";
  double t_lambda = 0.0, t_mu = 0.0;
  auto* thin = app.add_subcommand("thin", "Thin a point file");
  thin->add_option("input", in_path, "Input point file")->required();
  thin->add_option("lambda", t_lambda, "Input intensity")->required();
  thin->add_option("mu", t_mu, "Target intensity")->required();
  thin->add_option("-o,--output", out_path, "Output point file (default stdout)");
  thin->add_option("--variant", variant, "auto, unit, box, circle or tiled");

  std::string config_path = "configs/verify_default.json", report_path;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  auto* verify = app.add_subcommand("verify", "Run the Monte Carlo verification suite");
  verify->add_option("--config", config_path, "JSON trial configuration");
  verify->add_option("--trials", trials, "Override the trial count");
  verify->add_option("--seed", seed, "Override the seed");
  verify->add_option("--threads", threads, "Worker threads (default THIN_THREADS or all cores)");
  verify->add_option("-o,--output", report_path, "Report path (default stdout)");

  double s_lambda = 0.0;
  std::string box_text = "0..1";
  bool circle = false;
  std::uint64_t s_seed = 1;
  std::string s_out;
  auto* sample = app.add_subcommand("sample", "Sample a Poisson process into a point file");
  sample->add_option("lambda", s_lambda, "Intensity")->required();
  sample->add_option("--box", box_text, "Box as lo..hi[,lo..hi...]");
  sample->add_flag("--circle", circle, "Sample on the circle instead of a box");
  sample->add_option("--seed", s_seed, "Seed");
  sample->add_option("-o,--output", s_out, "Output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*check) return cmd_check(lambda, mu, volume);
    if (*lc) return cmd_lambda_c(lc_mu, lc_volume, tol);
    if (*region) return cmd_region(req, csv, svg);
    if (*thin) return cmd_thin(in_path, t_lambda, t_mu, out_path, variant);
    if (*verify) return cmd_verify(config_path, trials, seed, threads, report_path);
    if (*sample) return cmd_sample(s_lambda, box_text, circle, s_seed, s_out);
  } catch (const FeasibilityError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const PreconditionError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
