// strobo: Melnikov and averaged-function tables, verification of the
// f_i = T g_i identities, and periodic-orbit search for T-periodic systems.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "strobo/cli/run.hpp"

namespace {

std::vector<double> parse_point(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (item.empty() || used != item.size()) throw CLI::ValidationError("point", "cannot parse '" + text + "'");
    out.push_back(v);
  }
  if (out.empty()) throw CLI::ValidationError("point", "empty point");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  using strobo::cli::RunConfig;
  RunConfig cfg;
  std::vector<std::string> points;
  std::string guess;
  std::size_t ell = 0, order = 0;
  unsigned spatial = 0;
  double eps = 0.0;

  CLI::App app{"Higher-order stroboscopic averaging toolkit"};
  app.set_version_flag("--version", std::string(STROBO_VERSION));
  app.require_subcommand(1);

  auto add_system = [&](CLI::App* sub) {
    sub->add_option("system", cfg.system_path, "System file (JSON)")->required();
    sub->add_option("--order", order, "Truncation order override k");
    sub->add_option("--steps", cfg.steps, "RK4 steps per period")->check(CLI::PositiveNumber);
    sub->add_option("--out", cfg.out, "Report path (default: standard output)");
  };
  auto add_samples = [&](CLI::App* sub) {
    sub->add_option("--spatial-order", spatial, "Spatial jet order (default k-1)");
    sub->add_option("--point", points, "Sample point, comma separated; repeatable");
    sub->add_option("--samples", cfg.samples, "Number of random sample points");
    sub->add_option("--seed", cfg.seed, "Seed for random sample points");
    sub->add_option("--box", cfg.box, "Random points are drawn from [-box, box]^n");
  };

  auto* table = app.add_subcommand("table", "Write f_i(z) and g_i(z), i = 1..k, at each sample point");
  add_system(table);
  add_samples(table);

  auto* verify = app.add_subcommand("verify", "Check f_i = T g_i up to 2l-1 and the order-2l closure");
  add_system(verify);
  add_samples(verify);
  verify->add_option("--ell", ell, "Hypothesis index l (2 <= l <= k)")->required();
  verify->add_option("--tol-hypothesis", cfg.tol_hypothesis, "Absolute tolerance on f_i, g_i for i < l");
  verify->add_option("--tol-identity", cfg.tol_identity, "Tolerance on |f_i - T g_i| / (1 + |f_i|)");
  verify->add_option("--tol-closure", cfg.tol_closure, "Tolerance on the scaled order-2l closure");

  auto* orbit = app.add_subcommand("find-orbit", "Newton on the first non-vanishing averaged function g_l");
  add_system(orbit);
  orbit->add_option("--ell", ell, "Level l of the averaged function (default 1)");
  orbit->add_option("--guess", guess, "Initial guess, comma separated")->required();
  orbit->add_option("--eps", eps, "Validate the orbit on the full system at this eps");
  orbit->add_option("--max-iterations", cfg.max_iterations, "Newton iteration limit");
  orbit->add_option("--tolerance", cfg.newton_tolerance, "Convergence threshold on |g_l|");
  orbit->add_option("--tol-hypothesis", cfg.tol_hypothesis, "Warn when |g_i|, i < l, exceeds this");

  auto* bell = app.add_subcommand("bell-debug", "Print the partition terms of B_{j,m}");
  bell->add_option("j", cfg.bell_j, "Total size j")->required();
  bell->add_option("m", cfg.bell_m, "Number of blocks m")->required();
  bell->add_option("--out", cfg.out, "Also write a JSON report here");

  try {
    app.parse(argc, argv);
    for (const auto& p : points) cfg.points.push_back(parse_point(p));
    if (!guess.empty()) cfg.guess = parse_point(guess);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return strobo::cli::kExitError;
  }

  CLI::App* active = app.get_subcommands().front();
  cfg.command = active->get_name();
  if (active->get_option_no_throw("--order") && active->count("--order")) cfg.order = order;
  if (active->get_option_no_throw("--ell") && active->count("--ell")) cfg.ell = ell;
  if (active->get_option_no_throw("--spatial-order") && active->count("--spatial-order")) {
    cfg.spatial_order = spatial;
  }
  if (active->get_option_no_throw("--eps") && active->count("--eps")) cfg.eps = eps;

  return strobo::cli::execute(cfg, std::cout, std::cerr);
}
