// herdgibbs experiment CLI: deterministic herded Gibbs sampling experiments
// with stochastic Gibbs and mean-field baselines.
//
// Subcommands: toy2, empty, denoise, verify. Options come from the command
// line or from a flat key-value config file (--config); command-line values
// win over file values, which win over defaults.
//
// Exit codes: 0 success, 1 verification-check failure, 2 config error.

#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "herdgibbs/experiments.hpp"
#include "herdgibbs/verify.hpp"

namespace {

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item.empty()) continue;
    std::size_t pos = 0;
    out.push_back(std::stod(item, &pos));
    if (pos != item.size())
      throw std::invalid_argument("bad numeric list element '" + item + "'");
  }
  if (out.empty()) throw std::invalid_argument("empty numeric list");
  return out;
}

std::vector<std::string> parse_string_list(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  if (out.empty()) throw std::invalid_argument("empty list");
  return out;
}

// Config-file values overriding defaults but not explicit command-line flags.
class FileOverlay {
 public:
  explicit FileOverlay(std::map<std::string, std::string> values)
      : values_(std::move(values)) {}

  void apply(const CLI::App& scope, const std::string& key,
             const std::string& flag,
             const std::function<void(const std::string&)>& setter) {
    const auto it = values_.find(key);
    if (it == values_.end()) return;
    consumed_.insert(key);
    const CLI::Option* opt = scope.get_option_no_throw(flag);
    if (opt != nullptr && opt->count() > 0) return;  // CLI wins
    setter(it->second);
  }

  void reject_unknown() const {
    for (const auto& [key, value] : values_) {
      if (!consumed_.count(key))
        throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }

 private:
  std::map<std::string, std::string> values_;
  std::set<std::string> consumed_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic herded Gibbs sampling experiments"};
  app.require_subcommand(1);

  std::string out_dir = "out";
  unsigned threads = 1;
  std::uint64_t seed = 1;
  std::string config_path;
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--threads", threads, "replicate-level worker threads")
      ->capture_default_str();
  app.add_option("--seed", seed, "base seed for stochastic replicates")
      ->capture_default_str();
  app.add_option("--config", config_path, "flat key-value config file");

  // toy2
  herdgibbs::Toy2Config toy2;
  std::string toy2_eps = "0.1,0.01,0.001,0.0001";
  CLI::App* toy2_cmd = app.add_subcommand(
      "toy2", "two-variable model: herded vs Gibbs error series and slopes");
  toy2_cmd->add_option("--epsilons", toy2_eps, "comma list, each in (0, 1/4)")
      ->capture_default_str();
  toy2_cmd->add_option("--t-min-pow", toy2.t_min_pow, "T grid from 2^this")
      ->capture_default_str();
  toy2_cmd->add_option("--t-max-pow", toy2.t_max_pow, "T grid up to 2^this")
      ->capture_default_str();
  toy2_cmd->add_option("--gibbs-replicates", toy2.gibbs_replicates,
                       "stochastic chains per epsilon")
      ->capture_default_str();
  toy2_cmd->add_option("--marginal-var", toy2.marginal_var,
                       "variable for the marginal error series")
      ->capture_default_str();
  toy2_cmd->add_option("--tau", toy2.tau, "sweeps discarded before averaging")
      ->capture_default_str();

  // empty
  herdgibbs::EmptyConfig empty;
  std::string empty_marginals;
  CLI::App* empty_cmd = app.add_subcommand(
      "empty", "independent-variable model: TV series and weight discrepancy");
  empty_cmd->add_option("--marginals", empty_marginals,
                        "comma list in (0,1); default sqrt2-1, sqrt3-1");
  empty_cmd->add_option("--sweeps", empty.sweeps, "herded sweeps")
      ->capture_default_str();
  empty_cmd->add_option("--discrepancy-points", empty.discrepancy_points,
                        "weight points for the star-discrepancy estimate")
      ->capture_default_str();

  // denoise
  herdgibbs::DenoiseExpConfig denoise;
  std::string denoise_sigmas = "2,4,6,8";
  std::string denoise_methods = "herded,herded-shared,gibbs,mf0.5,mf1";
  CLI::App* denoise_cmd = app.add_subcommand(
      "denoise", "Ising MRF image denoising across noise levels and methods");
  denoise_cmd->add_option("--image", denoise.image,
                          "PGM path, or 'synthetic' for the built-in shape");
  denoise_cmd->add_option("--synthetic-size", denoise.synthetic_size,
                          "side of the built-in image")
      ->capture_default_str();
  denoise_cmd->add_option("--j", denoise.coupling, "Ising coupling strength")
      ->capture_default_str();
  denoise_cmd->add_option("--sigmas", denoise_sigmas, "noise levels, comma list")
      ->capture_default_str();
  denoise_cmd->add_option("--mu-plus", denoise.mu_plus, "observation mean for +1")
      ->capture_default_str();
  denoise_cmd->add_option("--mu-minus", denoise.mu_minus, "observation mean for -1")
      ->capture_default_str();
  denoise_cmd->add_option("--sweeps", denoise.sweeps, "sampler sweeps")
      ->capture_default_str();
  denoise_cmd->add_option("--seeds-count", denoise.seeds_count,
                          "corrupted replicates per sigma")
      ->capture_default_str();
  denoise_cmd->add_option("--threshold", denoise.threshold,
                          "binarization threshold for the input image")
      ->capture_default_str();
  denoise_cmd->add_option("--burn-in", denoise.burn_in,
                          "sweeps discarded before the estimator")
      ->capture_default_str();
  denoise_cmd->add_option("--methods", denoise_methods,
                          "comma list: herded, herded-shared, gibbs, "
                          "annealed-gibbs, mf<D>")
      ->capture_default_str();

  CLI::App* verify_cmd =
      app.add_subcommand("verify", "run the full acceptance-check suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    FileOverlay overlay(config_path.empty()
                            ? std::map<std::string, std::string>{}
                            : herdgibbs::parse_config_file(config_path));
    overlay.apply(app, "out", "--out", [&](const std::string& v) { out_dir = v; });
    overlay.apply(app, "threads", "--threads",
                  [&](const std::string& v) { threads = std::stoul(v); });
    overlay.apply(app, "seed", "--seed",
                  [&](const std::string& v) { seed = std::stoull(v); });

    herdgibbs::GlobalConfig global;
    global.out_dir = out_dir;
    global.threads = threads;
    global.seed = seed;

    if (toy2_cmd->parsed()) {
      overlay.apply(*toy2_cmd, "epsilons", "--epsilons",
                    [&](const std::string& v) { toy2_eps = v; });
      overlay.apply(*toy2_cmd, "t_min_pow", "--t-min-pow",
                    [&](const std::string& v) { toy2.t_min_pow = std::stoul(v); });
      overlay.apply(*toy2_cmd, "t_max_pow", "--t-max-pow",
                    [&](const std::string& v) { toy2.t_max_pow = std::stoul(v); });
      overlay.apply(*toy2_cmd, "gibbs_replicates", "--gibbs-replicates",
                    [&](const std::string& v) {
                      toy2.gibbs_replicates = std::stoul(v);
                    });
      overlay.apply(*toy2_cmd, "marginal_var", "--marginal-var",
                    [&](const std::string& v) { toy2.marginal_var = std::stoul(v); });
      overlay.apply(*toy2_cmd, "tau", "--tau",
                    [&](const std::string& v) { toy2.tau = std::stoull(v); });
      overlay.reject_unknown();
      toy2.global = global;
      toy2.epsilons = parse_double_list(toy2_eps);
      herdgibbs::run_toy2(toy2);
      return 0;
    }

    if (empty_cmd->parsed()) {
      overlay.apply(*empty_cmd, "marginals", "--marginals",
                    [&](const std::string& v) { empty_marginals = v; });
      overlay.apply(*empty_cmd, "sweeps", "--sweeps",
                    [&](const std::string& v) { empty.sweeps = std::stoull(v); });
      overlay.apply(*empty_cmd, "discrepancy_points", "--discrepancy-points",
                    [&](const std::string& v) {
                      empty.discrepancy_points = std::stoull(v);
                    });
      overlay.reject_unknown();
      empty.global = global;
      if (!empty_marginals.empty())
        empty.marginals = parse_double_list(empty_marginals);
      herdgibbs::run_empty(empty);
      return 0;
    }

    if (denoise_cmd->parsed()) {
      overlay.apply(*denoise_cmd, "image", "--image",
                    [&](const std::string& v) { denoise.image = v; });
      overlay.apply(*denoise_cmd, "synthetic_size", "--synthetic-size",
                    [&](const std::string& v) {
                      denoise.synthetic_size = std::stoul(v);
                    });
      overlay.apply(*denoise_cmd, "j", "--j",
                    [&](const std::string& v) { denoise.coupling = std::stod(v); });
      overlay.apply(*denoise_cmd, "sigmas", "--sigmas",
                    [&](const std::string& v) { denoise_sigmas = v; });
      overlay.apply(*denoise_cmd, "mu_plus", "--mu-plus",
                    [&](const std::string& v) { denoise.mu_plus = std::stod(v); });
      overlay.apply(*denoise_cmd, "mu_minus", "--mu-minus",
                    [&](const std::string& v) { denoise.mu_minus = std::stod(v); });
      overlay.apply(*denoise_cmd, "sweeps", "--sweeps",
                    [&](const std::string& v) { denoise.sweeps = std::stoull(v); });
      overlay.apply(*denoise_cmd, "seeds_count", "--seeds-count",
                    [&](const std::string& v) {
                      denoise.seeds_count = std::stoul(v);
                    });
      overlay.apply(*denoise_cmd, "threshold", "--threshold",
                    [&](const std::string& v) {
                      denoise.threshold = static_cast<std::uint16_t>(std::stoul(v));
                    });
      overlay.apply(*denoise_cmd, "burn_in", "--burn-in",
                    [&](const std::string& v) { denoise.burn_in = std::stoull(v); });
      overlay.apply(*denoise_cmd, "methods", "--methods",
                    [&](const std::string& v) { denoise_methods = v; });
      overlay.reject_unknown();
      denoise.global = global;
      denoise.sigmas = parse_double_list(denoise_sigmas);
      denoise.methods = parse_string_list(denoise_methods);
      if (denoise.image.empty())
        throw std::invalid_argument(
            "denoise requires --image (path or 'synthetic')");
      herdgibbs::run_denoise(denoise);
      return 0;
    }

    if (verify_cmd->parsed()) {
      overlay.reject_unknown();
      herdgibbs::VerifyConfig vc;
      vc.global = global;
      return herdgibbs::run_verify_and_report(vc, std::cout);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
